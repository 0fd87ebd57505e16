#include "geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "error.hpp"

namespace cutfem {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol) {
  if (distance_to_segment(p1, q1, q2) <= tol || distance_to_segment(p2, q1, q2) <= tol ||
      distance_to_segment(q1, p1, p2) <= tol || distance_to_segment(q2, p1, p2) <= tol) {
    return true;
  }
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  if (segments_intersect(p1, p2, q1, q2, 0.0)) return 0.0;
  return std::min({distance_to_segment(p1, q1, q2), distance_to_segment(p2, q1, q2),
                   distance_to_segment(q1, p1, p2), distance_to_segment(q2, p1, p2)});
}

int winding_number(std::span<const Vec2> poly, const Vec2& p) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0) ++wn;
    } else if (b.y <= p.y && orient(a, b, p) < 0) {
      --wn;
    }
  }
  return wn;
}

SegmentKind kind_of(BoundaryTag tag) {
  return tag == BoundaryTag::Dirichlet ? SegmentKind::DomainDirichlet : SegmentKind::DomainNeumann;
}

BBox edge_box(const BoundaryEdge& e) {
  BBox b;
  b.extend(e.a);
  b.extend(e.b);
  return b;
}

}  // namespace

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return norm(p - (a + t * d));
}

void BBox::extend(const Vec2& p) {
  lo.x = std::min(lo.x, p.x);
  lo.y = std::min(lo.y, p.y);
  hi.x = std::max(hi.x, p.x);
  hi.y = std::max(hi.y, p.y);
}

bool BBox::overlaps(const BBox& o, double pad) const {
  return lo.x <= o.hi.x + pad && o.lo.x <= hi.x + pad && lo.y <= o.hi.y + pad && o.lo.y <= hi.y + pad;
}

double signed_area(std::span<const Vec2> polygon) {
  double s = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * s;
}

BoundaryRep::BoundaryRep(std::vector<BoundaryLoop> loops) : loops_(std::move(loops)) {
  require(!loops_.empty(), ErrorCode::InvalidGeometry, "boundary representation has no loops");
  for (const auto& loop : loops_) {
    require(loop.vertices.size() >= 3, ErrorCode::InvalidGeometry, "boundary loop needs at least 3 vertices");
    require(loop.tags.size() == loop.vertices.size(), ErrorCode::InvalidGeometry,
            "boundary loop needs one tag per edge");
    for (const auto& v : loop.vertices) {
      require(std::isfinite(v.x) && std::isfinite(v.y), ErrorCode::InvalidGeometry, "non-finite boundary vertex");
      bbox_.extend(v);
    }
  }
  tol_ = 1e-12 * bbox_.diameter();

  for (std::size_t l = 0; l < loops_.size(); ++l) {
    const auto& loop = loops_[l];
    const std::size_t n = loop.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = loop.vertices[i];
      const Vec2& b = loop.vertices[(i + 1) % n];
      require(norm(b - a) > tol_, ErrorCode::InvalidGeometry,
              "degenerate boundary loop: zero-length edge in loop " + std::to_string(l));
      edges_.push_back({a, b, loop.tags[i]});
    }
  }

  // Simplicity: no two non-adjacent edges may touch, adjacent edges may not fold back.
  std::vector<std::size_t> first(loops_.size() + 1, 0);
  for (std::size_t l = 0; l < loops_.size(); ++l) first[l + 1] = first[l] + loops_[l].vertices.size();
  auto loop_of = [&](std::size_t e) {
    return static_cast<std::size_t>(std::upper_bound(first.begin(), first.end(), e) - first.begin() - 1);
  };
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const BBox bi = edge_box(edges_[i]);
    for (std::size_t j = i + 1; j < edges_.size(); ++j) {
      if (!bi.overlaps(edge_box(edges_[j]), tol_)) continue;
      const std::size_t li = loop_of(i);
      const std::size_t lj = loop_of(j);
      const std::size_t n = loops_[li].vertices.size();
      const bool adjacent = li == lj && (j == i + 1 || (i == first[li] && j == first[li] + n - 1));
      const auto& ei = edges_[i];
      const auto& ej = edges_[j];
      if (adjacent) {
        // Shared vertex is expected; reject only overlap along a common line.
        const Vec2 shared = (j == i + 1) ? ei.b : ei.a;
        const Vec2 other_i = (j == i + 1) ? ei.a : ei.b;
        const Vec2 other_j = (j == i + 1) ? ej.b : ej.a;
        const Vec2 di = other_i - shared;
        const Vec2 dj = other_j - shared;
        const bool folded = std::abs(cross(di, dj)) <= tol_ * (norm(di) + norm(dj)) && dot(di, dj) > 0;
        require(!folded, ErrorCode::InvalidGeometry, "boundary loop folds back on itself");
        continue;
      }
      require(!segments_intersect(ei.a, ei.b, ej.a, ej.b, tol_), ErrorCode::InvalidGeometry,
              "boundary loops are not simple: edges " + std::to_string(i) + " and " + std::to_string(j) +
                  " intersect");
    }
  }

  // Orientation must agree with nesting depth: even depth CCW, odd depth CW.
  for (std::size_t l = 0; l < loops_.size(); ++l) {
    int depth = 0;
    for (std::size_t m = 0; m < loops_.size(); ++m) {
      if (m != l && winding_number(loops_[m].vertices, loops_[l].vertices.front()) != 0) ++depth;
    }
    const double a = signed_area(loops_[l].vertices);
    const bool outer = depth % 2 == 0;
    require(outer ? a > 0 : a < 0, ErrorCode::InvalidGeometry,
            "loop " + std::to_string(l) + (outer ? " is an outer loop but clockwise" : " is a hole but counter-clockwise"));
  }
}

double BoundaryRep::area() const {
  double s = 0.0;
  for (const auto& loop : loops_) s += signed_area(loop.vertices);
  return s;
}

bool BoundaryRep::has_dirichlet() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const BoundaryEdge& e) { return e.tag == BoundaryTag::Dirichlet; });
}

PointClass point_in_domain(const BoundaryRep& rep, const Vec2& p) {
  require(!rep.empty(), ErrorCode::InvalidGeometry, "empty boundary representation");
  const double tol = rep.tolerance();
  int wn = 0;
  for (const auto& e : rep.edges()) {
    if (distance_to_segment(p, e.a, e.b) <= tol) return PointClass::OnBoundary;
    if (e.a.y <= p.y) {
      if (e.b.y > p.y && orient(e.a, e.b, p) > 0) ++wn;
    } else if (e.b.y <= p.y && orient(e.a, e.b, p) < 0) {
      --wn;
    }
  }
  return wn != 0 ? PointClass::Inside : PointClass::Outside;
}

double CutRegion::area() const {
  double s = 0.0;
  for (const auto& loop : loops)
    for (const auto& seg : loop) s += cross(seg.a, seg.b);
  return 0.5 * s;
}

std::vector<Segment> CutRegion::domain_segments() const {
  std::vector<Segment> out;
  for (const auto& loop : loops)
    for (const auto& seg : loop)
      if (seg.on_domain()) out.push_back(seg);
  return out;
}

std::size_t CutRegion::num_segments() const {
  std::size_t n = 0;
  for (const auto& loop : loops) n += loop.size();
  return n;
}

CutRegion clip_cell(const BoundaryRep& rep, std::span<const Vec2> cell) {
  const double tol = rep.tolerance();
  const std::size_t nc = cell.size();
  require(nc >= 3, ErrorCode::InvalidArgument, "cell needs at least 3 vertices");
  require(signed_area(cell) > 0, ErrorCode::InvalidArgument, "cell must be positively oriented");

  BBox cb;
  for (const auto& v : cell) cb.extend(v);
  std::vector<const BoundaryEdge*> cand;
  for (const auto& e : rep.edges())
    if (edge_box(e).overlaps(cb, tol)) cand.push_back(&e);

  auto full_cell = [&] {
    CutRegion r;
    r.loops.emplace_back();
    for (std::size_t i = 0; i < nc; ++i) r.loops.back().push_back({cell[i], cell[(i + 1) % nc], SegmentKind::CellEdge});
    return r;
  };

  if (cand.empty()) {
    Vec2 c{};
    for (const auto& v : cell) c += v;
    c *= 1.0 / static_cast<double>(nc);
    return point_in_domain(rep, c) == PointClass::Inside ? full_cell() : CutRegion{};
  }

  std::vector<Vec2> inward(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    const Vec2 d = cell[(i + 1) % nc] - cell[i];
    inward[i] = (1.0 / norm(d)) * left_normal(d);
  }

  std::vector<Segment> pieces;

  // Boundary edges clipped to the closed cell.
  for (const BoundaryEdge* e : cand) {
    const Vec2 d = e->b - e->a;
    const double len = norm(d);
    double t0 = 0.0;
    double t1 = 1.0;
    bool reject = false;
    int on_edge = -1;
    for (std::size_t i = 0; i < nc && !reject; ++i) {
      const double num = dot(inward[i], e->a - cell[i]);
      const double den = dot(inward[i], d);
      if (std::abs(den) <= 1e-14 * len) {
        if (num < -tol) reject = true;
        else if (num <= tol) on_edge = static_cast<int>(i);
        continue;
      }
      const double t = -num / den;
      if (den > 0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
    }
    if (reject || (t1 - t0) * len <= tol) continue;
    if (on_edge >= 0 && dot(left_normal(d), inward[static_cast<std::size_t>(on_edge)]) <= 0) continue;
    const Vec2 p0 = t0 == 0.0 ? e->a : e->a + t0 * d;
    const Vec2 p1 = t1 == 1.0 ? e->b : e->a + t1 * d;
    pieces.push_back({p0, p1, kind_of(e->tag)});
  }

  // Cell edges split at every boundary crossing; keep the pieces inside the domain.
  std::vector<double> params;
  for (std::size_t i = 0; i < nc; ++i) {
    const Vec2 c0 = cell[i];
    const Vec2 c1 = cell[(i + 1) % nc];
    const Vec2 d = c1 - c0;
    const double len = norm(d);
    params.assign({0.0, 1.0});
    for (const BoundaryEdge* e : cand) {
      const Vec2 r = e->b - e->a;
      const double denom = cross(d, r);
      if (std::abs(denom) > 1e-14 * len * norm(r)) {
        const double s = cross(e->a - c0, r) / denom;
        const double u = cross(e->a - c0, d) / denom;
        const double ut = tol / norm(r);
        if (s > 0.0 && s < 1.0 && u >= -ut && u <= 1.0 + ut) params.push_back(s);
      }
      for (const Vec2& v : {e->a, e->b}) {
        if (distance_to_segment(v, c0, c1) <= tol) {
          const double s = dot(v - c0, d) / (len * len);
          if (s > 0.0 && s < 1.0) params.push_back(s);
        }
      }
    }
    std::sort(params.begin(), params.end());
    for (std::size_t k = 0; k + 1 < params.size(); ++k) {
      const double sa = params[k];
      const double sb = params[k + 1];
      if ((sb - sa) * len <= tol) continue;
      const Vec2 mid = c0 + (0.5 * (sa + sb)) * d;
      if (point_in_domain(rep, mid) == PointClass::Inside) {
        pieces.push_back({sa == 0.0 ? c0 : c0 + sa * d, sb == 1.0 ? c1 : c0 + sb * d, SegmentKind::CellEdge});
      }
    }
  }

  if (pieces.empty()) return {};

  // Chain into closed loops, snapping endpoints that agree to round-off.
  const double chain_tol = 1e-9 * cb.diameter() + 10.0 * tol;
  CutRegion region;
  std::vector<bool> used(pieces.size(), false);
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<Segment> loop{pieces[s]};
    const Vec2 start = pieces[s].a;
    while (norm(loop.back().b - start) > chain_tol) {
      const Vec2 end = loop.back().b;
      std::size_t best = pieces.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        if (used[j]) continue;
        const double dj = norm(pieces[j].a - end);
        if (dj < best_d) {
          best_d = dj;
          best = j;
        }
      }
      require(best < pieces.size() && best_d <= chain_tol, ErrorCode::InvalidGeometry,
              "cut region does not close: open loop");
      used[best] = true;
      Segment next = pieces[best];
      next.a = end;
      loop.push_back(next);
    }
    loop.back().b = start;
    region.loops.push_back(std::move(loop));
  }

  const double cell_area = signed_area(cell);
  const double a = region.area();
  if (a <= 1e-24 * cell_area) return {};
  require(a <= cell_area * (1.0 + 1e-9), ErrorCode::InvalidGeometry, "cut region larger than its cell");
  return region;
}

bool cell_touches_boundary(const BoundaryRep& rep, std::span<const Vec2> cell, BoundaryTag tag) {
  const double tol = rep.tolerance();
  const std::size_t nc = cell.size();
  BBox cb;
  for (const auto& v : cell) cb.extend(v);
  for (const auto& e : rep.edges()) {
    if (e.tag != tag || !edge_box(e).overlaps(cb, tol)) continue;
    bool inside = true;
    for (std::size_t i = 0; i < nc && inside; ++i) {
      const Vec2 d = cell[(i + 1) % nc] - cell[i];
      inside = cross(d, e.a - cell[i]) >= -tol * norm(d);
    }
    if (inside) return true;
    for (std::size_t i = 0; i < nc; ++i) {
      if (segment_distance(e.a, e.b, cell[i], cell[(i + 1) % nc]) <= tol) return true;
    }
  }
  return false;
}

std::vector<Vec2> circle_points(const Vec2& center, double radius, int segments) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / segments;
    pts.push_back({center.x + radius * std::cos(phi), center.y + radius * std::sin(phi)});
  }
  return pts;
}

BoundaryRep make_rectangle(const RectangleSpec& spec) {
  require(spec.hi.x > spec.lo.x && spec.hi.y > spec.lo.y, ErrorCode::InvalidArgument,
          "rectangle needs positive width and height");
  BoundaryLoop loop;
  loop.vertices = {spec.lo, {spec.hi.x, spec.lo.y}, spec.hi, {spec.lo.x, spec.hi.y}};
  for (bool d : spec.dirichlet) loop.tags.push_back(d ? BoundaryTag::Dirichlet : BoundaryTag::Neumann);
  return BoundaryRep({std::move(loop)});
}

BoundaryRep make_ring(const RingSpec& spec) {
  require(spec.r_inner > 0 && spec.r_outer > spec.r_inner, ErrorCode::InvalidArgument,
          "ring needs 0 < r_inner < r_outer");
  require(spec.segments >= 8, ErrorCode::InvalidArgument, "circles need at least 8 segments");
  BoundaryLoop outer;
  outer.vertices = circle_points(spec.center, spec.r_outer, spec.segments);
  outer.tags.assign(outer.vertices.size(), spec.dirichlet_outer ? BoundaryTag::Dirichlet : BoundaryTag::Neumann);
  BoundaryLoop inner;
  inner.vertices = circle_points(spec.center, spec.r_inner, spec.segments);
  std::reverse(inner.vertices.begin(), inner.vertices.end());
  inner.tags.assign(inner.vertices.size(), spec.dirichlet_inner ? BoundaryTag::Dirichlet : BoundaryTag::Neumann);
  return BoundaryRep({std::move(outer), std::move(inner)});
}

namespace {

void check_lshape(const LShapeSpec& s) {
  require(s.width > 0 && s.arm > 0 && s.arm < s.width, ErrorCode::InvalidArgument, "L-shape needs 0 < arm < width");
  require(s.radius > 0 && s.radius < std::min(s.arm, s.width - s.arm), ErrorCode::InvalidArgument,
          "L-shape corner radius too large");
  require(s.segments >= 1, ErrorCode::InvalidArgument, "L-shape corner needs at least one segment");
}

void push(BoundaryLoop& loop, Vec2 v, BoundaryTag tag) {
  loop.vertices.push_back(v);
  loop.tags.push_back(tag);
}

}  // namespace

BoundaryRep make_rounded_lshape(const LShapeSpec& s) {
  check_lshape(s);
  const double w = s.width;
  const double a = s.arm;
  const double r = s.radius;
  const auto N = BoundaryTag::Neumann;
  BoundaryLoop loop;
  push(loop, {0, 0}, BoundaryTag::Dirichlet);
  push(loop, {w, 0}, N);
  push(loop, {w, a}, N);
  // Fillet centred at (a+r, a+r), swept clockwise from -90 to -180 degrees.
  const Vec2 c{a + r, a + r};
  for (int k = 0; k < s.segments; ++k) {
    const double phi = -0.5 * std::numbers::pi - 0.5 * std::numbers::pi * k / s.segments;
    push(loop, {c.x + r * std::cos(phi), c.y + r * std::sin(phi)}, N);
  }
  push(loop, {a, a + r}, N);
  push(loop, {a, w}, N);
  push(loop, {0, w}, N);
  return BoundaryRep({std::move(loop)});
}

BoundaryRep make_drilled_lshape(const LShapeSpec& s) {
  check_lshape(s);
  require(s.segments >= 8, ErrorCode::InvalidArgument, "drilled hole needs at least 8 segments per turn");
  const double w = s.width;
  const double a = s.arm;
  const double r = s.radius;
  const auto N = BoundaryTag::Neumann;
  BoundaryLoop loop;
  push(loop, {0, 0}, BoundaryTag::Dirichlet);
  push(loop, {w, 0}, N);
  push(loop, {w, a}, N);
  // Hole centred on the corner, swept clockwise from 0 to -270 degrees.
  const int n = std::max(3, (3 * s.segments + 3) / 4);
  for (int k = 0; k < n; ++k) {
    const double phi = -1.5 * std::numbers::pi * k / n;
    push(loop, {a + r * std::cos(phi), a + r * std::sin(phi)}, N);
  }
  push(loop, {a, a + r}, N);
  push(loop, {a, w}, N);
  push(loop, {0, w}, N);
  return BoundaryRep({std::move(loop)});
}

BoundaryRep make_beam_with_holes(const BeamWithHolesSpec& s) {
  require(s.length > 0 && s.height > 0, ErrorCode::InvalidArgument, "beam needs positive dimensions");
  require(s.holes >= 0 && s.radius > 0, ErrorCode::InvalidArgument, "invalid hole parameters");
  require(s.segments >= 8, ErrorCode::InvalidArgument, "circles need at least 8 segments");
  std::vector<BoundaryLoop> loops;
  BoundaryLoop outer;
  const auto N = BoundaryTag::Neumann;
  push(outer, {0, 0}, N);
  push(outer, {s.length, 0}, N);
  push(outer, {s.length, s.height}, N);
  push(outer, {0, s.height}, BoundaryTag::Dirichlet);
  loops.push_back(std::move(outer));
  for (int k = 0; k < s.holes; ++k) {
    const Vec2 c{s.length * (k + 1) / (s.holes + 1), 0.5 * s.height + (k % 2 == 0 ? 1.0 : -1.0) * s.vertical_offset};
    require(c.y - s.radius > 0 && c.y + s.radius < s.height, ErrorCode::InvalidArgument, "hole does not fit in beam");
    BoundaryLoop hole;
    hole.vertices = circle_points(c, s.radius, s.segments);
    std::reverse(hole.vertices.begin(), hole.vertices.end());
    hole.tags.assign(hole.vertices.size(), N);
    loops.push_back(std::move(hole));
  }
  return BoundaryRep(std::move(loops));
}

}  // namespace cutfem
