#include "mesh.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cutfem {

Vec2 BackgroundMesh::rotate(const Vec2& v) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 BackgroundMesh::rotate_back(const Vec2& v) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

Vec2 BackgroundMesh::to_physical(const Vec2& lattice) const { return anchor + h * rotate(lattice); }

Vec2 BackgroundMesh::to_lattice(const Vec2& physical) const { return (1.0 / h) * rotate_back(physical - anchor); }

std::size_t BackgroundMesh::cell_id(int i, int j, int sub) const {
  return (static_cast<std::size_t>(j - j0) * nx + static_cast<std::size_t>(i - i0)) * subs() + sub;
}

std::vector<Vec2> BackgroundMesh::local_vertices(ElementFamily family, int sub) {
  if (family == ElementFamily::Quad) return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (sub == 0) return {{0, 0}, {1, 0}, {1, 1}};
  return {{0, 0}, {1, 1}, {0, 1}};
}

std::vector<Vec2> BackgroundMesh::cell_vertices(int i, int j, int sub) const {
  auto v = local_vertices(family, sub);
  for (auto& p : v) p = to_physical({p.x + i, p.y + j});
  return v;
}

BackgroundMesh build_background_grid(ElementFamily family, int i0, int j0, int nx, int ny, double h, double theta,
                                     Vec2 anchor) {
  require(h > 0 && std::isfinite(h), ErrorCode::InvalidArgument, "mesh size h must be positive");
  require(nx > 0 && ny > 0, ErrorCode::InvalidArgument, "grid needs at least one cell in each direction");
  BackgroundMesh bg;
  bg.family = family;
  bg.h = h;
  bg.theta = theta;
  bg.anchor = anchor;
  bg.i0 = i0;
  bg.j0 = j0;
  bg.nx = nx;
  bg.ny = ny;
  return bg;
}

BackgroundMesh build_background(ElementFamily family, const BBox& box, double h, double theta, Vec2 anchor) {
  require(h > 0 && std::isfinite(h), ErrorCode::InvalidArgument, "mesh size h must be positive");
  require(box.hi.x >= box.lo.x && box.hi.y >= box.lo.y, ErrorCode::InvalidArgument, "empty bounding box");
  BackgroundMesh probe;
  probe.h = h;
  probe.theta = theta;
  probe.anchor = anchor;
  BBox lat;
  for (const Vec2& c : {box.lo, Vec2{box.hi.x, box.lo.y}, box.hi, Vec2{box.lo.x, box.hi.y}}) lat.extend(probe.to_lattice(c));
  const int i0 = static_cast<int>(std::floor(lat.lo.x));
  const int j0 = static_cast<int>(std::floor(lat.lo.y));
  const int i1 = std::max(i0 + 1, static_cast<int>(std::ceil(lat.hi.x)));
  const int j1 = std::max(j0 + 1, static_cast<int>(std::ceil(lat.hi.y)));
  return build_background_grid(family, i0, j0, i1 - i0, j1 - j0, h, theta, anchor);
}

void check_coverage(const BackgroundMesh& bg, const BoundaryRep& rep) {
  const double eps = 1e-9;
  for (const auto& loop : rep.loops()) {
    for (const auto& v : loop.vertices) {
      const Vec2 s = bg.to_lattice(v);
      const bool inside = s.x >= bg.i0 - eps && s.x <= bg.i0 + bg.nx + eps && s.y >= bg.j0 - eps &&
                          s.y <= bg.j0 + bg.ny + eps;
      require(inside, ErrorCode::Coverage, "background grid does not cover the domain");
    }
  }
}

BackgroundMesh make_sliver_background(ElementFamily family, const BoundaryRep& rep, double h, double delta) {
  require(delta > 0 && delta <= 1, ErrorCode::InvalidArgument, "sliver fraction must lie in (0, 1]");
  require(h > 0, ErrorCode::InvalidArgument, "mesh size h must be positive");
  const auto& loops = rep.loops();
  bool rectangle = loops.size() == 1 && loops[0].vertices.size() == 4;
  if (rectangle) {
    const auto& v = loops[0].vertices;
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec2 d = v[(k + 1) % 4] - v[k];
      rectangle = rectangle && (std::abs(d.x) <= rep.tolerance() || std::abs(d.y) <= rep.tolerance());
    }
  }
  require(rectangle, ErrorCode::Unsupported, "sliver meshes need an axis-aligned rectangular domain");
  const BBox& box = rep.bbox();
  const double w = box.hi.x - box.lo.x;
  const double ht = box.hi.y - box.lo.y;
  const long k = std::lround(w / h - 2.0 * delta);
  require(k >= 0, ErrorCode::InvalidArgument, "mesh size too large for sliver construction");
  const double he = w / (static_cast<double>(k) + 2.0 * delta);
  const double ky = ht / he - 2.0 * delta;
  require(std::abs(ky - std::round(ky)) <= 1e-9 * std::max(1.0, ky), ErrorCode::Unsupported,
          "rectangle height incompatible with the sliver mesh size");
  const int cx = static_cast<int>(k) + 2;
  const int cy = static_cast<int>(std::lround(ky)) + 2;
  const Vec2 anchor{box.lo.x - (1.0 - delta) * he, box.lo.y - (1.0 - delta) * he};
  return build_background_grid(family, 0, 0, cx, cy, he, 0.0, anchor);
}

ActiveMesh::ActiveMesh(const BackgroundMesh& bg, const BoundaryRep& rep) : bg_(bg), rep_(rep) {
  check_coverage(bg_, rep_);
  lookup_.assign(bg_.num_cells(), -1);
  const double cell_area = bg_.cell_area();
  for (int j = bg_.j0; j < bg_.j0 + bg_.ny; ++j) {
    for (int i = bg_.i0; i < bg_.i0 + bg_.nx; ++i) {
      for (int sub = 0; sub < bg_.subs(); ++sub) {
        const auto verts = bg_.cell_vertices(i, j, sub);
        CutRegion region = clip_cell(rep_, verts);
        if (region.empty()) continue;
        ActiveCell c;
        c.i = i;
        c.j = j;
        c.sub = sub;
        c.touches_dirichlet = cell_touches_boundary(rep_, verts, BoundaryTag::Dirichlet);
        c.touches_boundary = c.touches_dirichlet || cell_touches_boundary(rep_, verts, BoundaryTag::Neumann);
        c.cut = std::abs(region.area() - cell_area) > 1e-12 * cell_area;
        if (c.cut || !region.domain_segments().empty()) c.region = std::move(region);
        lookup_[bg_.cell_id(i, j, sub)] = static_cast<int>(cells_.size());
        cells_.push_back(std::move(c));
      }
    }
  }
  require(!cells_.empty(), ErrorCode::Coverage, "no background cell intersects the domain");

  auto add_face = [&](int left, int ri, int rj, int rsub, Vec2 la, Vec2 lb, Vec2 ln) {
    if (ri < bg_.i0 || rj < bg_.j0 || ri >= bg_.i0 + bg_.nx || rj >= bg_.j0 + bg_.ny) return;
    const int right = find(ri, rj, rsub);
    if (right < 0) return;
    const ActiveCell& cl = cells_[static_cast<std::size_t>(left)];
    const ActiveCell& cr = cells_[static_cast<std::size_t>(right)];
    Face f;
    f.left = left;
    f.right = right;
    const Vec2 base{static_cast<double>(cl.i), static_cast<double>(cl.j)};
    f.a = bg_.to_physical(base + la);
    f.b = bg_.to_physical(base + lb);
    f.local_normal = (1.0 / norm(ln)) * ln;
    f.normal = bg_.rotate(f.local_normal);
    f.stabilized = cl.touches_boundary || cr.touches_boundary;
    f.dirichlet = cl.touches_dirichlet || cr.touches_dirichlet;
    faces_.push_back(f);
  };
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const ActiveCell& k = cells_[c];
    const int ci = static_cast<int>(c);
    if (bg_.family == ElementFamily::Quad) {
      add_face(ci, k.i + 1, k.j, 0, {1, 0}, {1, 1}, {1, 0});
      add_face(ci, k.i, k.j + 1, 0, {0, 1}, {1, 1}, {0, 1});
    } else if (k.sub == 0) {
      add_face(ci, k.i, k.j, 1, {0, 0}, {1, 1}, {-1, 1});
      add_face(ci, k.i + 1, k.j, 1, {1, 0}, {1, 1}, {1, 0});
    } else {
      add_face(ci, k.i, k.j + 1, 0, {0, 1}, {1, 1}, {0, 1});
    }
  }
}

int ActiveMesh::find(int i, int j, int sub) const {
  if (i < bg_.i0 || j < bg_.j0 || i >= bg_.i0 + bg_.nx || j >= bg_.j0 + bg_.ny || sub < 0 || sub >= bg_.subs())
    return -1;
  return lookup_[bg_.cell_id(i, j, sub)];
}

int ActiveMesh::locate(const Vec2& p) const {
  const double eps = 1e-9;
  const Vec2 s = bg_.to_lattice(p);
  for (int i : {static_cast<int>(std::floor(s.x)), static_cast<int>(std::floor(s.x - eps)),
                static_cast<int>(std::floor(s.x + eps))}) {
    for (int j : {static_cast<int>(std::floor(s.y)), static_cast<int>(std::floor(s.y - eps)),
                  static_cast<int>(std::floor(s.y + eps))}) {
      const double xi = s.x - i;
      const double eta = s.y - j;
      if (xi < -eps || xi > 1 + eps || eta < -eps || eta > 1 + eps) continue;
      for (int sub = 0; sub < bg_.subs(); ++sub) {
        if (bg_.family == ElementFamily::Tri && (sub == 0 ? xi < eta - eps : eta < xi - eps)) continue;
        const int c = find(i, j, sub);
        if (c >= 0) return c;
      }
    }
  }
  return -1;
}

std::vector<Vec2> ActiveMesh::vertices(int cell) const {
  const ActiveCell& c = cells_[static_cast<std::size_t>(cell)];
  return bg_.cell_vertices(c.i, c.j, c.sub);
}

Vec2 ActiveMesh::to_local(int cell, const Vec2& physical) const {
  const ActiveCell& c = cells_[static_cast<std::size_t>(cell)];
  return bg_.to_lattice(physical) - Vec2{static_cast<double>(c.i), static_cast<double>(c.j)};
}

Vec2 ActiveMesh::to_physical(int cell, const Vec2& local) const {
  const ActiveCell& c = cells_[static_cast<std::size_t>(cell)];
  return bg_.to_physical(local + Vec2{static_cast<double>(c.i), static_cast<double>(c.j)});
}

std::vector<int> ActiveMesh::stabilized_faces() const {
  std::vector<int> out;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (faces_[f].stabilized) out.push_back(static_cast<int>(f));
  return out;
}

std::vector<int> ActiveMesh::dirichlet_faces() const {
  std::vector<int> out;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (faces_[f].dirichlet) out.push_back(static_cast<int>(f));
  return out;
}

std::vector<int> ActiveMesh::neumann_faces() const {
  std::vector<int> out;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (faces_[f].stabilized && !faces_[f].dirichlet) out.push_back(static_cast<int>(f));
  return out;
}

std::size_t ActiveMesh::num_cut() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const ActiveCell& c) { return c.cut; }));
}

double ActiveMesh::area() const {
  double a = 0.0;
  for (const auto& c : cells_) a += c.region.empty() ? bg_.cell_area() : c.region.area();
  return a;
}

std::vector<double> lattice_crossings(const BackgroundMesh& bg, const Vec2& a, const Vec2& b, bool* on_face) {
  const Vec2 sa = bg.to_lattice(a);
  const Vec2 d = bg.to_lattice(b) - sa;
  const double eps = 1e-12 * std::max(1.0, norm(d));
  // Lattice lines are c . s = k for integer k.
  std::vector<Vec2> families{{1, 0}, {0, 1}};
  if (bg.family == ElementFamily::Tri) families.push_back({1, -1});
  std::vector<double> params;
  if (on_face) *on_face = false;
  for (const Vec2& c : families) {
    const double v0 = dot(c, sa);
    const double dv = dot(c, d);
    if (std::abs(dv) <= eps) {
      if (on_face && std::abs(v0 - std::round(v0)) <= 1e-10) *on_face = true;
      continue;
    }
    const double lo = std::min(v0, v0 + dv);
    const double hi = std::max(v0, v0 + dv);
    for (double k = std::ceil(lo); k <= hi; k += 1.0) {
      const double t = (k - v0) / dv;
      if (t > 0.0 && t < 1.0) params.push_back(t);
    }
  }
  return params;
}

std::vector<double> merge_parameters(std::vector<double> params) {
  const double merge = 1e-10;
  std::sort(params.begin(), params.end());
  std::vector<double> cuts{0.0};
  for (double t : params)
    if (t - cuts.back() > merge && 1.0 - t > merge) cuts.push_back(t);
  cuts.push_back(1.0);
  return cuts;
}

}  // namespace cutfem
