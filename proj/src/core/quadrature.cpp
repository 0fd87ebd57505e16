#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

#include "error.hpp"

namespace cutfem {

double QuadRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

namespace {

Gauss1D compute_gauss(int n) {
  Gauss1D g;
  g.x.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    g.x[lo] = -x;
    g.x[hi] = x;
    g.w[lo] = w;
    g.w[hi] = w;
  }
  if (n % 2 == 1) g.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return g;
}

}  // namespace

const Gauss1D& gauss_1d(int n) {
  require(n >= 1 && n <= 20, ErrorCode::InvalidArgument, "Gauss rule size must be in 1..20");
  static std::array<Gauss1D, 21> table;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int k = 1; k <= 20; ++k) table[static_cast<std::size_t>(k)] = compute_gauss(k);
  });
  return table[static_cast<std::size_t>(n)];
}

QuadRule cut_cell_rule(const CutRegion& region, int q, MomentMode mode) {
  require(!region.empty(), ErrorCode::InvalidArgument, "cut_cell_rule needs a nonempty region");
  require(q >= 0, ErrorCode::InvalidArgument, "quadrature degree must be nonnegative");
  for (const auto& loop : region.loops) {
    require(!loop.empty() && norm(loop.back().b - loop.front().a) <= 1e-12 * (1.0 + norm(loop.front().a)) &&
                [&] {
                  for (std::size_t k = 0; k + 1 < loop.size(); ++k)
                    if (!(loop[k].b == loop[k + 1].a)) return false;
                  return true;
                }(),
            ErrorCode::InvalidGeometry, "cut region loop is open");
  }
  // F(x, y) = int_{x0}^{x} f(s, y) ds turns the area integral into
  // sum over segments of int F n_x ds, with n_x ds = dy along the loop.
  double x0 = 1e300;
  for (const auto& loop : region.loops)
    for (const auto& s : loop) x0 = std::min(x0, s.a.x);
  const int nt = mode == MomentMode::Tensor ? q + 1 : (q + 3) / 2;
  const int nu = (q + 2) / 2;
  const Gauss1D& gt = gauss_1d(std::max(1, nt));
  const Gauss1D& gu = gauss_1d(std::max(1, nu));
  QuadRule rule;
  for (const auto& loop : region.loops) {
    for (const auto& s : loop) {
      const double dy = s.b.y - s.a.y;
      if (dy == 0.0) continue;
      for (std::size_t a = 0; a < gt.x.size(); ++a) {
        const double t = 0.5 * (gt.x[a] + 1.0);
        const Vec2 p = s.a + t * (s.b - s.a);
        const double span = p.x - x0;
        if (span == 0.0) continue;
        for (std::size_t b = 0; b < gu.x.size(); ++b) {
          const double u = 0.5 * (gu.x[b] + 1.0);
          rule.points.push_back({x0 + u * span, p.y});
          rule.weights.push_back(0.25 * gt.w[a] * gu.w[b] * span * dy);
        }
      }
    }
  }
  return rule;
}

QuadRule boundary_rule(std::span<const Segment> segments, int q, std::size_t* skipped) {
  require(q >= 0, ErrorCode::InvalidArgument, "quadrature degree must be nonnegative");
  const Gauss1D& g = gauss_1d(q / 2 + 1);
  QuadRule rule;
  for (const auto& s : segments) {
    const Vec2 d = s.b - s.a;
    const double len = norm(d);
    if (len == 0.0) {
      if (skipped) ++*skipped;
      continue;
    }
    const Vec2 n{d.y / len, -d.x / len};
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      rule.points.push_back(s.a + (0.5 * (g.x[k] + 1.0)) * d);
      rule.weights.push_back(0.5 * g.w[k] * len);
      rule.normals.push_back(n);
      rule.kinds.push_back(s.kind);
    }
  }
  return rule;
}

QuadRule unit_square_rule(int q) {
  const Gauss1D& g = gauss_1d(q / 2 + 1);
  QuadRule rule;
  for (std::size_t b = 0; b < g.x.size(); ++b) {
    for (std::size_t a = 0; a < g.x.size(); ++a) {
      rule.points.push_back({0.5 * (g.x[a] + 1.0), 0.5 * (g.x[b] + 1.0)});
      rule.weights.push_back(0.25 * g.w[a] * g.w[b]);
    }
  }
  return rule;
}

namespace {

QuadRule unit_triangle_rule(int sub, int q) {
  // Collapsed (Duffy) Gauss rule on the reference sub-triangle of the unit square.
  const Gauss1D& g = gauss_1d(q / 2 + 2);
  QuadRule rule;
  for (std::size_t a = 0; a < g.x.size(); ++a) {
    for (std::size_t b = 0; b < g.x.size(); ++b) {
      const double u = 0.5 * (g.x[a] + 1.0);
      const double v = 0.5 * (g.x[b] + 1.0);
      const double w = 0.25 * g.w[a] * g.w[b] * u;
      // sub 0: {eta <= xi}, points (u, u v); sub 1: {xi <= eta}, points (u v, u).
      rule.points.push_back(sub == 0 ? Vec2{u, u * v} : Vec2{u * v, u});
      rule.weights.push_back(w);
    }
  }
  return rule;
}

}  // namespace

CellRule cell_rule(const ActiveMesh& mesh, int cell, int q_volume, int q_boundary) {
  const ActiveCell& c = mesh.cells()[static_cast<std::size_t>(cell)];
  const BackgroundMesh& bg = mesh.background();
  const double h2 = bg.h * bg.h;
  CellRule out;
  if (!c.cut) {
    out.volume = bg.family == ElementFamily::Quad ? unit_square_rule(q_volume) : unit_triangle_rule(c.sub, q_volume);
    for (double& w : out.volume.weights) w *= h2;
  } else {
    CutRegion local = c.region;
    for (auto& loop : local.loops) {
      for (auto& s : loop) {
        s.a = mesh.to_local(cell, s.a);
        s.b = mesh.to_local(cell, s.b);
      }
      for (std::size_t k = 0; k < loop.size(); ++k) loop[k].b = loop[(k + 1) % loop.size()].a;
    }
    out.volume = cut_cell_rule(local, q_volume,
                               bg.family == ElementFamily::Quad ? MomentMode::Tensor : MomentMode::Total);
    for (double& w : out.volume.weights) w *= h2;
  }
  const auto segs = c.region.domain_segments();
  if (!segs.empty()) {
    out.boundary = boundary_rule(segs, q_boundary);
    for (auto& p : out.boundary.points) p = mesh.to_local(cell, p);
  }
  return out;
}

}  // namespace cutfem
