#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "quadrature.hpp"

using namespace cutfem;

namespace {

constexpr double kPi = std::numbers::pi;

// Oracle: fan triangulation of a convex polygon with collapsed tensor Gauss
// rules, exact far beyond the tested degrees.
double polygon_moment(const std::vector<Vec2>& poly, int a, int b) {
  const Gauss1D& g = gauss_1d(12);
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Vec2 p0 = poly[0], p1 = poly[k], p2 = poly[k + 1];
    const double jac = cross(p1 - p0, p2 - p0);
    for (std::size_t i = 0; i < g.x.size(); ++i)
      for (std::size_t j = 0; j < g.x.size(); ++j) {
        const double u = 0.5 * (g.x[i] + 1), v = 0.5 * (g.x[j] + 1);
        const double s = u, t = (1 - u) * v;
        const Vec2 x = p0 + s * (p1 - p0) + t * (p2 - p0);
        sum += 0.25 * g.w[i] * g.w[j] * (1 - u) * jac * std::pow(x.x, a) * std::pow(x.y, b);
      }
  }
  return sum;
}

// Unit square cut by the half plane n.x <= c, as a region and a polygon.
struct Cut {
  CutRegion region;
  std::vector<Vec2> polygon;
};
Cut cut_square(const Vec2& n, double c) {
  const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<Vec2> poly;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 p = sq[i], q = sq[(i + 1) % 4];
    const double fp = dot(n, p) - c, fq = dot(n, q) - c;
    if (fp <= 0) poly.push_back(p);
    if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) poly.push_back(p + (fp / (fp - fq)) * (q - p));
  }
  Cut out;
  out.polygon = poly;
  std::vector<Segment> loop;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    const bool on_line = std::abs(dot(n, p) - c) < 1e-14 && std::abs(dot(n, q) - c) < 1e-14;
    loop.push_back({p, q, on_line ? SegmentKind::DomainNeumann : SegmentKind::CellEdge});
  }
  out.region.loops.push_back(loop);
  return out;
}

}  // namespace

TEST(Quadrature, GaussExactness) {
  for (int n = 1; n <= 20; ++n) {
    const Gauss1D& g = gauss_1d(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * std::pow(g.x[i], d);
      EXPECT_NEAR(s, d % 2 ? 0.0 : 2.0 / (d + 1), 1e-14) << n << " " << d;
    }
  }
}

TEST(Quadrature, CutCellMonomialsRandomized) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double phi = 2 * kPi * U(rng);
    const Vec2 n{std::cos(phi), std::sin(phi)};
    const Vec2 x0{0.1 + 0.8 * U(rng), 0.1 + 0.8 * U(rng)};
    const Cut cut = cut_square(n, dot(n, x0));
    const int p = 1 + trial % 4;
    const QuadRule tensor = cut_cell_rule(cut.region, 2 * p, MomentMode::Tensor);
    const QuadRule total = cut_cell_rule(cut.region, 2 * p, MomentMode::Total);
    EXPECT_NEAR(tensor.weight_sum(), signed_area(cut.polygon), 1e-14);
    for (int a = 0; a <= 2 * p; ++a)
      for (int b = 0; b <= 2 * p; ++b) {
        const double exact = polygon_moment(cut.polygon, a, b);
        double s = 0.0;
        for (std::size_t i = 0; i < tensor.size(); ++i)
          s += tensor.weights[i] * std::pow(tensor.points[i].x, a) * std::pow(tensor.points[i].y, b);
        EXPECT_LE(std::abs(s - exact), 1e-12 * std::max(std::abs(exact), 1e-3)) << trial << " " << a << " " << b;
        if (a + b > 2 * p) continue;
        double t = 0.0;
        for (std::size_t i = 0; i < total.size(); ++i)
          t += total.weights[i] * std::pow(total.points[i].x, a) * std::pow(total.points[i].y, b);
        EXPECT_LE(std::abs(t - exact), 1e-12 * std::max(std::abs(exact), 1e-3));
      }
  }
}

TEST(Quadrature, BoundaryRuleOfClosedLoop) {
  const Cut cut = cut_square({0.6, 0.8}, 0.7);
  const auto& segs = cut.region.loops.front();
  const QuadRule r = boundary_rule(segs, 4);
  double len = 0.0;
  Vec2 nsum{};
  for (const auto& s : segs) len += s.length();
  for (std::size_t i = 0; i < r.size(); ++i) nsum += r.weights[i] * r.normals[i];
  EXPECT_NEAR(r.weight_sum(), len, 1e-14);
  EXPECT_NEAR(norm(nsum), 0.0, 1e-14);
  // Divergence theorem: int_K div(x, 0) = int_dK x n_x.
  double flux = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) flux += r.weights[i] * r.points[i].x * r.normals[i].x;
  EXPECT_NEAR(flux, signed_area(cut.polygon), 1e-14);
  std::size_t skipped = 0;
  const std::vector<Segment> zero{{{0.5, 0.5}, {0.5, 0.5}, SegmentKind::DomainNeumann}};
  EXPECT_EQ(boundary_rule(zero, 3, &skipped).size(), 0u);
  EXPECT_EQ(skipped, 1u);
}

TEST(Quadrature, UnitSquareRule) {
  const QuadRule r = unit_square_rule(5);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i].x, 5) * std::pow(r.points[i].y, 4);
  EXPECT_NEAR(s, 1.0 / 30, 1e-15);
}
