#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "space.hpp"

using namespace cutfem;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Space, LagrangeProperty) {
  for (auto fam : {ElementFamily::Quad, ElementFamily::Tri})
    for (int p = 1; p <= kMaxOrder; ++p)
      for (int sub = 0; sub < (fam == ElementFamily::Tri ? 2 : 1); ++sub) {
        const RefBasis b(fam, p, sub);
        // Monomial coefficients lose digits at the highest orders.
        const double tol = p <= 3 ? 1e-12 : 1e-9;
        const int expect = fam == ElementFamily::Quad ? (p + 1) * (p + 1) : (p + 1) * (p + 2) / 2;
        ASSERT_EQ(b.size(), expect);
        for (int j = 0; j < b.size(); ++j) {
          const auto& n = b.nodes()[static_cast<std::size_t>(j)];
          const Eigen::VectorXd v = b.eval(double(n[0]) / p, double(n[1]) / p);
          for (int k = 0; k < b.size(); ++k) EXPECT_NEAR(v[k], k == j ? 1.0 : 0.0, tol);
        }
        const Eigen::VectorXd s = b.eval(0.21, 0.13 + 0.5 * sub);
        EXPECT_NEAR(s.sum(), 1.0, tol);
        EXPECT_NEAR(b.eval(0.21, 0.3, 1, 0).sum(), 0.0, 100 * tol);
        EXPECT_NEAR(b.eval(0.21, 0.3, 0, 1).sum(), 0.0, 100 * tol);
      }
}

TEST(Space, DirectionalDerivativeMatchesFiniteDifference) {
  const RefBasis b(ElementFamily::Quad, 3, 0);
  const Vec2 n{0.6, 0.8};
  std::vector<double> d1(static_cast<std::size_t>(b.size())), d2(d1.size());
  b.directional(0.4, 0.3, n, 1, d1);
  b.directional(0.4, 0.3, n, 2, d2);
  const double e = 1e-4;
  const Eigen::VectorXd fp = b.eval(0.4 + e * n.x, 0.3 + e * n.y), fm = b.eval(0.4 - e * n.x, 0.3 - e * n.y);
  const Eigen::VectorXd f0 = b.eval(0.4, 0.3);
  for (int k = 0; k < b.size(); ++k) {
    EXPECT_NEAR(d1[static_cast<std::size_t>(k)], (fp[k] - fm[k]) / (2 * e), 1e-6);
    EXPECT_NEAR(d2[static_cast<std::size_t>(k)], (fp[k] - 2 * f0[k] + fm[k]) / (e * e), 1e-4);
  }
}

TEST(Space, ReproducesPolynomials) {
  const BoundaryRep rep = make_ring({});
  for (auto fam : {ElementFamily::Quad, ElementFamily::Tri})
    for (int p = 1; p <= 4; ++p) {
      const ActiveMesh mesh(build_background(fam, rep.bbox(), 0.2, kPi / 9, {0.03, 0.01}), rep);
      const FESpace space(mesh, p);
      // Total degree p in physical coordinates lies in both spaces.
      auto field = [p](const Vec2& x) { return Vec2{std::pow(x.x - 0.2 * x.y, p), std::pow(x.y + 0.1, p) - x.x}; };
      auto grad = [p](const Vec2& x) {
        Eigen::Matrix2d g;
        const double a = p * std::pow(x.x - 0.2 * x.y, p - 1);
        g << a, -0.2 * a, -1.0, p * std::pow(x.y + 0.1, p - 1);
        return g;
      };
      const Eigen::VectorXd u = space.interpolate(field);
      std::mt19937 rng(p);
      std::uniform_real_distribution<double> U(0.0, 1.0);
      for (int c = 0; c < static_cast<int>(mesh.cells().size()); c += 7) {
        Vec2 loc{U(rng), U(rng)};
        if (fam == ElementFamily::Tri) {
          // Stay in the sub-triangle: sub 0 below the diagonal, sub 1 above.
          if ((mesh.cells()[static_cast<std::size_t>(c)].sub == 0) != (loc.x > loc.y)) std::swap(loc.x, loc.y);
        }
        const Vec2 x = mesh.to_physical(c, loc);
        const Vec2 v = space.value(u, c, loc);
        EXPECT_NEAR(v.x, field(x).x, 1e-10);
        EXPECT_NEAR(v.y, field(x).y, 1e-10);
        EXPECT_LE((space.gradient(u, c, loc) - grad(x)).norm(), 1e-8);
      }
    }
}

TEST(Space, SharedNodesAreContinuous) {
  const BoundaryRep rep = make_rectangle({});
  const ActiveMesh mesh(build_background(ElementFamily::Quad, rep.bbox(), 0.25, 0.0), rep);
  const FESpace space(mesh, 2);
  // 4 x 4 cells of Q2: 9 x 9 nodes.
  EXPECT_EQ(space.num_nodes(), 81);
  EXPECT_EQ(space.num_dofs(), 162);
  for (int c = 0; c < static_cast<int>(mesh.cells().size()); ++c)
    for (int n : space.cell_nodes(c)) EXPECT_LT(n, space.num_nodes());
}
