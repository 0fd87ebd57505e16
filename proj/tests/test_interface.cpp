#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "interface.hpp"
#include "scenarios.hpp"

using namespace cutfem;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Interface, GluedHalvesMatchSingleDomain) {
  for (int p : {1, 2}) {
    const GluedResult r = glued_manufactured(p, 1.0 / 16, kPi / 9);
    EXPECT_LE(r.glued_l2, 1.5 * r.single_l2) << "p=" << p;
    EXPECT_LE(r.jump_l2, r.glued_l2) << "p=" << p;
  }
  // The jump decreases under refinement.
  const double coarse = glued_manufactured(2, 1.0 / 8, kPi / 9).jump_l2;
  const double fine = glued_manufactured(2, 1.0 / 16, kPi / 9).jump_l2;
  EXPECT_LT(fine, 0.25 * coarse);
}

TEST(Interface, CouplingMatrixIsSymmetricAndKillsCommonRigidMotion) {
  RectangleSpec l, r;
  l.hi = {0.5, 1.0};
  r.lo = {0.5, 0.0};
  r.dirichlet = {false, false, false, false};
  const BoundaryRep left = make_rectangle(l), right = make_rectangle(r);
  const ActiveMesh m1(build_background(ElementFamily::Quad, left.bbox(), 0.1, 0.2, {}), left);
  const ActiveMesh m2(build_background(ElementFamily::Tri, right.bbox(), 0.07, -0.3, {0.01, 0.0}), right);
  const FESpace s1(m1, 2), s2(m2, 2);
  const auto pieces = decompose_interface(s1, s2, {{{0.5, 0.0}, {0.5, 1.0}}});
  double len = 0.0;
  for (const auto& pc : pieces) len += norm(pc.b - pc.a);
  EXPECT_NEAR(len, 1.0, 1e-13);
  const int n = s1.num_dofs() + s2.num_dofs();
  const Material mat;
  const BodyRef b1{&s1, mat, 0}, b2{&s2, mat, s1.num_dofs()};
  const SpMat K = assemble_interface_nitsche(b1, b2, pieces, n);
  EXPECT_LE((SpMat(K.transpose()) - K).norm(), 1e-12 * K.norm());
  auto rigid = [](const Vec2& x) { return Vec2{0.3 - 0.1 * x.y, -0.2 + 0.1 * x.x}; };
  Eigen::VectorXd u(n);
  u << s1.interpolate(rigid), s2.interpolate(rigid);
  EXPECT_LE((K * u).norm(), 1e-8 * K.norm() * u.norm());
  EXPECT_NEAR(interface_jump_l2(b1, b2, pieces, u), 0.0, 1e-13);
  // Opposite translations are penalized.
  Eigen::VectorXd w(n);
  w << s1.interpolate([](const Vec2&) { return Vec2{1.0, 0.0}; }), s2.interpolate([](const Vec2&) { return Vec2{-1.0, 0.0}; });
  EXPECT_NEAR(interface_jump_l2(b1, b2, pieces, w), 2.0, 1e-12);
  EXPECT_GT(w.dot(K * w), 0.0);
}

TEST(Interface, CompoundLShapeIsContinuous) {
  DrilledLOptions o;
  o.h = 0.2;
  const CompoundSolution sol = solve_compound(drilled_lshape_compound(o));
  for (int k = 0; k < 2; ++k) {
    const InterfaceReport r = interface_report(sol, k);
    EXPECT_LE(r.jump_l2, 1e-3 * r.trace_l2);
  }
}
