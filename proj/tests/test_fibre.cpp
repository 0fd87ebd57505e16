#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "fibre.hpp"
#include "scenarios.hpp"

using namespace cutfem;

namespace {

struct Block {
  BoundaryRep rep;
  std::unique_ptr<ActiveMesh> mesh;
  std::unique_ptr<FESpace> space;
  Block(int p, double h, double theta) {
    RectangleSpec rs;
    rs.hi = {4.0, 1.0};
    rs.dirichlet = {false, false, false, true};
    rep = make_rectangle(rs);
    mesh = std::make_unique<ActiveMesh>(build_background(ElementFamily::Quad, rep.bbox(), h, theta, {0.01, 0.02}), rep);
    space = std::make_unique<FESpace>(*mesh, p);
  }
};

// Slanted fibre with both ends inside cells.
FibreSpec slanted(bool beam) {
  FibreSpec f{{0.137, 0.311}, {3.71, 0.623}, 0.1, 1e4, true, beam};
  return f;
}

// Coordinate along the fibre.
double arc(const FibreSpec& f, const Vec2& x) { return dot(x - f.a, f.tangent()); }

}  // namespace

TEST(Fibre, DecompositionCoversTheFibre) {
  const Block s(2, 0.1, 0.3);
  const FibreSpec f = slanted(true);
  const FibreMesh fm = decompose_fibre(*s.mesh, f);
  double len = 0.0;
  for (const auto& piece : fm.pieces) {
    len += norm(piece.b - piece.a);
    EXPECT_GE(piece.cell, 0);
  }
  EXPECT_NEAR(len, f.length(), 1e-13);
  EXPECT_EQ(fm.points.size() + 1, fm.pieces.size());
  for (std::size_t k = 0; k + 1 < fm.pieces.size(); ++k) EXPECT_NEAR(norm(fm.pieces[k].b - fm.pieces[k + 1].a), 0.0, 1e-14);
  // A fibre along a lattice line is rejected.
  const Block aligned(2, 0.25, 0.0);
  FibreSpec on_face{{0.5 + 0.01, 0.5 + 0.02}, {3.0 + 0.01, 0.5 + 0.02}, 0.1, 1e4, true, false};
  EXPECT_THROW(decompose_fibre(*aligned.mesh, on_face), Error);
}

TEST(Fibre, TrussEnergyOfUniformStretch) {
  const Block s(1, 0.1, 0.2);
  const FibreSpec f = slanted(false);
  const FibreMesh fm = decompose_fibre(*s.mesh, f);
  const SpMat B = assemble_truss(*s.space, f, fm);
  const double eps = 1e-3;
  const Eigen::VectorXd u = s.space->interpolate([&](const Vec2& x) { return (eps * arc(f, x)) * f.tangent(); });
  EXPECT_NEAR(u.dot(B * u), f.modulus * f.area() * eps * eps * f.length(), 1e-12 * f.modulus * f.length() * eps * eps);
  // Transverse rigid translation: no axial strain.
  const Eigen::VectorXd t = s.space->interpolate([&](const Vec2&) { return f.normal(); });
  EXPECT_LE(std::abs(t.dot(B * t)), 1e-12 * f.modulus);
}

TEST(Fibre, BendingEnergyOfConstantCurvature) {
  for (int p : {2, 3}) {
    const Block s(p, 0.1, 0.2);
    FibreSpec f = slanted(true);
    f.beta_b = 0.0;
    const FibreMesh fm = decompose_fibre(*s.mesh, f);
    const SpMat C = assemble_beam(*s.space, f, fm);
    // u.n = s^2 / 2, so w'' = 1 and c(u, u) = E I L.
    const Eigen::VectorXd u = s.space->interpolate([&](const Vec2& x) {
      const double a = arc(f, x);
      return (0.5 * a * a) * f.normal();
    });
    const double ref = f.modulus * f.inertia() * f.length();
    EXPECT_NEAR(u.dot(C * u), ref, 1e-8 * ref) << "p=" << p;
    for (const auto& pj : beam_point_values(*s.space, f, fm, u)) {
      EXPECT_NEAR(pj.rotation_jump, 0.0, 1e-10);
      EXPECT_NEAR(pj.moment, f.modulus * f.inertia(), 1e-9 * f.modulus * f.inertia());
    }
  }
}

TEST(Fibre, JumpTermsVanishForLinearNormalDisplacement) {
  const Block s(2, 0.1, 0.2);
  const FibreSpec f = slanted(true);
  const FibreMesh fm = decompose_fibre(*s.mesh, f);
  const double p = 2, beta = 10 * p * p, ei = f.modulus * f.inertia();
  const Eigen::VectorXd u = s.space->interpolate([&](const Vec2& x) {
    return (0.3 + 0.7 * arc(f, x)) * f.normal() + (0.2 * x.y) * f.tangent();
  });
  ASSERT_FALSE(fm.points.empty());
  // Sum of the crossing-point terms of c_h(u, u), evaluated pointwise.
  double terms = 0.0;
  for (const auto& pj : beam_point_values(*s.space, f, fm, u))
    terms += std::abs(2 * pj.moment * pj.rotation_jump) + beta * ei / 0.1 * pj.rotation_jump * pj.rotation_jump;
  EXPECT_LE(terms, 1e-18);
}

TEST(Fibre, ContinuousDiscontinuousGalerkinIsConsistent) {
  // For smooth u with u.n = s^3 / 6 and any v in the space, integration by
  // parts along the fibre gives
  //   c_h(u, v) = E I [ w''(L) v'(L) - w''(0) v'(0) - w''' (v(L) - v(0)) ],
  // with v = v.n and ' = d/ds. Only the consistent sign of the crossing
  // terms reproduces it.
  const Block s(3, 0.1, 0.2);
  FibreSpec f = slanted(true);
  const FibreMesh fm = decompose_fibre(*s.mesh, f);
  const SpMat C = assemble_beam(*s.space, f, fm);
  // The penalty multiplies rounding-level jumps of u by beta E I / h; the
  // identity is checked tightly without it.
  f.beta_b = 0.0;
  const SpMat C0 = assemble_beam(*s.space, f, fm);
  const Eigen::VectorXd u = s.space->interpolate([&](const Vec2& x) {
    const double a = arc(f, x);
    return (a * a * a / 6) * f.normal();
  });
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Vec2 t = f.tangent(), n = f.normal();
  const int ca = fm.pieces.front().cell, cb = fm.pieces.back().cell;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v(s.space->num_dofs());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = U(rng);
    auto vn = [&](int cell, const Vec2& x) { return dot(s.space->value(v, cell, s.mesh->to_local(cell, x)), n); };
    auto dvn = [&](int cell, const Vec2& x) {
      const Eigen::Matrix2d g = s.space->gradient(v, cell, s.mesh->to_local(cell, x));
      const Eigen::Vector2d gt = g * Eigen::Vector2d(t.x, t.y);
      return n.x * gt[0] + n.y * gt[1];
    };
    const double L = f.length(), ei = f.modulus * f.inertia();
    const double ref = ei * (L * dvn(cb, f.b) - 0.0 * dvn(ca, f.a) - (vn(cb, f.b) - vn(ca, f.a)));
    EXPECT_NEAR(u.dot(C0 * v), ref, 1e-8 * std::max(1.0, std::abs(ref))) << trial;
    EXPECT_NEAR(u.dot(C * v), ref, 1e-6 * std::max(1.0, std::abs(ref))) << trial;
  }
  EXPECT_LE((SpMat(C.transpose()) - C).norm(), 1e-12 * C.norm());
}

TEST(Fibre, BeamRequiresQuadraticElements) {
  const Block s(1, 0.1, 0.2);
  const FibreSpec f = slanted(true);
  const FibreMesh fm = decompose_fibre(*s.mesh, f);
  EXPECT_THROW(assemble_beam(*s.space, f, fm), Error);
}

TEST(Fibre, ReinforcementLowersCompliance) {
  FibreDemoOptions o;
  o.h = 1.0 / 8;
  o.fibre_load = false;
  const auto bulk = solve_fibre_config("bulk", {}, o);
  const auto trusses = solve_fibre_config("trusses", reference_trusses(), o);
  const auto beam = solve_fibre_config("beam", reference_beam(), o);
  EXPECT_LT(trusses.compliance, bulk.compliance);
  EXPECT_LT(beam.compliance, bulk.compliance);
  for (const auto& r : {bulk, trusses, beam}) EXPECT_LE(r.energy_balance, 1e-8);
}
