#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "error.hpp"
#include "linalg.hpp"
#include "model.hpp"

using namespace cutfem;

namespace {

// Banded random symmetric matrix with prescribed spectrum shift.
SpMat random_sym(int n, unsigned seed, double shift, double density = 0.05) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> P(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (P(rng) < density || j == i - 1) {
        const double v = U(rng);
        t.emplace_back(i, j, v);
        t.emplace_back(j, i, v);
      }
  SpMat B(n, n);
  B.setFromTriplets(t.begin(), t.end());
  // Gershgorin: diagonal dominance plus shift makes B SPD.
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < B.outerSize(); ++c)
    for (SpMat::InnerIterator it(B, c); it; ++it) rows[it.row()] += std::abs(it.value());
  for (int i = 0; i < n; ++i) B.coeffRef(i, i) = rows[i] + shift * (1.0 + P(rng));
  B.makeCompressed();
  return B;
}

}  // namespace

TEST(Linalg, SolveMatchesDense) {
  for (int n : {5, 60, 200}) {
    const SpMat B = random_sym(n, static_cast<unsigned>(n), 1e-3);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
    const Eigen::VectorXd x = solve_spd(B, b);
    const Eigen::VectorXd ref = Eigen::MatrixXd(B).ldlt().solve(b);
    EXPECT_LE((x - ref).norm(), 1e-8 * ref.norm());
    EXPECT_LE(relative_residual(B, x, b), 1e-12);
  }
  SpMat singular(3, 3);
  singular.insert(0, 0) = 1.0;
  EXPECT_THROW(solve_spd(singular, Eigen::VectorXd::Ones(3)), Error);
}

TEST(Linalg, ExtendedResidual) {
  const SpMat B = random_sym(50, 3, 1.0);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(50), b = B * x;
  EXPECT_LE(residual_extended(B, x, b).norm(), 1e-13 * b.norm());
  EXPECT_NEAR(energy_defect(B, x, Eigen::VectorXd::Zero(50)), x.dot(B * x), 1e-12 * x.dot(B * x));
}

TEST(Linalg, GeneralizedEigenvaluesMatchDense) {
  for (int n : {40, 120, 200}) {
    const SpMat A = random_sym(n, 7u + n, 0.1);
    const SpMat M = random_sym(n, 100u + n, 2.0, 0.02);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense{Eigen::MatrixXd(A), Eigen::MatrixXd(M)};
    for (auto method : {EigenMethod::Lanczos, EigenMethod::Dense}) {
      EigenOptions eo;
      eo.k = 6;
      eo.method = method;
      eo.tol = 1e-12;
      const EigenResult r = generalized_eigs(A, M, eo);
      for (int i = 0; i < 6; ++i) {
        const double ref = dense.eigenvalues()[i];
        EXPECT_LE(std::abs(r.values[i] - ref), 1e-8 * std::abs(ref)) << n << " " << i;
      }
      const Eigen::MatrixXd G = r.vectors.transpose() * (M * r.vectors);
      EXPECT_LE((G - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-8);
    }
  }
}

TEST(Linalg, ConditionMatchesDense) {
  for (int n : {50, 200}) {
    const SpMat B = random_sym(n, 31u + n, 1e-2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(B)};
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    const double ref = ev.maxCoeff() / ev.minCoeff();
    const Condition lz = condition_estimate(B, ConditionMethod::Lanczos);
    const Condition de = condition_estimate(B, ConditionMethod::Dense);
    EXPECT_NEAR(lz.kappa, ref, 0.01 * ref);
    EXPECT_NEAR(de.kappa, ref, 1e-8 * ref);
    EXPECT_FALSE(lz.indefinite);
  }
  // Indefinite: eigenvalues -2, 1, 4.
  SpMat D(3, 3);
  D.insert(0, 0) = -2.0;
  D.insert(1, 1) = 1.0;
  D.insert(2, 2) = 4.0;
  const Condition c = condition_estimate(D, ConditionMethod::Dense);
  EXPECT_NEAR(c.kappa, 4.0, 1e-14);
  EXPECT_TRUE(c.indefinite);
  SpMat S(2, 2);
  S.insert(0, 0) = 1.0;
  EXPECT_TRUE(condition_estimate(S, ConditionMethod::Dense).singular);
}

TEST(Linalg, DiagonalScaling) {
  const SpMat B = random_sym(30, 5, 1.0);
  const Scaled s = diag_scale(B);
  for (int i = 0; i < 30; ++i) EXPECT_NEAR(s.matrix.coeff(i, i), 1.0, 1e-15);
}

TEST(Linalg, RigidDeflationOnFreeBody) {
  const BoundaryRep rep = make_rectangle({.lo = {0, 0}, .hi = {1.0, 0.3}, .dirichlet = {false, false, false, false}});
  const Model model(rep, GridSpec{ElementFamily::Quad, 0.1, 0.2, {}}, 1, Material{});
  const System sys = model.assemble();
  const Eigen::MatrixXd Y = rigid_body_basis(model.space(), sys.Mh);
  EXPECT_LE((Y.transpose() * (sys.Mh * Y) - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LE((sys.Ah * Y).norm(), 1e-6 * sys.Ah.norm());
  // Self-equilibrated load: pull the ends apart.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model.num_dofs());
  for (int n = 0; n < model.space().num_nodes(); ++n) f[FESpace::dof(n, 0)] = model.space().node_position(n).x - 0.5;
  const Eigen::VectorXd u = solve_deflated(sys.Ah, sys.Mh, Y, f);
  EXPECT_LE((Y.transpose() * (sys.Mh * u)).norm(), 1e-10 * u.norm());
  const Eigen::VectorXd fc = f - sys.Mh * (Y * (Y.transpose() * f));
  EXPECT_LE((sys.Ah * u - fc).norm(), 1e-8 * fc.norm());
}
