#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "scenarios.hpp"

using namespace cutfem;

TEST(Scenarios, FitRateOfPowerLaw) {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 2.5));
  const RateFit f = fit_rate(h, e, 3);
  EXPECT_NEAR(f.rate, 2.5, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
}

TEST(Scenarios, ManufacturedConvergesAtOptimalRate) {
  ConvergenceOptions o;
  o.p = 1;
  o.theta = 0.3;
  o.anchor = {0.013, 0.007};
  const std::vector<double> hs{1.0 / 4, 1.0 / 8, 1.0 / 16};
  const auto recs = manufactured_convergence(hs, o);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_TRUE(std::isnan(recs[0].rate));
  EXPECT_GT(recs[2].rate, 1.7);
  EXPECT_LT(recs[2].l2_error, recs[1].l2_error);
  EXPECT_LT(recs[2].energy_error, recs[1].energy_error);
}

TEST(Scenarios, StaticFrequencyPointIsTheStaticSolve) {
  const Model model(clamped_beam_domain(), GridSpec{ElementFamily::Quad, 0.1, 0.1, {}}, 1, Material{});
  const System sys = model.assemble(gravity_load(Material{}));
  const Eigen::VectorXd u0 = frequency_solve(sys, 0.0);
  const Eigen::VectorXd us = solve_spd(sys.Ah, sys.L);
  EXPECT_EQ((u0 - us).cwiseAbs().maxCoeff(), 0.0);
  const std::vector<double> omegas{0.0, 10.0};
  const auto sweep = frequency_sweep(sys, omegas);
  ASSERT_TRUE(sweep[0].ok);
  EXPECT_EQ(sweep[0].energy, energy(sys.a, us));
  // Below the first resonance the response grows with omega.
  EXPECT_GT(sweep[1].energy, sweep[0].energy);
}

TEST(Scenarios, SweepPeaksAreInteriorMaxima) {
  std::vector<SweepRecord> s;
  for (double e : {1.0, 3.0, 2.0, 2.5, 5.0}) s.push_back({static_cast<double>(s.size()), e, true, false});
  EXPECT_EQ(sweep_peaks(s), (std::vector<double>{1.0}));
}

TEST(Scenarios, TwoGridImprovesTheCoarseEigenvalue) {
  EXPECT_EQ(refinement_ratio(0.1, 0.1 / 3), 3);
  EXPECT_THROW(refinement_ratio(0.1, 0.03), Error);
  TwoGridOptions o;
  o.p = 1;
  o.H = 0.1;
  o.refine = 2;
  o.theta = 0.1;
  const TwoGridResult r = two_grid_eigen(clamped_beam_domain(), o);
  ASSERT_TRUE(std::isfinite(r.lambda_direct));
  EXPECT_GT(r.fine_dofs, r.coarse_dofs);
  EXPECT_LT(std::abs(r.lambda_h - r.lambda_direct), 0.25 * std::abs(r.lambda_H - r.lambda_direct));
}

TEST(Scenarios, FreeBeamSeparatesRigidModes) {
  const FreeBeamResult r = free_beam_eigen(GridSpec{ElementFamily::Quad, 0.3 / 4, 0.2, {}}, 2);
  ASSERT_EQ(r.rigid.size(), 3u);
  ASSERT_GE(r.flexible.size(), 6u);
  for (double q : r.rigid) EXPECT_LT(std::abs(q), 1e-6 * r.flexible[0]);
  for (std::size_t k = 1; k < r.flexible.size(); ++k) EXPECT_GE(r.flexible[k], r.flexible[k - 1]);
  EXPECT_EQ(r.sixth_with_rigid, r.flexible[2]);
  EXPECT_EQ(r.sixth_flexible, r.flexible[5]);
}

TEST(Scenarios, SpinningRingIsBalanced) {
  const RingResult r = ring_centrifugal({}, GridSpec{ElementFamily::Quad, 0.1, 0.2, {}}, 2, 100.0);
  EXPECT_GT(r.mean_radial, 0.0);
  EXPECT_LT(r.variation, 0.05);
}
