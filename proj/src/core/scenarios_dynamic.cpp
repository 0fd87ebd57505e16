#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "scenarios.hpp"

namespace cutfem {

LoadData gravity_load(const Material& mat, double g) {
  LoadData d;
  const double w = mat.rho * g;
  d.f = [w](const Vec2&) { return Vec2{0.0, -w}; };
  return d;
}

Eigen::VectorXd frequency_solve(const System& sys, double omega, bool* near_resonance) {
  if (near_resonance) *near_resonance = false;
  if (omega == 0.0) return solve_spd(sys.Ah, sys.L);
  const SpMat B = sys.Ah - (omega * omega) * sys.Mh;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(B);
  if (lu.info() != Eigen::Success) {
    if (near_resonance) *near_resonance = true;
    fail(ErrorCode::Solver, "frequency system is singular");
  }
  Eigen::VectorXd x = lu.solve(sys.L);
  for (int it = 0; it < 3 && relative_residual(B, x, sys.L) > 1e-12; ++it) x += lu.solve(sys.L - B * x);
  const double res = relative_residual(B, x, sys.L);
  if (!std::isfinite(res) || res > 1e-8) {
    if (near_resonance) *near_resonance = true;
    if (!std::isfinite(res)) fail(ErrorCode::Solver, "frequency solve diverged");
  }
  return x;
}

std::vector<SweepRecord> frequency_sweep(const System& sys, std::span<const double> omegas) {
  std::vector<SweepRecord> out;
  for (double w : omegas) {
    SweepRecord r;
    r.omega = w;
    try {
      const Eigen::VectorXd u = frequency_solve(sys, w, &r.near_resonance);
      r.energy = energy(sys.a, u);
      r.ok = std::isfinite(r.energy);
    } catch (const Error&) {
      r.ok = false;
      r.near_resonance = true;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<double> sweep_peaks(std::span<const SweepRecord> sweep) {
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < sweep.size(); ++k) {
    const auto& a = sweep[k - 1];
    const auto& b = sweep[k];
    const auto& c = sweep[k + 1];
    if (!b.ok) {
      peaks.push_back(b.omega);  // singular point: resonance hit exactly
      continue;
    }
    if ((!a.ok || b.energy > a.energy) && (!c.ok || b.energy > c.energy)) peaks.push_back(b.omega);
  }
  return peaks;
}

BoundaryRep free_beam_domain() {
  RectangleSpec r;
  r.lo = {0.0, 0.0};
  r.hi = {3.0, 0.3};
  r.dirichlet = {false, false, false, false};
  return make_rectangle(r);
}

BoundaryRep clamped_beam_domain() {
  RectangleSpec r;
  r.lo = {0.0, 0.0};
  r.hi = {3.0, 0.3};
  r.dirichlet = {false, false, false, true};
  return make_rectangle(r);
}

FreeBeamResult free_beam_eigen(const GridSpec& grid, int p, const Material& mat, int k) {
  const Model model(free_beam_domain(), grid, p, mat);
  const System sys = model.assemble();
  const Eigen::MatrixXd Y = rigid_body_basis(model.space(), sys.Mh);
  EigenOptions opt;
  opt.k = std::max(k, 6);
  const EigenResult er = generalized_eigs(sys.Ah, sys.Mh, opt, &Y);
  FreeBeamResult r;
  r.dofs = model.num_dofs();
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd y = Y.col(c);
    r.rigid.push_back(y.dot(sys.Ah * y) / y.dot(sys.Mh * y));
  }
  for (Eigen::Index i = 0; i < er.values.size(); ++i) {
    r.flexible.push_back(er.values[i]);
    r.residuals.push_back(er.residuals[i]);
  }
  r.sixth_with_rigid = r.flexible[2];
  r.sixth_flexible = r.flexible[5];
  return r;
}

int refinement_ratio(double H, double h) {
  require(H > 0 && h > 0 && h <= H * (1 + 1e-12), ErrorCode::InvalidArgument, "two-grid needs 0 < h <= H");
  const double r = H / h;
  const double n = std::round(r);
  require(std::abs(r - n) <= 1e-9 * r, ErrorCode::InvalidArgument, "H must be an integer multiple of h");
  return static_cast<int>(n);
}

TwoGridResult two_grid_eigen(const BoundaryRep& rep, const TwoGridOptions& opt) {
  require(opt.refine >= 1, ErrorCode::InvalidArgument, "refinement ratio must be at least 1");
  require(opt.mode >= 1, ErrorCode::InvalidArgument, "mode index is 1-based");
  const BackgroundMesh coarse_bg = build_background(opt.family, rep.bbox(), opt.H, opt.theta, opt.anchor);
  const int r = opt.refine;
  const BackgroundMesh fine_bg = build_background_grid(opt.family, coarse_bg.i0 * r, coarse_bg.j0 * r, coarse_bg.nx * r,
                                                       coarse_bg.ny * r, opt.H / r, opt.theta, opt.anchor);
  const Model coarse(rep, coarse_bg, opt.p, opt.material);
  const Model fine(rep, fine_bg, opt.p, opt.material);
  const System cs = coarse.assemble();
  const System fs = fine.assemble();

  EigenOptions eo;
  eo.k = opt.mode;
  Eigen::MatrixXd Yc;
  Eigen::MatrixXd Yf;
  if (opt.free) {
    Yc = rigid_body_basis(coarse.space(), cs.Mh);
    Yf = rigid_body_basis(fine.space(), fs.Mh);
  }
  const EigenResult ce = generalized_eigs(cs.Ah, cs.Mh, eo, opt.free ? &Yc : nullptr);
  TwoGridResult res;
  res.coarse_dofs = coarse.num_dofs();
  res.fine_dofs = fine.num_dofs();
  const int idx = opt.mode - 1;
  res.lambda_H = ce.values[idx];
  const Eigen::VectorXd uH = ce.vectors.col(idx);

  // Coarse eigenvector evaluated at the fine nodes (exact, the fine space
  // contains the coarse one).
  const FESpace& cspace = coarse.space();
  const Eigen::VectorXd uH_fine = fine.space().interpolate([&](const Vec2& x) {
    const int cell = coarse.mesh().locate(x);
    require(cell >= 0, ErrorCode::Coverage, "fine node outside the coarse active mesh");
    return cspace.value(uH, cell, coarse.mesh().to_local(cell, x));
  });
  const Eigen::VectorXd rhs = res.lambda_H * (fs.Mh * uH_fine);
  const Eigen::VectorXd uh = opt.free ? solve_deflated(fs.Ah, fs.Mh, Yf, rhs) : solve_spd(fs.Ah, rhs);
  const double a = uh.dot(fs.Ah * uh);
  const double m = uh.dot(fs.Mh * uh);
  res.lambda_h = opt.literal ? std::sqrt(a) / std::sqrt(m) : a / m;

  if (opt.direct) {
    const EigenResult fe = generalized_eigs(fs.Ah, fs.Mh, eo, opt.free ? &Yf : nullptr);
    res.lambda_direct = fe.values[idx];
  }
  return res;
}

}  // namespace cutfem
