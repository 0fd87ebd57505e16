#include <cmath>
#include <numbers>

#include "error.hpp"
#include "scenarios.hpp"

namespace cutfem {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec2 Manufactured::displacement(const Vec2& x) const {
  return {-std::cos(kPi * x.x) * std::sin(kPi * x.y) / 10, std::sin(kPi * x.x / 7) * std::sin(kPi * x.y / 3) / 10};
}

Eigen::Matrix2d Manufactured::gradient(const Vec2& x) const {
  Eigen::Matrix2d g;
  g(0, 0) = kPi * std::sin(kPi * x.x) * std::sin(kPi * x.y) / 10;
  g(0, 1) = -kPi * std::cos(kPi * x.x) * std::cos(kPi * x.y) / 10;
  g(1, 0) = (kPi / 7) * std::cos(kPi * x.x / 7) * std::sin(kPi * x.y / 3) / 10;
  g(1, 1) = (kPi / 3) * std::sin(kPi * x.x / 7) * std::cos(kPi * x.y / 3) / 10;
  return g;
}

Vec2 Manufactured::body_force(const Vec2& p) const {
  // -div sigma = -mu lap u - (lambda + mu) grad div u.
  const double mu = material.mu();
  const double lam = material.lambda();
  const double x = p.x;
  const double y = p.y;
  const double lap1 = 2 * kPi * kPi * std::cos(kPi * x) * std::sin(kPi * y) / 10;
  const double lap2 = -((kPi / 7) * (kPi / 7) + (kPi / 3) * (kPi / 3)) * std::sin(kPi * x / 7) * std::sin(kPi * y / 3) / 10;
  const double ddiv_x =
      kPi * kPi * std::cos(kPi * x) * std::sin(kPi * y) / 10 + (kPi * kPi / 21) * std::cos(kPi * x / 7) * std::cos(kPi * y / 3) / 10;
  const double ddiv_y =
      kPi * kPi * std::sin(kPi * x) * std::cos(kPi * y) / 10 - (kPi / 3) * (kPi / 3) * std::sin(kPi * x / 7) * std::sin(kPi * y / 3) / 10;
  return {-mu * lap1 - (lam + mu) * ddiv_x, -mu * lap2 - (lam + mu) * ddiv_y};
}

Vec2 Manufactured::traction(const Vec2& x, const Vec2& n) const {
  const Eigen::Matrix2d g = gradient(x);
  const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
  const Eigen::Matrix2d s = 2 * material.mu() * eps + material.lambda() * eps.trace() * Eigen::Matrix2d::Identity();
  return {s(0, 0) * n.x + s(0, 1) * n.y, s(1, 0) * n.x + s(1, 1) * n.y};
}

LoadData Manufactured::load() const {
  return {[this](const Vec2& x) { return body_force(x); },
          [this](const Vec2& x, const Vec2& n) { return traction(x, n); },
          [this](const Vec2& x) { return displacement(x); }};
}

BoundaryRep manufactured_domain() { return make_rectangle({}); }

double energy_error(const FESpace& space, const CellRules& rules, const Material& mat, const Eigen::VectorXd& u,
                    const std::function<Eigen::Matrix2d(const Vec2&)>& exact_gradient) {
  const Eigen::Matrix3d D = constitutive(mat);
  const auto& mesh = space.mesh();
  double sum = 0.0;
  for (std::size_t c = 0; c < mesh.cells().size(); ++c) {
    const int ci = static_cast<int>(c);
    const QuadRule& q = rules.cells[c].volume;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const Eigen::Matrix2d e = space.gradient(u, ci, q.points[k]) - exact_gradient(mesh.to_physical(ci, q.points[k]));
      const Eigen::Vector3d v(e(0, 0), e(1, 1), e(0, 1) + e(1, 0));
      sum += q.weights[k] * v.dot(D * v);
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

ConvergenceRecord manufactured_static(double h, const ConvergenceOptions& opt) {
  Manufactured mf{opt.material};
  Stabilization stab = Stabilization::defaults(opt.material, opt.p);
  stab.variant = opt.variant;
  const Model model(manufactured_domain(), GridSpec{opt.family, h, opt.theta, opt.anchor}, opt.p, opt.material, stab);
  const System sys = model.assemble(mf.load());
  const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L);
  // Error integrals use a few extra orders for the transcendental solution.
  const CellRules err_rules = build_cell_rules(model.space(), 2 * opt.p + 4, 2 * opt.p);
  ConvergenceRecord r;
  r.h = h;
  r.p = opt.p;
  r.family = opt.family;
  r.theta = opt.theta;
  r.dofs = model.num_dofs();
  r.l2_error = l2_error(model.space(), err_rules, u, [&](const Vec2& x) { return mf.displacement(x); });
  r.energy_error = energy_error(model.space(), err_rules, opt.material, u,
                                [&](const Vec2& x) { return mf.gradient(x); });
  return r;
}

std::vector<ConvergenceRecord> manufactured_convergence(std::span<const double> hs, const ConvergenceOptions& opt) {
  std::vector<ConvergenceRecord> out;
  for (double h : hs) {
    ConvergenceRecord r = manufactured_static(h, opt);
    if (!out.empty()) r.rate = std::log(out.back().l2_error / r.l2_error) / std::log(out.back().h / r.h);
    out.push_back(r);
  }
  return out;
}

RateFit fit_rate(std::span<const double> x, std::span<const double> y, int last) {
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "rate fit needs matching arrays");
  const std::size_t n = std::min<std::size_t>(x.size(), static_cast<std::size_t>(std::max(last, 2)));
  RateFit fit;
  if (n < 2) return fit;
  const std::size_t s = x.size() - n;
  double mx = 0, my = 0;
  for (std::size_t i = s; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0;
  for (std::size_t i = s; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  fit.rate = sxy / sxx;
  double res = 0;
  for (std::size_t i = s; i < x.size(); ++i) {
    const double d = std::log(y[i]) - (my + fit.rate * (std::log(x[i]) - mx));
    res += d * d;
  }
  fit.residual = std::sqrt(res / static_cast<double>(n));
  return fit;
}

PatchResult patch_test(int p, ElementFamily family, double theta, double h) {
  const Material mat;
  const Eigen::Matrix2d g{{1e-3, -2e-3}, {0.5e-3, 1.5e-3}};
  auto exact = [&](const Vec2& x) {
    return Vec2{2e-3 + g(0, 0) * x.x + g(0, 1) * x.y, -1e-3 + g(1, 0) * x.x + g(1, 1) * x.y};
  };
  const Eigen::Matrix2d eps = 0.5 * (g + g.transpose());
  const Eigen::Matrix2d s = 2 * mat.mu() * eps + mat.lambda() * eps.trace() * Eigen::Matrix2d::Identity();
  LoadData data;
  data.g_d = exact;
  data.g_n = [s](const Vec2&, const Vec2& n) { return Vec2{s(0, 0) * n.x + s(0, 1) * n.y, s(1, 0) * n.x + s(1, 1) * n.y}; };
  const Model model(manufactured_domain(), GridSpec{family, h, theta, {0.013, 0.007}}, p, mat);
  const System sys = model.assemble(data);
  const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L, 1e-13);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.num_dofs());
  PatchResult r;
  r.relative_l2 = l2_error(model.space(), model.rules(), u, exact) / l2_error(model.space(), model.rules(), zero, exact);
  r.dofs = model.num_dofs();
  r.cut_cells = model.mesh().num_cut();
  return r;
}

ConditionRow condition_row(int p, const ConditionOptions& opt) {
  const BoundaryRep rep = manufactured_domain();
  BackgroundMesh bg;
  switch (opt.variant) {
    case MeshVariant::Fitted:
      bg = build_background(opt.family, rep.bbox(), opt.h, 0.0, rep.bbox().lo);
      break;
    case MeshVariant::Sliver:
      bg = make_sliver_background(opt.family, rep, opt.h, opt.delta);
      break;
    case MeshVariant::Rotated:
      bg = build_background(opt.family, rep.bbox(), opt.h, opt.theta, rep.bbox().lo);
      break;
  }
  const Model model(rep, bg, p, opt.material);
  const System sys = model.assemble();
  const SpMat plain_A = sys.a + assemble_nitsche_boundary(model.space(), model.rules(), opt.material,
                                                          model.stabilization().beta);
  ConditionRow row;
  row.p = p;
  row.h = bg.h;
  row.dofs = model.num_dofs();
  auto fill = [&](std::array<Condition, 4>& out, const SpMat& plain, const SpMat& stab) {
    for (auto& c : out) c.kappa = c.log10 = kNaN;
    if (opt.columns[0]) out[0] = condition_estimate(plain, opt.method);
    if (opt.columns[1]) out[1] = condition_estimate(diag_scale(plain).matrix, opt.method);
    if (opt.columns[2]) out[2] = condition_estimate(stab, opt.method);
    if (opt.columns[3]) out[3] = condition_estimate(diag_scale(stab).matrix, opt.method);
  };
  fill(row.A, plain_A, sys.Ah);
  fill(row.M, sys.M, sys.Mh);
  return row;
}

}  // namespace cutfem
