#include "space.hpp"

#include <cmath>

#include "error.hpp"

namespace cutfem {

namespace {

double falling(int a, int k) {
  double r = 1.0;
  for (int m = 0; m < k; ++m) r *= a - m;
  return r;
}

// d^k/dx^k x^a for a = 0..p.
void power_derivs(double x, int p, int k, double* out) {
  for (int a = 0; a <= p; ++a) out[a] = a < k ? 0.0 : falling(a, k) * std::pow(x, a - k);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int m = 1; m <= k; ++m) r = r * (n - k + m) / m;
  return r;
}

}  // namespace

std::vector<std::array<int, 2>> lagrange_nodes(ElementFamily family, int p, int sub) {
  std::vector<std::array<int, 2>> nodes;
  for (int b = 0; b <= p; ++b) {
    for (int a = 0; a <= p; ++a) {
      if (family == ElementFamily::Tri && (sub == 0 ? b > a : a > b)) continue;
      nodes.push_back({a, b});
    }
  }
  return nodes;
}

RefBasis::RefBasis(ElementFamily family, int p, int sub) : p_(p) {
  require(p >= 1 && p <= kMaxOrder, ErrorCode::InvalidArgument, "element order must be in 1..5");
  nodes_ = lagrange_nodes(family, p, sub);
  std::vector<int> monomials;
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= p; ++b)
      if (family == ElementFamily::Quad || a + b <= p) monomials.push_back(a * (p + 1) + b);
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd vander(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = static_cast<double>(nodes_[static_cast<std::size_t>(k)][0]) / p;
    const double y = static_cast<double>(nodes_[static_cast<std::size_t>(k)][1]) / p;
    for (Eigen::Index m = 0; m < n; ++m) {
      const int mono = monomials[static_cast<std::size_t>(m)];
      vander(k, m) = std::pow(x, mono / (p + 1)) * std::pow(y, mono % (p + 1));
    }
  }
  const Eigen::MatrixXd inv = vander.fullPivLu().inverse();
  coef_ = Eigen::MatrixXd::Zero((p + 1) * (p + 1), n);
  for (Eigen::Index m = 0; m < n; ++m) coef_.row(monomials[static_cast<std::size_t>(m)]) = inv.row(m);
}

void RefBasis::eval(double xi, double eta, int dx, int dy, std::span<double> out) const {
  double px[kMaxOrder + 1];
  double py[kMaxOrder + 1];
  power_derivs(xi, p_, dx, px);
  power_derivs(eta, p_, dy, py);
  const int n = size();
  for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = 0.0;
  for (int a = 0; a <= p_; ++a) {
    if (px[a] == 0.0) continue;
    for (int b = 0; b <= p_; ++b) {
      const double m = px[a] * py[b];
      if (m == 0.0) continue;
      const auto row = coef_.row(a * (p_ + 1) + b);
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += m * row(j);
    }
  }
}

Eigen::VectorXd RefBasis::eval(double xi, double eta, int dx, int dy) const {
  Eigen::VectorXd v(size());
  eval(xi, eta, dx, dy, {v.data(), static_cast<std::size_t>(v.size())});
  return v;
}

void RefBasis::directional(double xi, double eta, const Vec2& n, int l, std::span<double> out) const {
  const int nb = size();
  std::vector<double> tmp(static_cast<std::size_t>(nb));
  for (int j = 0; j < nb; ++j) out[static_cast<std::size_t>(j)] = 0.0;
  for (int k = 0; k <= l; ++k) {
    const double c = binomial(l, k) * std::pow(n.x, k) * std::pow(n.y, l - k);
    if (c == 0.0) continue;
    eval(xi, eta, k, l - k, tmp);
    for (int j = 0; j < nb; ++j) out[static_cast<std::size_t>(j)] += c * tmp[static_cast<std::size_t>(j)];
  }
}

FESpace::FESpace(const ActiveMesh& mesh, int p) : mesh_(&mesh), p_(p) {
  require(p >= 1 && p <= kMaxOrder, ErrorCode::InvalidArgument, "element order must be in 1..5");
  const BackgroundMesh& bg = mesh.background();
  for (int sub = 0; sub < bg.subs(); ++sub) bases_.emplace_back(bg.family, p, sub);

  const int lx = p * bg.nx + 1;
  const int ly = p * bg.ny + 1;
  std::vector<int> lattice(static_cast<std::size_t>(lx) * ly, -1);
  auto slot = [&](const ActiveCell& c, const std::array<int, 2>& ab) {
    const int x = p * (c.i - bg.i0) + ab[0];
    const int y = p * (c.j - bg.j0) + ab[1];
    return static_cast<std::size_t>(y) * lx + x;
  };
  for (const auto& c : mesh.cells())
    for (const auto& ab : bases_[static_cast<std::size_t>(c.sub)].nodes()) lattice[slot(c, ab)] = 0;
  // Number nodes in lattice order for a banded pattern.
  int count = 0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    if (lattice[k] < 0) continue;
    lattice[k] = count++;
    const double sx = static_cast<double>(static_cast<int>(k % lx)) / p + bg.i0;
    const double sy = static_cast<double>(static_cast<int>(k / lx)) / p + bg.j0;
    positions_.push_back(bg.to_physical({sx, sy}));
  }
  const int nb = bases_[0].size();
  cell_nodes_.reserve(mesh.cells().size() * static_cast<std::size_t>(nb));
  for (const auto& c : mesh.cells())
    for (const auto& ab : bases_[static_cast<std::size_t>(c.sub)].nodes()) cell_nodes_.push_back(lattice[slot(c, ab)]);
}

const RefBasis& FESpace::basis(int cell) const {
  return bases_[static_cast<std::size_t>(mesh_->cells()[static_cast<std::size_t>(cell)].sub)];
}

std::span<const int> FESpace::cell_nodes(int cell) const {
  const auto nb = static_cast<std::size_t>(bases_[0].size());
  return {cell_nodes_.data() + static_cast<std::size_t>(cell) * nb, nb};
}

std::vector<int> FESpace::cell_dofs(int cell) const {
  const auto nodes = cell_nodes(cell);
  std::vector<int> d(2 * nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    d[2 * k] = dof(nodes[k], 0);
    d[2 * k + 1] = dof(nodes[k], 1);
  }
  return d;
}

BasisPoint FESpace::evaluate(int cell, const Vec2& local, bool hessians) const {
  const RefBasis& rb = basis(cell);
  const BackgroundMesh& bg = mesh_->background();
  const double c = std::cos(bg.theta);
  const double s = std::sin(bg.theta);
  const double ih = 1.0 / bg.h;
  BasisPoint bp;
  bp.value = rb.eval(local.x, local.y);
  const Eigen::VectorXd gx = rb.eval(local.x, local.y, 1, 0);
  const Eigen::VectorXd gy = rb.eval(local.x, local.y, 0, 1);
  bp.grad.resize(2, rb.size());
  bp.grad.row(0) = ih * (c * gx - s * gy).transpose();
  bp.grad.row(1) = ih * (s * gx + c * gy).transpose();
  if (hessians) {
    const Eigen::VectorXd hxx = rb.eval(local.x, local.y, 2, 0);
    const Eigen::VectorXd hxy = rb.eval(local.x, local.y, 1, 1);
    const Eigen::VectorXd hyy = rb.eval(local.x, local.y, 0, 2);
    // H = R H_loc R^T / h^2
    const double ih2 = ih * ih;
    bp.hess.resize(3, rb.size());
    bp.hess.row(0) = ih2 * (c * c * hxx - 2 * c * s * hxy + s * s * hyy).transpose();
    bp.hess.row(1) = ih2 * (c * s * hxx + (c * c - s * s) * hxy - c * s * hyy).transpose();
    bp.hess.row(2) = ih2 * (s * s * hxx + 2 * c * s * hxy + c * c * hyy).transpose();
  }
  return bp;
}

void FESpace::normal_derivative(int cell, const Vec2& local, const Vec2& n_local, int l, std::span<double> out) const {
  basis(cell).directional(local.x, local.y, n_local, l, out);
  const double scale = std::pow(1.0 / mesh_->h(), l);
  for (double& v : out) v *= scale;
}

Vec2 FESpace::value(const Eigen::VectorXd& u, int cell, const Vec2& local) const {
  const Eigen::VectorXd phi = basis(cell).eval(local.x, local.y);
  const auto nodes = cell_nodes(cell);
  Vec2 r{};
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    r.x += phi[static_cast<Eigen::Index>(k)] * u[dof(nodes[k], 0)];
    r.y += phi[static_cast<Eigen::Index>(k)] * u[dof(nodes[k], 1)];
  }
  return r;
}

Eigen::Matrix2d FESpace::gradient(const Eigen::VectorXd& u, int cell, const Vec2& local) const {
  const BasisPoint bp = evaluate(cell, local);
  const auto nodes = cell_nodes(cell);
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (int i = 0; i < 2; ++i) {
      const double ui = u[dof(nodes[k], i)];
      g(i, 0) += ui * bp.grad(0, static_cast<Eigen::Index>(k));
      g(i, 1) += ui * bp.grad(1, static_cast<Eigen::Index>(k));
    }
  }
  return g;
}

}  // namespace cutfem
