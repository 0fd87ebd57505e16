#include "interface.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cutfem {

std::vector<InterfacePiece> decompose_interface(const FESpace& s1, const FESpace& s2,
                                                const std::vector<InterfaceSegment>& segments) {
  std::vector<InterfacePiece> out;
  for (const auto& seg : segments) {
    const Vec2 d = seg.b - seg.a;
    const double len = norm(d);
    require(len > 0.0, ErrorCode::InvalidGeometry, "interface segment has zero length");
    const Vec2 n{d.y / len, -d.x / len};
    std::vector<double> params = lattice_crossings(s1.mesh().background(), seg.a, seg.b);
    const std::vector<double> more = lattice_crossings(s2.mesh().background(), seg.a, seg.b);
    params.insert(params.end(), more.begin(), more.end());
    const std::vector<double> cuts = merge_parameters(std::move(params));
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Vec2 pa = seg.a + cuts[k] * d;
      const Vec2 pb = seg.a + cuts[k + 1] * d;
      const Vec2 mid = 0.5 * (pa + pb);
      // Nudge off the interface so pieces lying on a face pick the cell on
      // the body side.
      const double nudge1 = 1e-7 * s1.mesh().h();
      const double nudge2 = 1e-7 * s2.mesh().h();
      const int c1 = s1.mesh().locate(mid - nudge1 * n);
      const int c2 = s2.mesh().locate(mid + nudge2 * n);
      require(c1 >= 0 && c2 >= 0, ErrorCode::Coverage, "interface is not covered by both active meshes");
      out.push_back({pa, pb, n, c1, c2});
    }
  }
  return out;
}

SpMat embed(const SpMat& block, int offset, int n_total) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(block.nonZeros()));
  for (int c = 0; c < block.outerSize(); ++c)
    for (SpMat::InnerIterator it(block, c); it; ++it)
      t.emplace_back(static_cast<int>(it.row()) + offset, static_cast<int>(it.col()) + offset, it.value());
  SpMat m(n_total, n_total);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

namespace {

std::vector<int> global_dofs(const BodyRef& b, int cell) {
  std::vector<int> d = b.space->cell_dofs(cell);
  for (int& v : d) v += b.offset;
  return d;
}

}  // namespace

SpMat assemble_interface_nitsche(const BodyRef& b1, const BodyRef& b2, const std::vector<InterfacePiece>& pieces,
                                 int n_total, const InterfaceOptions& opt) {
  const int p = std::max(b1.space->order(), b2.space->order());
  const double gamma = opt.gamma < 0 ? 1000.0 * p * p : opt.gamma;
  require(gamma > 0, ErrorCode::InvalidArgument, "interface penalty must be positive");
  const double h = std::min(b1.space->mesh().h(), b2.space->mesh().h());
  const double mu = std::max(b1.material.mu(), b2.material.mu());
  const double lam = std::max(b1.material.lambda(), b2.material.lambda());
  const auto& g = gauss_1d(2 * p + 1);

  Pattern pattern(n_total);
  std::vector<std::vector<int>> groups;
  for (const auto& pc : pieces) {
    auto dofs = global_dofs(b1, pc.cell1);
    const auto d2 = global_dofs(b2, pc.cell2);
    dofs.insert(dofs.end(), d2.begin(), d2.end());
    pattern.add_group(dofs);
    groups.push_back(std::move(dofs));
  }
  SpMat m = pattern.build();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const InterfacePiece& pc = pieces[k];
    const Vec2 n = pc.normal;
    Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
    if (opt.penalty == InterfacePenalty::Material)
      P << 2 * mu + lam * n.x * n.x, lam * n.x * n.y, lam * n.x * n.y, 2 * mu + lam * n.y * n.y;
    const double len = norm(pc.b - pc.a);
    const auto size = static_cast<Eigen::Index>(groups[k].size());
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(size, size);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const Vec2 x = pc.a + (0.5 * (g.x[q] + 1.0)) * (pc.b - pc.a);
      const double w = 0.5 * len * g.w[q];
      const BasisPoint e1 = b1.space->evaluate(pc.cell1, b1.space->mesh().to_local(pc.cell1, x));
      const BasisPoint e2 = b2.space->evaluate(pc.cell2, b2.space->mesh().to_local(pc.cell2, x));
      Eigen::MatrixXd jump(2, size);
      Eigen::MatrixXd avg(2, size);
      jump << vector_basis(e1.value), -vector_basis(e2.value);
      avg << 0.5 * traction_matrix(e1.grad, n, b1.material), 0.5 * traction_matrix(e2.grad, n, b2.material);
      local.noalias() -= w * (jump.transpose() * avg + avg.transpose() * jump);
      local.noalias() += (w * gamma / h) * (jump.transpose() * P * jump);
    }
    scatter(m, groups[k], local);
  }
  return m;
}

double interface_jump_l2(const BodyRef& b1, const BodyRef& b2, const std::vector<InterfacePiece>& pieces,
                         const Eigen::VectorXd& u) {
  const int p = std::max(b1.space->order(), b2.space->order());
  const auto& g = gauss_1d(2 * p + 1);
  const Eigen::VectorXd u1 = u.segment(b1.offset, b1.space->num_dofs());
  const Eigen::VectorXd u2 = u.segment(b2.offset, b2.space->num_dofs());
  double sum = 0.0;
  for (const auto& pc : pieces) {
    const double len = norm(pc.b - pc.a);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const Vec2 x = pc.a + (0.5 * (g.x[q] + 1.0)) * (pc.b - pc.a);
      const Vec2 j = b1.space->value(u1, pc.cell1, b1.space->mesh().to_local(pc.cell1, x)) -
                     b2.space->value(u2, pc.cell2, b2.space->mesh().to_local(pc.cell2, x));
      sum += 0.5 * len * g.w[q] * dot(j, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace cutfem
