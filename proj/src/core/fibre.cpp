#include "fibre.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace cutfem {

Vec2 FibreSpec::tangent() const {
  const Vec2 d = b - a;
  return (1.0 / norm(d)) * d;
}

void FibreSpec::validate() const {
  require(std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(b.x) && std::isfinite(b.y),
          ErrorCode::InvalidArgument, "fibre endpoints must be finite");
  require(norm(b - a) > 0.0, ErrorCode::InvalidArgument, "fibre has zero length");
  require(thickness > 0.0 && std::isfinite(thickness), ErrorCode::InvalidArgument, "fibre thickness must be positive");
  require(modulus > 0.0 && std::isfinite(modulus), ErrorCode::InvalidArgument, "fibre modulus must be positive");
}

FibreMesh decompose_fibre(const ActiveMesh& mesh, const FibreSpec& fibre) {
  fibre.validate();
  bool on_face = false;
  std::vector<double> params = lattice_crossings(mesh.background(), fibre.a, fibre.b, &on_face);
  require(!on_face, ErrorCode::Unsupported, "fibre runs along an element face");
  const std::vector<double> cuts = merge_parameters(std::move(params));

  FibreMesh fm;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Vec2 pa = fibre.a + cuts[k] * (fibre.b - fibre.a);
    const Vec2 pb = fibre.a + cuts[k + 1] * (fibre.b - fibre.a);
    const int cell = mesh.locate(0.5 * (pa + pb));
    require(cell >= 0, ErrorCode::Coverage, "fibre leaves the active mesh");
    fm.pieces.push_back({cell, pa, pb});
  }
  for (std::size_t k = 0; k + 1 < fm.pieces.size(); ++k)
    fm.points.push_back({fm.pieces[k].b, fm.pieces[k].cell, fm.pieces[k + 1].cell});
  return fm;
}

namespace {

// Per-DOF rows along the fibre: d_t(v.t), d_t(v.n) and d_tt(v.n).
struct FibreRows {
  Eigen::RowVectorXd axial;
  Eigen::RowVectorXd slope;
  Eigen::RowVectorXd curvature;
};

FibreRows fibre_rows(const FESpace& space, int cell, const Vec2& x, const Vec2& t, const Vec2& n, bool hessians) {
  const BasisPoint bp = space.evaluate(cell, space.mesh().to_local(cell, x), hessians);
  const auto nb = bp.value.size();
  FibreRows r;
  r.axial.resize(2 * nb);
  r.slope.resize(2 * nb);
  if (hessians) r.curvature.resize(2 * nb);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const double dt = t.x * bp.grad(0, k) + t.y * bp.grad(1, k);
    r.axial[2 * k] = t.x * dt;
    r.axial[2 * k + 1] = t.y * dt;
    r.slope[2 * k] = n.x * dt;
    r.slope[2 * k + 1] = n.y * dt;
    if (hessians) {
      const double dtt = t.x * t.x * bp.hess(0, k) + 2 * t.x * t.y * bp.hess(1, k) + t.y * t.y * bp.hess(2, k);
      r.curvature[2 * k] = n.x * dtt;
      r.curvature[2 * k + 1] = n.y * dtt;
    }
  }
  return r;
}

int beam_order_check(const FESpace& space) {
  require(space.order() >= 2, ErrorCode::InvalidArgument, "beam fibres need elements of order p >= 2");
  return space.order();
}

// Integrates rows^T rows * coefficient along every piece.
template <class Row>
SpMat line_matrix(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm, double coefficient, bool hessians,
                  Row&& row) {
  const auto& g = gauss_1d(2 * space.order() + 1);
  const Vec2 t = fibre.tangent();
  const Vec2 n = fibre.normal();
  Pattern pattern(space.num_dofs());
  for (const auto& piece : fm.pieces) pattern.add_group(space.cell_dofs(piece.cell));
  SpMat m = pattern.build();
  for (const auto& piece : fm.pieces) {
    const double len = norm(piece.b - piece.a);
    const auto dofs = space.cell_dofs(piece.cell);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()),
                                                  static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const Vec2 x = piece.a + (0.5 * (g.x[q] + 1.0)) * (piece.b - piece.a);
      const FibreRows r = fibre_rows(space, piece.cell, x, t, n, hessians);
      const Eigen::RowVectorXd& v = row(r);
      local.noalias() += (coefficient * 0.5 * len * g.w[q]) * v.transpose() * v;
    }
    scatter(m, dofs, local);
  }
  return m;
}

}  // namespace

SpMat assemble_truss(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm) {
  return line_matrix(space, fibre, fm, fibre.modulus * fibre.area(), false,
                     [](const FibreRows& r) -> const Eigen::RowVectorXd& { return r.axial; });
}

SpMat assemble_beam_bending(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm) {
  beam_order_check(space);
  return line_matrix(space, fibre, fm, fibre.modulus * fibre.inertia(), true,
                     [](const FibreRows& r) -> const Eigen::RowVectorXd& { return r.curvature; });
}

SpMat assemble_beam_points(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm) {
  const int p = beam_order_check(space);
  const double beta = fibre.beta_b < 0 ? 10.0 * p * p : fibre.beta_b;
  const double ei = fibre.modulus * fibre.inertia();
  const Vec2 t = fibre.tangent();
  const Vec2 n = fibre.normal();
  Pattern pattern(space.num_dofs());
  std::vector<std::vector<int>> groups;
  for (const auto& pt : fm.points) {
    auto dofs = space.cell_dofs(pt.left);
    const auto right = space.cell_dofs(pt.right);
    dofs.insert(dofs.end(), right.begin(), right.end());
    pattern.add_group(dofs);
    groups.push_back(std::move(dofs));
  }
  SpMat m = pattern.build();
  for (std::size_t k = 0; k < fm.points.size(); ++k) {
    const FibrePoint& pt = fm.points[k];
    const FibreRows l = fibre_rows(space, pt.left, pt.x, t, n, true);
    const FibreRows r = fibre_rows(space, pt.right, pt.x, t, n, true);
    const Eigen::Index nl = l.slope.size();
    Eigen::RowVectorXd jump(nl + r.slope.size());
    Eigen::RowVectorXd avg(jump.size());
    jump << -l.slope, r.slope;
    avg << 0.5 * l.curvature, 0.5 * r.curvature;
    // Integrating E I u'' v'' by parts piecewise leaves <E I u''> [v'] at
    // each crossing, with [v'] taken ahead minus behind along t.
    const Eigen::MatrixXd local = ei * (avg.transpose() * jump + jump.transpose() * avg) +
                                  (beta * ei / space.mesh().h()) * jump.transpose() * jump;
    scatter(m, groups[k], local);
  }
  return m;
}

SpMat assemble_beam(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm) {
  return assemble_beam_bending(space, fibre, fm) + assemble_beam_points(space, fibre, fm);
}

SpMat assemble_fibre(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm) {
  SpMat m(space.num_dofs(), space.num_dofs());
  if (fibre.truss) m += assemble_truss(space, fibre, fm);
  if (fibre.beam) m += assemble_beam(space, fibre, fm);
  return m;
}

Eigen::VectorXd fibre_load(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm, const VectorField& f) {
  const auto& g = gauss_1d(2 * space.order() + 1);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.num_dofs());
  for (const auto& piece : fm.pieces) {
    const double len = norm(piece.b - piece.a);
    const auto nodes = space.cell_nodes(piece.cell);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const Vec2 x = piece.a + (0.5 * (g.x[q] + 1.0)) * (piece.b - piece.a);
      const Vec2 local = space.mesh().to_local(piece.cell, x);
      const Eigen::VectorXd phi = space.basis(piece.cell).eval(local.x, local.y);
      const Vec2 fx = (fibre.area() * 0.5 * len * g.w[q]) * f(x);
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        load[FESpace::dof(nodes[k], 0)] += phi[static_cast<Eigen::Index>(k)] * fx.x;
        load[FESpace::dof(nodes[k], 1)] += phi[static_cast<Eigen::Index>(k)] * fx.y;
      }
    }
  }
  return load;
}

std::vector<PointJump> beam_point_values(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm,
                                         const Eigen::VectorXd& u) {
  const double ei = fibre.modulus * fibre.inertia();
  const Vec2 t = fibre.tangent();
  const Vec2 n = fibre.normal();
  auto local_u = [&](int cell) {
    const auto dofs = space.cell_dofs(cell);
    Eigen::VectorXd v(static_cast<Eigen::Index>(dofs.size()));
    for (std::size_t k = 0; k < dofs.size(); ++k) v[static_cast<Eigen::Index>(k)] = u[dofs[k]];
    return v;
  };
  std::vector<PointJump> out;
  for (const auto& pt : fm.points) {
    const FibreRows l = fibre_rows(space, pt.left, pt.x, t, n, true);
    const FibreRows r = fibre_rows(space, pt.right, pt.x, t, n, true);
    const Eigen::VectorXd ul = local_u(pt.left);
    const Eigen::VectorXd ur = local_u(pt.right);
    out.push_back({r.slope.dot(ur) - l.slope.dot(ul), 0.5 * ei * (l.curvature.dot(ul) + r.curvature.dot(ur))});
  }
  return out;
}

}  // namespace cutfem
