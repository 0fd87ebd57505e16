#pragma once

// Lagrange spaces of order p on active meshes. Basis functions are stored as
// monomial coefficients in cell-local lattice coordinates (xi, eta) in the
// unit square, which gives exact derivatives of any order.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mesh.hpp"

namespace cutfem {

constexpr int kMaxOrder = 5;

class RefBasis {
 public:
  RefBasis(ElementFamily family, int p, int sub);

  [[nodiscard]] int order() const { return p_; }
  [[nodiscard]] int size() const { return static_cast<int>(nodes_.size()); }
  /// Node k sits at lattice offset (a, b) / p inside the unit square.
  [[nodiscard]] const std::vector<std::array<int, 2>>& nodes() const { return nodes_; }
  /// d^dx/dxi^dx d^dy/deta^dy of every basis function at (xi, eta).
  void eval(double xi, double eta, int dx, int dy, std::span<double> out) const;
  [[nodiscard]] Eigen::VectorXd eval(double xi, double eta, int dx = 0, int dy = 0) const;
  /// l-th directional derivative along unit lattice-frame direction n,
  /// sum_k binom(l,k) n_x^k n_y^(l-k) d^l/dxi^k deta^(l-k).
  void directional(double xi, double eta, const Vec2& n, int l, std::span<double> out) const;

 private:
  int p_;
  std::vector<std::array<int, 2>> nodes_;
  Eigen::MatrixXd coef_;  // (p+1)^2 monomials xi^a eta^b (row a*(p+1)+b) x basis
};

/// Lagrange nodes of a (sub)cell in lattice offsets (a, b) with 0 <= a, b <= p.
std::vector<std::array<int, 2>> lagrange_nodes(ElementFamily family, int p, int sub);

/// Values, gradients and Hessians of the basis at a physical point of a cell.
struct BasisPoint {
  Eigen::VectorXd value;
  Eigen::MatrixXd grad;  // 2 x n physical gradients
  Eigen::MatrixXd hess;  // 3 x n physical (xx, xy, yy), only when requested
};

class FESpace {
 public:
  FESpace(const ActiveMesh& mesh, int p);

  [[nodiscard]] const ActiveMesh& mesh() const { return *mesh_; }
  [[nodiscard]] int order() const { return p_; }
  [[nodiscard]] ElementFamily family() const { return mesh_->background().family; }
  [[nodiscard]] int num_nodes() const { return static_cast<int>(positions_.size()); }
  [[nodiscard]] int num_dofs() const { return 2 * num_nodes(); }
  [[nodiscard]] const RefBasis& basis(int cell) const;
  [[nodiscard]] int nodes_per_cell() const { return basis(0).size(); }
  /// Global node ids of a cell in local basis order.
  [[nodiscard]] std::span<const int> cell_nodes(int cell) const;
  /// Global DOFs of a cell: component c of local node k is entry 2k + c.
  [[nodiscard]] std::vector<int> cell_dofs(int cell) const;
  [[nodiscard]] const Vec2& node_position(int node) const { return positions_[static_cast<std::size_t>(node)]; }
  [[nodiscard]] static int dof(int node, int component) { return 2 * node + component; }

  /// Basis data at cell-local point; `hessians` adds second derivatives.
  [[nodiscard]] BasisPoint evaluate(int cell, const Vec2& local, bool hessians = false) const;
  /// l-th physical derivative along physical unit normal n (given in the lattice frame).
  void normal_derivative(int cell, const Vec2& local, const Vec2& n_local, int l, std::span<double> out) const;

  /// Nodal interpolation of a vector field.
  template <class F>
  [[nodiscard]] Eigen::VectorXd interpolate(F&& field) const {
    Eigen::VectorXd v(num_dofs());
    for (int n = 0; n < num_nodes(); ++n) {
      const Vec2 u = field(node_position(n));
      v[dof(n, 0)] = u.x;
      v[dof(n, 1)] = u.y;
    }
    return v;
  }
  /// Evaluate a discrete field at a cell-local point.
  [[nodiscard]] Vec2 value(const Eigen::VectorXd& u, int cell, const Vec2& local) const;
  /// Physical displacement gradient [du_i/dx_j] at a cell-local point.
  [[nodiscard]] Eigen::Matrix2d gradient(const Eigen::VectorXd& u, int cell, const Vec2& local) const;

 private:
  const ActiveMesh* mesh_;
  int p_;
  std::vector<RefBasis> bases_;  // one per sub-cell type
  std::vector<int> cell_nodes_;
  std::vector<Vec2> positions_;
};

}  // namespace cutfem
