#pragma once

// Bilinear and linear forms of the stabilized Nitsche method for linear
// elasticity, assembled into sparse matrices over an FESpace.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "quadrature.hpp"
#include "space.hpp"

namespace cutfem {

using SpMat = Eigen::SparseMatrix<double>;
using VectorField = std::function<Vec2(const Vec2&)>;
/// Traction as a function of position and outward unit normal.
using TractionField = std::function<Vec2(const Vec2&, const Vec2&)>;

struct Material {
  double E = 200e9;
  double nu = 0.3;
  double rho = 7850.0;

  /// Plane strain Lamé parameters.
  [[nodiscard]] double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  [[nodiscard]] double mu() const { return E / (2.0 * (1.0 + nu)); }
  void validate() const;
};

enum class GhostVariant { Uniform, Split };
enum class FaceSet { All, DirichletOnly, NeumannOnly };

struct Stabilization {
  double gamma_m = 0.0;
  double gamma_a = 0.0;
  double beta = 0.0;  // Nitsche penalty, also called gamma_D
  GhostVariant variant = GhostVariant::Uniform;
  bool ghost = true;  // false drops every ghost-penalty term

  /// gamma_D = 1000 p^2, gamma_m = 1e-4 rho, gamma_a = 1e-4 (2 mu + lambda).
  static Stabilization defaults(const Material& m, int p);
};

/// Sparsity pattern accumulated from groups of mutually coupled DOFs.
class Pattern {
 public:
  explicit Pattern(int n) : cols_(static_cast<std::size_t>(n)) {}
  void add_group(std::span<const int> dofs);
  [[nodiscard]] SpMat build() const;

 private:
  mutable std::vector<std::vector<int>> cols_;
};

/// Adds dense element blocks into a matrix whose pattern already holds them.
void scatter(SpMat& m, std::span<const int> dofs, const Eigen::MatrixXd& local);

/// Pattern of the bulk system: element couplings plus both sides of every
/// stabilized face.
SpMat bulk_pattern(const FESpace& space);

/// Per-cell quadrature (volume degree 2p, boundary degree `boundary_degree`).
struct CellRules {
  std::vector<CellRule> cells;
  int q_volume = 0;
  int q_boundary = 0;
};
/// Default degrees: volume 2p; boundary 4p for Quad (a tensor polynomial of
/// degree p restricted to a slanted line has degree 2p), 2p for Tri.
CellRules build_cell_rules(const FESpace& space, int q_volume = -1, int q_boundary = -1);

SpMat assemble_mass(const FESpace& space, const CellRules& rules, double rho);
/// sum_F sum_{l=1..p} h^(2l+1) ([D^l_n v], [D^l_n w])_F over the chosen faces.
SpMat assemble_ghost_penalty(const FESpace& space, FaceSet which);
/// j_h(v, v) evaluated face by face as a sum of squared jumps, free of the
/// cancellation in v^T J v.
double ghost_penalty_value(const FESpace& space, const Eigen::VectorXd& v, FaceSet which = FaceSet::All);
SpMat assemble_elastic(const FESpace& space, const CellRules& rules, const Material& mat);
/// Dirichlet boundary terms of the Nitsche form: symmetric consistency terms
/// and the penalty beta h^-1 b_h.
SpMat assemble_nitsche_boundary(const FESpace& space, const CellRules& rules, const Material& mat, double beta);

struct LoadData {
  VectorField f;    // body force
  TractionField g_n;  // traction on the Neumann boundary
  VectorField g_d;  // displacement on the Dirichlet boundary
};
Eigen::VectorXd assemble_load(const FESpace& space, const CellRules& rules, const Material& mat, double beta,
                              const LoadData& data);

/// Stabilized operators over one space.
struct System {
  SpMat M;    // plain mass, density weighted
  SpMat a;    // plain elastic form
  SpMat J;    // ghost penalty over all stabilized faces
  SpMat Mh;   // M + gamma_m J
  SpMat Ah;   // a_h plus Nitsche boundary terms
  Eigen::VectorXd L;
};

/// Assembles every operator. Domains without Dirichlet edges get no Nitsche terms.
System assemble_system(const FESpace& space, const CellRules& rules, const Material& mat, const Stabilization& stab,
                       const LoadData& data);
/// a_h = a + gamma_a h^-2 J (Uniform) or a + gamma_a (J_N + h^-2 J_D) (Split).
SpMat stabilized_stiffness(const FESpace& space, const SpMat& a, const Stabilization& stab);

/// Elastic energy u^T a u, i.e. the integral of sigma(u) : eps(u).
double energy(const SpMat& a, const Eigen::VectorXd& u);

/// L2 norm of (u_h - exact) over the domain.
double l2_error(const FESpace& space, const CellRules& rules, const Eigen::VectorXd& u, const VectorField& exact);
double l2_norm(const FESpace& space, const CellRules& rules, const Eigen::VectorXd& u);

/// Stress at a cell-local point; returns (sxx, syy, sxy).
Eigen::Vector3d stress(const FESpace& space, const Material& mat, const Eigen::VectorXd& u, int cell, const Vec2& local);
/// Plane strain von Mises stress, with szz = nu (sxx + syy).
double von_mises(const Eigen::Vector3d& s, double nu);

/// Plane strain constitutive matrix in Voigt order (xx, yy, xy).
Eigen::Matrix3d constitutive(const Material& mat);
/// Voigt strain-displacement matrix (3 x 2n) from physical gradients (2 x n).
Eigen::MatrixXd strain_matrix(const Eigen::MatrixXd& grad);
/// Traction operator (2 x 2n): column 2k + c holds sigma(phi_k e_c) n.
Eigen::MatrixXd traction_matrix(const Eigen::MatrixXd& grad, const Vec2& n, const Material& mat);
/// Vector-valued basis (2 x 2n) with phi_k e_c in column 2k + c.
Eigen::MatrixXd vector_basis(const Eigen::VectorXd& phi);

}  // namespace cutfem
