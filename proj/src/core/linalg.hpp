#pragma once

// Sparse symmetric solvers: diagonal scaling, SPD solves, shift-invert
// Lanczos for A u = lambda M u, rigid-body deflation and condition numbers.

#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forms.hpp"
#include "space.hpp"

namespace cutfem {

struct Scaled {
  Eigen::VectorXd d;  // D_ii = B_ii^(-1/2)
  SpMat matrix;       // D B D, unit diagonal
};
/// Throws Solver when a diagonal entry is not positive.
Scaled diag_scale(const SpMat& B);
/// D B D for a given scaling vector.
SpMat apply_scaling(const SpMat& B, const Eigen::VectorXd& d);

/// Relative residual ||B x - b|| / ||b|| (0 when b = 0 and B x = 0).
double relative_residual(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b);
/// b - B x accumulated in extended precision.
Eigen::VectorXd residual_extended(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b);
/// x^T (B x - b) accumulated in extended precision.
double energy_defect(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b);
/// Normwise backward error ||B x - b|| / (||B|| ||x|| + ||b||) in the max norm.
double backward_error(const SpMat& B, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// Sparse direct solver for symmetric matrices. Uses LDL^T and falls back to
/// LU when the factorization breaks down.
class SymmetricSolver {
 public:
  SymmetricSolver() = default;
  explicit SymmetricSolver(const SpMat& B) { factorize(B); }
  /// Returns false when neither factorization succeeds.
  bool factorize(const SpMat& B);
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  [[nodiscard]] bool ok() const { return ok_; }
  [[nodiscard]] bool used_lu() const { return use_lu_; }

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  Eigen::SparseLU<SpMat> lu_;
  bool ok_ = false;
  bool use_lu_ = false;
};

/// Solves B x = b with a direct factorization and a few steps of iterative
/// refinement. Accepts when the relative residual or the backward error is at
/// most `tol`; stiff fibres make the relative residual alone too strict.
/// Throws Solver on failure.
Eigen::VectorXd solve_spd(const SpMat& B, const Eigen::VectorXd& b, double tol = 1e-10);

enum class EigenMethod { Auto, Lanczos, Dense };

struct EigenOptions {
  int k = 6;
  std::optional<double> sigma;  // default: 0, or slightly negative with deflation
  double tol = 1e-8;
  EigenMethod method = EigenMethod::Auto;
  int max_basis = 400;
  unsigned seed = 12345;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  /// ||A u - lambda M u|| / (||A u|| + |lambda| ||M u||) per pair.
  Eigen::VectorXd residuals;
  int iterations = 0;
  double sigma = 0.0;
};

/// k eigenpairs of A u = lambda M u closest to (and above) the shift, in the
/// M-orthogonal complement of `deflation` when given.
EigenResult generalized_eigs(const SpMat& A, const SpMat& M, const EigenOptions& opt,
                             const Eigen::MatrixXd* deflation = nullptr);

/// Interpolants of (1,0), (0,1) and (-(y-yc), x-xc), M-orthonormalized.
Eigen::MatrixXd rigid_body_basis(const FESpace& space, const SpMat& M);

/// M-orthonormalizes the columns of Y (modified Gram-Schmidt, two passes).
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& Y, const SpMat& M);

/// Solves A x = f in the M-orthogonal complement of span(Y) for singular A
/// whose kernel is span(Y). The load is projected onto the compatible range.
Eigen::VectorXd solve_deflated(const SpMat& A, const SpMat& M, const Eigen::MatrixXd& Y, const Eigen::VectorXd& f,
                               double tol = 1e-10);

enum class ConditionMethod { Auto, Dense, Lanczos };

struct Condition {
  double lambda_min = 0.0;  // smallest |eigenvalue|
  double lambda_max = 0.0;  // largest |eigenvalue|
  double kappa = 0.0;    // +inf when singular
  double log10 = 0.0;    // >= 300 when singular
  bool singular = false;
  bool indefinite = false;  // eigenvalues of both signs
};
/// Spectral condition number max|lambda| / min|lambda| of a symmetric matrix.
/// Unstabilized Nitsche forms on sliver cuts are indefinite, so the definite
/// case is not assumed.
Condition condition_estimate(const SpMat& B, ConditionMethod method = ConditionMethod::Auto);

}  // namespace cutfem
