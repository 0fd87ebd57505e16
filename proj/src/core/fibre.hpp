#pragma once

// Straight embedded fibres (trusses and Euler-Bernoulli beams) superimposed
// on the bulk displacement field. The beam uses C0 interior penalty terms at
// the points where the fibre crosses element faces.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forms.hpp"

namespace cutfem {

struct FibreSpec {
  Vec2 a;
  Vec2 b;
  double thickness = 0.1;
  double modulus = 1e4;
  bool truss = true;   // axial stiffness E A
  bool beam = false;   // bending stiffness E I with interior penalty terms
  double beta_b = -1;  // penalty at crossing points; < 0 selects 10 p^2

  [[nodiscard]] double area() const { return thickness; }
  [[nodiscard]] double inertia() const { return thickness * thickness * thickness / 12.0; }
  [[nodiscard]] double length() const { return norm(b - a); }
  [[nodiscard]] Vec2 tangent() const;
  /// Tangent rotated +90 degrees.
  [[nodiscard]] Vec2 normal() const { return left_normal(tangent()); }
  void validate() const;
};

/// Part of the fibre inside one active cell.
struct FibrePiece {
  int cell = -1;
  Vec2 a;
  Vec2 b;
};

/// Interior crossing point with the cells behind (left) and ahead (right)
/// along the tangent.
struct FibrePoint {
  Vec2 x;
  int left = -1;
  int right = -1;
};

struct FibreMesh {
  std::vector<FibrePiece> pieces;  // ordered along the tangent
  std::vector<FibrePoint> points;
};

/// Splits the fibre at every crossing with the lattice lines. Throws
/// Unsupported when the fibre runs along a face and Coverage when a piece
/// falls outside the active mesh.
FibreMesh decompose_fibre(const ActiveMesh& mesh, const FibreSpec& fibre);

/// b(v, w) = (E A d_t(v.t), d_t(w.t)) along the fibre.
SpMat assemble_truss(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm);
/// c(v, w) = (E I d_tt(v.n), d_tt(w.n)) along the fibre.
SpMat assemble_beam_bending(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm);
/// Crossing-point terms: consistency with the averaged moment and the
/// penalty beta_b E I / h on the jump of the rotation d_t(v.n).
SpMat assemble_beam_points(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm);
/// Bending plus crossing-point terms. Requires p >= 2.
SpMat assemble_beam(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm);

/// Truss and/or beam stiffness according to the fibre flags.
SpMat assemble_fibre(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm);

/// (A f, v) along the fibre.
Eigen::VectorXd fibre_load(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm, const VectorField& f);

/// Rotation jump [d_t(u.n)] and averaged moment <E I d_tt(u.n)> at every
/// crossing point.
struct PointJump {
  double rotation_jump = 0.0;
  double moment = 0.0;
};
std::vector<PointJump> beam_point_values(const FESpace& space, const FibreSpec& fibre, const FibreMesh& fm,
                                         const Eigen::VectorXd& u);

}  // namespace cutfem
