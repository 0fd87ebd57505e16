#pragma once

// Nitsche coupling of bodies discretized on separate background grids. The
// unknowns of all bodies are stacked; each body owns a contiguous DOF block.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "forms.hpp"

namespace cutfem {

struct BodyRef {
  const FESpace* space = nullptr;
  Material material;
  int offset = 0;  // first global DOF of the body
};

/// Straight interface piece oriented like a boundary edge of the first body
/// (first body on the left), so n = right normal points from body 1 into body 2.
struct InterfaceSegment {
  Vec2 a;
  Vec2 b;
};

enum class InterfacePenalty {
  Plain,     // gamma h^-1 ([u], [v])
  Material,  // gamma h^-1 (2 mu [u].[v] + lambda ([u].n)([v].n)), largest moduli of the two sides
};

struct InterfaceOptions {
  double gamma = -1;  // < 0 selects 1000 p^2 with the larger order
  InterfacePenalty penalty = InterfacePenalty::Material;
};

/// Interface piece between crossings of both grids, with the host cells.
struct InterfacePiece {
  Vec2 a;
  Vec2 b;
  Vec2 normal;
  int cell1 = -1;
  int cell2 = -1;
};

/// Splits the interface at the lattice lines of both grids. Throws Coverage
/// when a piece is not covered by an active cell on both sides.
std::vector<InterfacePiece> decompose_interface(const FESpace& s1, const FESpace& s2,
                                                const std::vector<InterfaceSegment>& segments);

/// -(<sigma(u) n>, [v]) - ([u], <sigma(v) n>) + penalty, with [v] = v1 - v2
/// and <.> the plain average, as an n_total x n_total matrix.
SpMat assemble_interface_nitsche(const BodyRef& b1, const BodyRef& b2, const std::vector<InterfacePiece>& pieces,
                                 int n_total, const InterfaceOptions& opt = {});

/// L2 norm of the displacement jump over the interface.
double interface_jump_l2(const BodyRef& b1, const BodyRef& b2, const std::vector<InterfacePiece>& pieces,
                         const Eigen::VectorXd& u);

/// Block-diagonal embedding of a body matrix into the stacked system.
SpMat embed(const SpMat& block, int offset, int n_total);

}  // namespace cutfem
