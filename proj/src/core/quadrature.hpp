#pragma once

// Gauss rules, divergence-theorem rules on cut regions, and segment rules.

#include <span>
#include <vector>

#include "geometry.hpp"
#include "mesh.hpp"

namespace cutfem {

struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  /// Outward unit normals, only filled by boundary rules.
  std::vector<Vec2> normals;
  /// Boundary tag per point, only filled by boundary rules.
  std::vector<SegmentKind> kinds;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] double weight_sum() const;
};

struct Gauss1D {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule, 1 <= n <= 20. Exact for degree 2n-1.
const Gauss1D& gauss_1d(int n);

enum class MomentMode { Tensor, Total };

/// Rule on a region bounded by closed loops. Tensor: exact for x^a y^b with
/// a, b <= q. Total: exact for a + b <= q. Points and weights live in the
/// coordinates of the region.
QuadRule cut_cell_rule(const CutRegion& region, int q, MomentMode mode);

/// Gauss rule along each segment, exact for degree q. Normals are the right
/// normals of the segments, i.e. outward for regions on their left.
/// Zero-length segments are skipped and counted in `skipped`.
QuadRule boundary_rule(std::span<const Segment> segments, int q, std::size_t* skipped = nullptr);

/// Tensor Gauss rule on the unit square, exact for degree q in each variable.
QuadRule unit_square_rule(int q);

/// Element quadrature in cell-local lattice coordinates. Weights are physical
/// (area or length), normals are physical.
struct CellRule {
  QuadRule volume;
  QuadRule boundary;
};

/// Volume and domain-boundary rules for one active cell. The volume rule is
/// exact for polynomials of the element space degree q in local coordinates
/// (tensor degree for Quad, total degree for Tri).
CellRule cell_rule(const ActiveMesh& mesh, int cell, int q_volume, int q_boundary);

}  // namespace cutfem
