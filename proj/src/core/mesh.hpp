#pragma once

// Structured background grids (rotated and shifted lattices) and the active
// mesh of cells that intersect the domain.

#include <array>
#include <cstdint>
#include <vector>

#include "geometry.hpp"

namespace cutfem {

enum class ElementFamily : std::uint8_t { Quad, Tri };

/// Lattice frame: a lattice point (s, t) sits at anchor + R(theta) * h * (s, t).
/// Cell (i, j) covers [i, i+1] x [j, j+1] in lattice coordinates; in the Tri
/// family it is split along the (0,0)-(1,1) diagonal into sub 0 (lower right)
/// and sub 1 (upper left).
struct BackgroundMesh {
  ElementFamily family = ElementFamily::Quad;
  double h = 1.0;
  double theta = 0.0;
  Vec2 anchor{};
  int i0 = 0;
  int j0 = 0;
  int nx = 0;
  int ny = 0;

  [[nodiscard]] int subs() const { return family == ElementFamily::Tri ? 2 : 1; }
  [[nodiscard]] std::size_t num_cells() const { return static_cast<std::size_t>(nx) * ny * subs(); }
  [[nodiscard]] Vec2 to_physical(const Vec2& lattice) const;
  [[nodiscard]] Vec2 to_lattice(const Vec2& physical) const;
  /// Rotates a lattice-frame direction into the physical frame.
  [[nodiscard]] Vec2 rotate(const Vec2& v) const;
  [[nodiscard]] Vec2 rotate_back(const Vec2& v) const;
  [[nodiscard]] std::size_t cell_id(int i, int j, int sub) const;
  /// Physical vertices of a cell, counter-clockwise.
  [[nodiscard]] std::vector<Vec2> cell_vertices(int i, int j, int sub) const;
  /// Cell-local lattice vertices of a sub-cell (offsets within the unit square).
  static std::vector<Vec2> local_vertices(ElementFamily family, int sub);
  [[nodiscard]] double cell_area() const { return family == ElementFamily::Tri ? 0.5 * h * h : h * h; }
};

/// Grid of the lattice (h, theta, anchor) just large enough to cover `box`.
BackgroundMesh build_background(ElementFamily family, const BBox& box, double h, double theta = 0.0,
                                Vec2 anchor = {});
/// Explicit nx x ny grid starting at lattice cell (i0, j0).
BackgroundMesh build_background_grid(ElementFamily family, int i0, int j0, int nx, int ny, double h,
                                     double theta = 0.0, Vec2 anchor = {});
/// Throws Coverage unless every boundary vertex lies in the grid.
void check_coverage(const BackgroundMesh& bg, const BoundaryRep& rep);

/// Axis-aligned grid on a rectangle where the outermost rows and columns of
/// cells have only a fraction delta of their width inside. The mesh size is
/// adjusted so that an integer number of cells fits; see `h` of the result.
BackgroundMesh make_sliver_background(ElementFamily family, const BoundaryRep& rep, double h, double delta);

/// Parameters t in (0, 1) where a + t (b - a) crosses a lattice line (cell
/// edges, plus diagonals for Tri). `on_face` is set when the segment runs
/// along a lattice line.
std::vector<double> lattice_crossings(const BackgroundMesh& bg, const Vec2& a, const Vec2& b, bool* on_face = nullptr);
/// Sorts parameters, adds 0 and 1 and merges values closer than 1e-10.
std::vector<double> merge_parameters(std::vector<double> params);

struct ActiveCell {
  int i = 0;
  int j = 0;
  int sub = 0;
  bool cut = false;
  bool touches_boundary = false;
  bool touches_dirichlet = false;
  /// K ∩ Ω in physical coordinates. Left empty for full cells without boundary
  /// segments; such cells are integrated with tensor rules.
  CutRegion region;
};

/// Interior face between two active cells. The normal points from `left` into
/// `right`.
struct Face {
  int left = -1;
  int right = -1;
  Vec2 a;  // physical endpoints
  Vec2 b;
  Vec2 normal;        // physical unit normal
  Vec2 local_normal;  // same normal in the lattice frame
  bool stabilized = false;
  bool dirichlet = false;
};

class ActiveMesh {
 public:
  ActiveMesh(const BackgroundMesh& bg, const BoundaryRep& rep);

  [[nodiscard]] const BackgroundMesh& background() const { return bg_; }
  [[nodiscard]] const BoundaryRep& boundary() const { return rep_; }
  [[nodiscard]] double h() const { return bg_.h; }
  [[nodiscard]] const std::vector<ActiveCell>& cells() const { return cells_; }
  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  [[nodiscard]] std::vector<int> stabilized_faces() const;
  [[nodiscard]] std::vector<int> dirichlet_faces() const;
  [[nodiscard]] std::vector<int> neumann_faces() const;
  /// Active index of background cell (i, j, sub), or -1.
  [[nodiscard]] int find(int i, int j, int sub) const;
  /// Active cell containing a physical point (closed cells; ties go to the
  /// first candidate), or -1.
  [[nodiscard]] int locate(const Vec2& p) const;
  [[nodiscard]] std::vector<Vec2> vertices(int cell) const;
  /// Cell-local lattice coordinates (in the unit square of cell (i, j)).
  [[nodiscard]] Vec2 to_local(int cell, const Vec2& physical) const;
  [[nodiscard]] Vec2 to_physical(int cell, const Vec2& local) const;
  [[nodiscard]] std::size_t num_cut() const;
  /// Area of Ω ∩ N_h(Ω) summed over cells.
  [[nodiscard]] double area() const;

 private:
  BackgroundMesh bg_;
  BoundaryRep rep_;
  std::vector<ActiveCell> cells_;
  std::vector<Face> faces_;
  std::vector<int> lookup_;
};

}  // namespace cutfem
