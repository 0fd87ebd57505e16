#pragma once

// Piecewise-linear boundary representation of a 2D domain, point
// classification and clipping of convex cells against the domain.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cutfem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
/// Left-hand normal (rotated +90 degrees), not normalized.
constexpr Vec2 left_normal(const Vec2& d) { return {-d.y, d.x}; }

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

struct BBox {
  Vec2 lo{1e300, 1e300};
  Vec2 hi{-1e300, -1e300};

  void extend(const Vec2& p);
  [[nodiscard]] bool overlaps(const BBox& o, double pad) const;
  [[nodiscard]] double diameter() const { return norm(hi - lo); }
};

enum class BoundaryTag : std::uint8_t { Dirichlet, Neumann };

/// Closed polyline; edge i runs from vertices[i] to vertices[(i+1) % n] and carries tags[i].
struct BoundaryLoop {
  std::vector<Vec2> vertices;
  std::vector<BoundaryTag> tags;
};

struct BoundaryEdge {
  Vec2 a;
  Vec2 b;
  BoundaryTag tag;
};

/// Domain described by closed loops. Outer loops are counter-clockwise, holes
/// clockwise, so the domain always lies to the left of every edge.
class BoundaryRep {
 public:
  BoundaryRep() = default;
  /// Validates the loops; throws InvalidGeometry on degenerate, self-intersecting
  /// or wrongly oriented input.
  explicit BoundaryRep(std::vector<BoundaryLoop> loops);

  [[nodiscard]] const std::vector<BoundaryLoop>& loops() const { return loops_; }
  [[nodiscard]] const std::vector<BoundaryEdge>& edges() const { return edges_; }
  [[nodiscard]] const BBox& bbox() const { return bbox_; }
  [[nodiscard]] double diameter() const { return bbox_.diameter(); }
  /// Geometric tolerance: 1e-12 times the domain diameter.
  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] double area() const;
  [[nodiscard]] bool empty() const { return loops_.empty(); }
  [[nodiscard]] bool has_dirichlet() const;

 private:
  std::vector<BoundaryLoop> loops_;
  std::vector<BoundaryEdge> edges_;
  BBox bbox_;
  double tol_ = 0.0;
};

double signed_area(std::span<const Vec2> polygon);

enum class PointClass { Inside, Outside, OnBoundary };

/// Winding-number classification; OnBoundary within rep.tolerance() of an edge.
PointClass point_in_domain(const BoundaryRep& rep, const Vec2& p);

enum class SegmentKind : std::uint8_t { CellEdge, DomainDirichlet, DomainNeumann };

struct Segment {
  Vec2 a;
  Vec2 b;
  SegmentKind kind = SegmentKind::CellEdge;

  [[nodiscard]] double length() const { return norm(b - a); }
  [[nodiscard]] bool on_domain() const { return kind != SegmentKind::CellEdge; }
};

/// K ∩ Ω as closed oriented loops (region on the left of every segment).
struct CutRegion {
  std::vector<std::vector<Segment>> loops;

  [[nodiscard]] bool empty() const { return loops.empty(); }
  [[nodiscard]] double area() const;
  [[nodiscard]] std::vector<Segment> domain_segments() const;
  [[nodiscard]] std::size_t num_segments() const;
};

/// Intersection of a convex, counter-clockwise cell with the domain.
CutRegion clip_cell(const BoundaryRep& rep, std::span<const Vec2> cell);

/// True when some boundary edge carrying `tag` touches the closed cell.
bool cell_touches_boundary(const BoundaryRep& rep, std::span<const Vec2> cell, BoundaryTag tag);

// Named constructors. Sides of a rectangle are indexed bottom=0, right=1, top=2, left=3.
struct RectangleSpec {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
  std::array<bool, 4> dirichlet{true, false, false, false};
};
BoundaryRep make_rectangle(const RectangleSpec& spec);

struct RingSpec {
  Vec2 center{0.0, 0.0};
  double r_inner = 0.8;
  double r_outer = 1.0;
  int segments = 50;
  bool dirichlet_outer = false;
  bool dirichlet_inner = false;
};
BoundaryRep make_ring(const RingSpec& spec);

/// L-shape [0,w]x[0,w] minus [a,w]x[a,w]; the re-entrant corner is rounded with
/// a fillet of `radius` made of `segments` edges. Dirichlet on the bottom edge.
struct LShapeSpec {
  double width = 2.0;
  double arm = 1.0;
  double radius = 0.1;
  int segments = 5;
};
BoundaryRep make_rounded_lshape(const LShapeSpec& spec);
/// Same L-shape with the re-entrant corner drilled out by a hole of `radius`
/// centred on the corner (circle discretized with `segments` per full turn).
BoundaryRep make_drilled_lshape(const LShapeSpec& spec);

/// Cantilever with circular holes; clamped (Dirichlet) on the left edge.
struct BeamWithHolesSpec {
  double length = 2.0;
  double height = 0.4;
  int holes = 3;
  double radius = 0.08;
  /// Hole k is centred at x = L (k+1)/(holes+1), y = H/2 + (-1)^k offset.
  double vertical_offset = 0.05;
  int segments = 50;
};
BoundaryRep make_beam_with_holes(const BeamWithHolesSpec& spec);

/// Regular polygon approximating a circle, in counter-clockwise order.
std::vector<Vec2> circle_points(const Vec2& center, double radius, int segments);

}  // namespace cutfem
