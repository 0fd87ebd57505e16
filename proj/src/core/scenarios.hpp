#pragma once

// End-to-end numerical experiments: manufactured convergence, patch test,
// conditioning, frequency response, eigenvalues, two-grid estimation, thin
// bodies, compound bodies and fibre reinforcement.

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fibre.hpp"
#include "interface.hpp"
#include "model.hpp"

namespace cutfem {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Displacement at a physical point of the domain closure.
Vec2 point_value(const Model& m, const Eigen::VectorXd& u, const Vec2& x);

// ---------------------------------------------------------------------------
// Manufactured static problem on the unit square, clamped on y = 0.

struct Manufactured {
  Material material;

  [[nodiscard]] Vec2 displacement(const Vec2& x) const;
  /// [du_i/dx_j].
  [[nodiscard]] Eigen::Matrix2d gradient(const Vec2& x) const;
  /// f = -div sigma(u) in closed form.
  [[nodiscard]] Vec2 body_force(const Vec2& x) const;
  [[nodiscard]] Vec2 traction(const Vec2& x, const Vec2& n) const;
  [[nodiscard]] LoadData load() const;
};

/// Unit square with Dirichlet data on the bottom side.
BoundaryRep manufactured_domain();

struct ConvergenceOptions {
  ElementFamily family = ElementFamily::Quad;
  int p = 1;
  double theta = 0.0;
  Vec2 anchor{};
  GhostVariant variant = GhostVariant::Uniform;
  Material material;
};

struct ConvergenceRecord {
  double h = 0.0;
  int p = 0;
  ElementFamily family = ElementFamily::Quad;
  double theta = 0.0;
  int dofs = 0;
  double l2_error = 0.0;
  double energy_error = 0.0;  // sqrt of the elastic energy of u_h - u
  double rate = kNaN;         // against the previous level
};

ConvergenceRecord manufactured_static(double h, const ConvergenceOptions& opt);
std::vector<ConvergenceRecord> manufactured_convergence(std::span<const double> hs, const ConvergenceOptions& opt);

/// Least-squares slope of log(y) against log(x) over the last `last` points.
struct RateFit {
  double rate = kNaN;
  double residual = kNaN;  // root mean square deviation in log space
};
RateFit fit_rate(std::span<const double> x, std::span<const double> y, int last = 3);

/// sqrt(int sigma(e) : eps(e)) with e = u_h - u.
double energy_error(const FESpace& space, const CellRules& rules, const Material& mat, const Eigen::VectorXd& u,
                    const std::function<Eigen::Matrix2d(const Vec2&)>& exact_gradient);

// ---------------------------------------------------------------------------
// Patch test: a global linear displacement imposed through Nitsche data.

struct PatchResult {
  double relative_l2 = 0.0;
  int dofs = 0;
  std::size_t cut_cells = 0;
};
PatchResult patch_test(int p, ElementFamily family, double theta, double h);

// ---------------------------------------------------------------------------
// Condition numbers of the manufactured static problem.

enum class MeshVariant { Fitted, Sliver, Rotated };

struct ConditionOptions {
  MeshVariant variant = MeshVariant::Fitted;
  ElementFamily family = ElementFamily::Quad;
  double h = 0.1;
  double delta = 1e-3;  // sliver fraction
  double theta = 0.0;   // rotation of the Rotated variant
  Material material;
  ConditionMethod method = ConditionMethod::Auto;
  /// Columns to compute (plain, scaled, stabilized, stabilized and scaled);
  /// skipped entries keep kappa = NaN.
  std::array<bool, 4> columns{true, true, true, true};
};

/// Columns: plain, diagonally scaled, stabilized, stabilized and scaled.
struct ConditionRow {
  int p = 0;
  double h = 0.0;
  int dofs = 0;
  std::array<Condition, 4> A;
  std::array<Condition, 4> M;
};
ConditionRow condition_row(int p, const ConditionOptions& opt);

// ---------------------------------------------------------------------------
// Frequency response under an oscillating gravity load.

struct SweepRecord {
  double omega = 0.0;
  double energy = kNaN;
  bool ok = false;
  bool near_resonance = false;
};

/// (A_h - omega^2 M_h) u = L. omega = 0 uses the static solver path.
Eigen::VectorXd frequency_solve(const System& sys, double omega, bool* near_resonance = nullptr);
std::vector<SweepRecord> frequency_sweep(const System& sys, std::span<const double> omegas);

/// Load of the gravity scenarios: f = (0, -rho g).
LoadData gravity_load(const Material& mat, double g = 9.81);

/// Local maxima of E(omega) (interior grid points only).
std::vector<double> sweep_peaks(std::span<const SweepRecord> sweep);

// ---------------------------------------------------------------------------
// Eigenvalues of the free beam [0,3] x [0,0.3].

struct FreeBeamResult {
  int dofs = 0;
  std::vector<double> rigid;     // Rayleigh quotients of the rigid motions
  std::vector<double> flexible;  // ascending, rigid modes removed
  std::vector<double> residuals;
  /// Sixth eigenvalue when the rigid modes are counted (flexible[2]) and when
  /// they are not (flexible[5]).
  double sixth_with_rigid = kNaN;
  double sixth_flexible = kNaN;
};
BoundaryRep free_beam_domain();
FreeBeamResult free_beam_eigen(const GridSpec& grid, int p, const Material& mat = {}, int k = 6);

// ---------------------------------------------------------------------------
// Two-grid eigenvalue estimation.

struct TwoGridOptions {
  ElementFamily family = ElementFamily::Quad;
  int p = 2;
  double H = 0.1;
  int refine = 2;  // h = H / refine
  double theta = 0.0;
  Vec2 anchor{};
  int mode = 1;    // 1-based index of the targeted eigenvalue
  bool free = false;  // work in the complement of the rigid motions
  bool literal = false;  // ratio of norms instead of squared norms
  bool direct = true;    // also solve the fine eigenproblem
  Material material;
};

struct TwoGridResult {
  double lambda_H = kNaN;
  double lambda_h = kNaN;       // two-grid estimate
  double lambda_direct = kNaN;  // fine eigenvalue (when requested)
  int coarse_dofs = 0;
  int fine_dofs = 0;
};

/// Rejects non-integer H / h ratios.
int refinement_ratio(double H, double h);
TwoGridResult two_grid_eigen(const BoundaryRep& rep, const TwoGridOptions& opt);

/// Clamped-left steel beam [0,3] x [0,0.3].
BoundaryRep clamped_beam_domain();

// ---------------------------------------------------------------------------
// Thin geometries.

struct CantileverSpec {
  double length = 1.0;
  double thickness = 0.05;
};
struct CantileverResult {
  int dofs = 0;
  double tip_deflection = 0.0;  // vertical displacement at the tip centre
};
CantileverResult thin_cantilever(const CantileverSpec& spec, const GridSpec& grid, int p, const Material& mat = {});

struct RingResult {
  int dofs = 0;
  double mean_radial = 0.0;
  double variation = 0.0;  // (max - min) / |mean| of the midline radial displacement
  double net_torque = 0.0;
  double net_force = 0.0;
};
/// Free ring spinning at `omega` rad/s: f = rho omega^2 (x - c).
RingResult ring_centrifugal(const RingSpec& spec, const GridSpec& grid, int p, double omega, const Material& mat = {},
                            int samples = 360);

// ---------------------------------------------------------------------------
// Compound bodies coupled by interface Nitsche terms.

struct SubBody {
  BoundaryRep rep;
  GridSpec grid;
  Material material;
  int p = 2;
};
struct CompoundInterface {
  int first = 0;  // body on the left of the segments
  int second = 1;
  std::vector<InterfaceSegment> segments;
};
struct CompoundProblem {
  std::vector<SubBody> bodies;
  std::vector<CompoundInterface> interfaces;
  InterfaceOptions coupling;
  std::vector<LoadData> loads;  // per body, may be empty
};

struct CompoundSolution {
  std::vector<std::unique_ptr<Model>> models;
  std::vector<int> offsets;
  std::vector<std::vector<InterfacePiece>> pieces;  // per interface
  std::vector<std::array<int, 2>> interface_bodies;  // (first, second) per interface
  Eigen::VectorXd u;
  SpMat K;
  Eigen::VectorXd L;

  [[nodiscard]] Eigen::VectorXd body_vector(int b) const;
  [[nodiscard]] BodyRef body(int b) const;
};
CompoundSolution solve_compound(const CompoundProblem& problem);

/// Jump diagnostics on an interface: L2 norms of [u] and of the trace of the
/// first body, and the largest von Mises difference at the piece midpoints.
struct InterfaceReport {
  double jump_l2 = 0.0;
  double trace_l2 = 0.0;
  double max_von_mises_jump = 0.0;
  double max_von_mises = 0.0;
};
InterfaceReport interface_report(const CompoundSolution& sol, int interface);

/// Drilled L-shape split into a corner block and two arms on three grids.
struct DrilledLOptions {
  LShapeSpec shape{};
  double h = 0.1;
  int p = 2;
  double stiffness_ratio = 1.0;  // arms get E / ratio
  double traction = 1e7;         // horizontal shear on the top edge (Pa)
  InterfaceOptions coupling;
};
CompoundProblem drilled_lshape_compound(const DrilledLOptions& opt);
/// The same L-shape as one body (identical boundary vertices).
BoundaryRep drilled_lshape_whole(const DrilledLOptions& opt);

/// Manufactured problem split at x = 0.5 into two bodies on shifted grids.
struct GluedResult {
  double single_l2 = 0.0;
  double glued_l2 = 0.0;
  double jump_l2 = 0.0;
};
GluedResult glued_manufactured(int p, double h, double theta, const InterfaceOptions& coupling = {});

// ---------------------------------------------------------------------------
// Fibre-reinforced block (0,4) x (0,1), clamped on the left.

struct FibreDemoOptions {
  int p = 2;
  double h = 1.0 / 16;
  ElementFamily family = ElementFamily::Quad;
  Material bulk{300.0, 1.0 / 3.0, 1.0};
  Vec2 load{0.0, -1.0};
  bool fibre_load = true;  // (A f, v) along every fibre
};

struct FibreConfigResult {
  std::string name;
  int dofs = 0;
  double compliance = 0.0;        // L^T u
  double tip_deflection = 0.0;    // displacement at (4, 0.5) along the load
  double energy_balance = 0.0;    // |u^T K u - L^T u| / |L^T u|
  double max_rotation_jump = 0.0; // beam crossing points only
};

/// Trusses at y = 0.249 and 0.751 (t = 0.1, E = 1e4) and a beam at y = 0.501
/// (t = 0.1, E = 1e6).
std::vector<FibreSpec> reference_trusses();
std::vector<FibreSpec> reference_beam();

FibreConfigResult solve_fibre_config(const std::string& name, const std::vector<FibreSpec>& fibres,
                                     const FibreDemoOptions& opt, Eigen::VectorXd* u_out = nullptr);

}  // namespace cutfem
