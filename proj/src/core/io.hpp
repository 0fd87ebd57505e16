#pragma once

// Output writers (VTK legacy ASCII, CSV, sparse triplets) and the JSON run
// configuration.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fibre.hpp"
#include "model.hpp"

namespace cutfem {

// ---------------------------------------------------------------------------
// VTK legacy ASCII.

/// One body of a VTK file: a space, its material and a displacement vector
/// (may be empty, then zeros are written).
struct VtkPart {
  const FESpace* space = nullptr;
  Material material;
  const Eigen::VectorXd* u = nullptr;
  std::vector<FibreSpec> fibres;  // drawn as line cells
};

struct VtkOptions {
  /// Full cells are split into `subdivisions`^2 pieces (0: use the order p).
  int subdivisions = 0;
  std::string title = "cutfem";
};

/// Writes an UNSTRUCTURED_GRID with POINT_DATA "displacement" (vectors) and
/// "von_mises" (scalars), and CELL_DATA "body" and "kind" (0 full, 1 cut,
/// 2 fibre). Cut cells are written as the polygons of K ∩ Ω.
void write_vtk(std::ostream& os, const std::vector<VtkPart>& parts, const VtkOptions& opt = {});
void write_vtk(const std::string& path, const std::vector<VtkPart>& parts, const VtkOptions& opt = {});

// ---------------------------------------------------------------------------
// CSV with a header row; doubles use 17 significant digits.

using CsvValue = std::variant<std::string, double, long long>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<CsvValue> row);
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  void write(std::ostream& os) const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvValue>> rows_;
};

/// Round-trip formatting of a double ("nan", "inf", "-inf" for non-finite).
std::string format_double(double v);

/// Writes "row,col,value" lines (0-based, upper and lower triangle).
void write_coo(const std::string& path, const SpMat& m);

/// Quadrature points of every active cell: cell, kind (volume/boundary), x, y,
/// weight, and the boundary normal.
void write_quadrature_csv(const std::string& path, const FESpace& space, const CellRules& rules);

// ---------------------------------------------------------------------------
// Run configuration (JSON).

struct RunConfig {
  BoundaryRep geometry;
  std::string geometry_kind = "rectangle";
  Material material;
  std::optional<double> gamma_m;
  std::optional<double> gamma_a;
  std::optional<double> beta;
  GhostVariant variant = GhostVariant::Uniform;
  bool ghost = true;
  ElementFamily family = ElementFamily::Quad;
  std::vector<int> p{2};
  std::vector<double> h{0.1};
  std::vector<double> theta{0.0};
  Vec2 anchor{};
  Vec2 body_force{};
  bool gravity = false;  // adds (0, -rho g)
  Vec2 traction{};       // on every Neumann edge
  std::vector<double> omega;
  int eigen_count = 6;
  std::string output = "out";

  /// Stabilization for order p with the overrides applied.
  [[nodiscard]] Stabilization stabilization(int p) const;
  [[nodiscard]] LoadData load() const;
};

/// Parses a configuration. Syntax errors and unknown or mistyped keys raise
/// Config errors whose message starts with "line N:".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Parses "0.1", "1/16" or "0.1/3".
double parse_number(const std::string& s);
/// Parses "1,2,3" and ranges "1..5".
std::vector<int> parse_int_list(const std::string& s);
/// Parses comma separated numbers, each of the form accepted by parse_number.
std::vector<double> parse_double_list(const std::string& s);

ElementFamily parse_family(const std::string& s);
std::string family_name(ElementFamily f);

}  // namespace cutfem
