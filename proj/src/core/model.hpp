#pragma once

// A discretized body: domain, active mesh, space and quadrature kept
// together so that references between them stay valid.

#include <memory>
#include <optional>

#include "forms.hpp"
#include "linalg.hpp"

namespace cutfem {

struct GridSpec {
  ElementFamily family = ElementFamily::Quad;
  double h = 0.1;
  double theta = 0.0;
  Vec2 anchor{};
};

class Model {
 public:
  /// Background grid from `grid` covering the domain bounding box.
  Model(BoundaryRep rep, const GridSpec& grid, int p, const Material& mat,
        std::optional<Stabilization> stab = std::nullopt);
  /// Explicit background grid.
  Model(BoundaryRep rep, const BackgroundMesh& bg, int p, const Material& mat,
        std::optional<Stabilization> stab = std::nullopt);

  [[nodiscard]] const BoundaryRep& boundary() const { return mesh_->boundary(); }
  [[nodiscard]] const ActiveMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const FESpace& space() const { return *space_; }
  [[nodiscard]] const CellRules& rules() const { return rules_; }
  [[nodiscard]] const Material& material() const { return mat_; }
  [[nodiscard]] const Stabilization& stabilization() const { return stab_; }
  [[nodiscard]] int order() const { return space_->order(); }
  [[nodiscard]] int num_dofs() const { return space_->num_dofs(); }
  [[nodiscard]] double h() const { return mesh_->h(); }

  [[nodiscard]] System assemble(const LoadData& data = {}) const;

 private:
  void init(int p, std::optional<Stabilization> stab);

  Material mat_;
  Stabilization stab_;
  std::unique_ptr<ActiveMesh> mesh_;
  std::unique_ptr<FESpace> space_;
  CellRules rules_;
};

}  // namespace cutfem
