#include "model.hpp"

namespace cutfem {

Model::Model(BoundaryRep rep, const GridSpec& grid, int p, const Material& mat, std::optional<Stabilization> stab)
    : mat_(mat) {
  const BackgroundMesh bg = build_background(grid.family, rep.bbox(), grid.h, grid.theta, grid.anchor);
  mesh_ = std::make_unique<ActiveMesh>(bg, rep);
  init(p, stab);
}

Model::Model(BoundaryRep rep, const BackgroundMesh& bg, int p, const Material& mat, std::optional<Stabilization> stab)
    : mat_(mat) {
  check_coverage(bg, rep);
  mesh_ = std::make_unique<ActiveMesh>(bg, rep);
  init(p, stab);
}

void Model::init(int p, std::optional<Stabilization> stab) {
  mat_.validate();
  stab_ = stab ? *stab : Stabilization::defaults(mat_, p);
  space_ = std::make_unique<FESpace>(*mesh_, p);
  rules_ = build_cell_rules(*space_);
}

System Model::assemble(const LoadData& data) const { return assemble_system(*space_, rules_, mat_, stab_, data); }

}  // namespace cutfem
