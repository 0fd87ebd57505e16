#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "scenarios.hpp"

namespace cutfem {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

Vec2 point_value(const Model& m, const Eigen::VectorXd& u, const Vec2& x) {
  const int cell = m.mesh().locate(x);
  require(cell >= 0, ErrorCode::Coverage, "evaluation point outside the active mesh");
  return m.space().value(u, cell, m.mesh().to_local(cell, x));
}

CantileverResult thin_cantilever(const CantileverSpec& spec, const GridSpec& grid, int p, const Material& mat) {
  RectangleSpec r;
  r.lo = {0.0, 0.0};
  r.hi = {spec.length, spec.thickness};
  r.dirichlet = {false, false, false, true};
  const Model model(make_rectangle(r), grid, p, mat);
  const System sys = model.assemble(gravity_load(mat));
  const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L);
  CantileverResult res;
  res.dofs = model.num_dofs();
  res.tip_deflection = point_value(model, u, {spec.length, 0.5 * spec.thickness}).y;
  return res;
}

RingResult ring_centrifugal(const RingSpec& spec, const GridSpec& grid, int p, double omega, const Material& mat,
                            int samples) {
  const Model model(make_ring(spec), grid, p, mat);
  const Vec2 c = spec.center;
  const double k = mat.rho * omega * omega;
  LoadData data;
  data.f = [c, k](const Vec2& x) { return k * (x - c); };
  const System sys = model.assemble(data);
  const Eigen::MatrixXd Y = rigid_body_basis(model.space(), sys.Mh);
  const Eigen::VectorXd u = solve_deflated(sys.Ah, sys.Mh, Y, sys.L);

  RingResult res;
  res.dofs = model.num_dofs();
  const Eigen::VectorXd rot = model.space().interpolate([c](const Vec2& x) { return Vec2{-(x.y - c.y), x.x - c.x}; });
  const Eigen::VectorXd ex = model.space().interpolate([](const Vec2&) { return Vec2{1.0, 0.0}; });
  const Eigen::VectorXd ey = model.space().interpolate([](const Vec2&) { return Vec2{0.0, 1.0}; });
  res.net_torque = rot.dot(sys.L);
  res.net_force = std::hypot(ex.dot(sys.L), ey.dot(sys.L));

  const double rm = 0.5 * (spec.r_inner + spec.r_outer);
  double lo = 1e300, hi = -1e300, sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double phi = 2 * kPi * s / samples;
    const Vec2 er{std::cos(phi), std::sin(phi)};
    const double ur = dot(point_value(model, u, c + rm * er), er);
    lo = std::min(lo, ur);
    hi = std::max(hi, ur);
    sum += ur;
  }
  res.mean_radial = sum / samples;
  res.variation = (hi - lo) / std::abs(res.mean_radial);
  return res;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd CompoundSolution::body_vector(int b) const {
  return u.segment(offsets[static_cast<std::size_t>(b)], models[static_cast<std::size_t>(b)]->num_dofs());
}

BodyRef CompoundSolution::body(int b) const {
  const auto& m = *models[static_cast<std::size_t>(b)];
  return {&m.space(), m.material(), offsets[static_cast<std::size_t>(b)]};
}

namespace {

bool on_segments(const Vec2& x, const std::vector<InterfaceSegment>& segs, double tol) {
  return std::any_of(segs.begin(), segs.end(),
                     [&](const InterfaceSegment& s) { return distance_to_segment(x, s.a, s.b) <= tol; });
}

}  // namespace

CompoundSolution solve_compound(const CompoundProblem& problem) {
  const std::size_t nb = problem.bodies.size();
  require(nb >= 1, ErrorCode::InvalidArgument, "compound problem needs bodies");
  CompoundSolution sol;
  int total = 0;
  for (const auto& b : problem.bodies) {
    sol.models.push_back(std::make_unique<Model>(b.rep, b.grid, b.p, b.material));
    sol.offsets.push_back(total);
    total += sol.models.back()->num_dofs();
  }
  // Interface edges are tagged Neumann in each body; no traction acts there.
  std::vector<std::vector<InterfaceSegment>> body_interfaces(nb);
  for (const auto& itf : problem.interfaces) {
    require(itf.first >= 0 && itf.second >= 0 && static_cast<std::size_t>(itf.first) < nb &&
                static_cast<std::size_t>(itf.second) < nb && itf.first != itf.second,
            ErrorCode::InvalidArgument, "interface refers to unknown bodies");
    for (int b : {itf.first, itf.second}) {
      auto& v = body_interfaces[static_cast<std::size_t>(b)];
      v.insert(v.end(), itf.segments.begin(), itf.segments.end());
    }
  }
  sol.K.resize(total, total);
  sol.L = Eigen::VectorXd::Zero(total);
  for (std::size_t b = 0; b < nb; ++b) {
    const Model& m = *sol.models[b];
    LoadData data = b < problem.loads.size() ? problem.loads[b] : LoadData{};
    if (data.g_n) {
      const double tol = 1e-9 * m.boundary().diameter();
      data.g_n = [g = data.g_n, segs = body_interfaces[b], tol](const Vec2& x, const Vec2& n) {
        return on_segments(x, segs, tol) ? Vec2{} : g(x, n);
      };
    }
    const System sys = m.assemble(data);
    sol.K += embed(sys.Ah, sol.offsets[b], total);
    sol.L.segment(sol.offsets[b], m.num_dofs()) = sys.L;
  }
  for (const auto& itf : problem.interfaces) {
    const BodyRef b1 = sol.body(itf.first);
    const BodyRef b2 = sol.body(itf.second);
    sol.pieces.push_back(decompose_interface(*b1.space, *b2.space, itf.segments));
    sol.interface_bodies.push_back({itf.first, itf.second});
    sol.K += assemble_interface_nitsche(b1, b2, sol.pieces.back(), total, problem.coupling);
  }
  sol.u = solve_spd(sol.K, sol.L);
  return sol;
}

InterfaceReport interface_report(const CompoundSolution& sol, int interface) {
  const auto& pieces = sol.pieces[static_cast<std::size_t>(interface)];
  require(!pieces.empty(), ErrorCode::InvalidArgument, "interface has no pieces");
  const auto [first, second] = sol.interface_bodies[static_cast<std::size_t>(interface)];
  const BodyRef b1 = sol.body(first);
  const BodyRef b2 = sol.body(second);
  InterfaceReport rep;
  rep.jump_l2 = interface_jump_l2(b1, b2, pieces, sol.u);
  const Eigen::VectorXd u1 = sol.body_vector(first);
  const Eigen::VectorXd u2 = sol.body_vector(second);
  const auto& g = gauss_1d(2 * b1.space->order() + 1);
  double trace = 0.0;
  for (const auto& pc : pieces) {
    const double len = norm(pc.b - pc.a);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const Vec2 x = pc.a + (0.5 * (g.x[q] + 1.0)) * (pc.b - pc.a);
      const Vec2 v = b1.space->value(u1, pc.cell1, b1.space->mesh().to_local(pc.cell1, x));
      trace += 0.5 * len * g.w[q] * dot(v, v);
    }
    const Vec2 mid = 0.5 * (pc.a + pc.b);
    const double vm1 =
        von_mises(stress(*b1.space, b1.material, u1, pc.cell1, b1.space->mesh().to_local(pc.cell1, mid)), b1.material.nu);
    const double vm2 =
        von_mises(stress(*b2.space, b2.material, u2, pc.cell2, b2.space->mesh().to_local(pc.cell2, mid)), b2.material.nu);
    rep.max_von_mises_jump = std::max(rep.max_von_mises_jump, std::abs(vm1 - vm2));
    rep.max_von_mises = std::max({rep.max_von_mises, vm1, vm2});
  }
  rep.trace_l2 = std::sqrt(trace);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Quarter arc around c from angle a0 to a1 (clockwise when a1 < a0), without
// its end point.
void push_arc(BoundaryLoop& loop, const Vec2& c, double r, double a0, double a1, int n) {
  for (int k = 0; k < n; ++k) {
    const double phi = a0 + (a1 - a0) * k / n;
    loop.vertices.push_back({c.x + r * std::cos(phi), c.y + r * std::sin(phi)});
    loop.tags.push_back(BoundaryTag::Neumann);
  }
}

void push_vertex(BoundaryLoop& loop, const Vec2& v, BoundaryTag tag = BoundaryTag::Neumann) {
  loop.vertices.push_back(v);
  loop.tags.push_back(tag);
}

int quarter_segments(const LShapeSpec& s) { return std::max(2, s.segments / 4); }

}  // namespace

BoundaryRep drilled_lshape_whole(const DrilledLOptions& opt) {
  const LShapeSpec& s = opt.shape;
  const double w = s.width, a = s.arm, r = s.radius;
  const int m = quarter_segments(s);
  const Vec2 c{a, a};
  BoundaryLoop loop;
  push_vertex(loop, {0, 0}, BoundaryTag::Dirichlet);
  push_vertex(loop, {w, 0});
  push_vertex(loop, {w, a});
  push_arc(loop, c, r, 0.0, -1.5 * kPi, 3 * m);
  push_vertex(loop, {a, a + r});
  push_vertex(loop, {a, w});
  push_vertex(loop, {0, w});
  return BoundaryRep({std::move(loop)});
}

CompoundProblem drilled_lshape_compound(const DrilledLOptions& opt) {
  const LShapeSpec& s = opt.shape;
  require(s.width > s.arm && s.arm > s.radius && s.radius > 0 && s.width - s.arm > s.radius,
          ErrorCode::InvalidArgument, "invalid drilled L-shape dimensions");
  require(opt.stiffness_ratio > 0, ErrorCode::InvalidArgument, "stiffness ratio must be positive");
  const double w = s.width, a = s.arm, r = s.radius;
  const int m = quarter_segments(s);
  const Vec2 c{a, a};
  const auto D = BoundaryTag::Dirichlet;

  BoundaryLoop corner;  // [0,a]^2 without the quarter disc at (a,a)
  push_vertex(corner, {0, 0}, D);
  push_vertex(corner, {a, 0});
  push_arc(corner, c, r, -0.5 * kPi, -kPi, m);
  push_vertex(corner, {a - r, a});
  push_vertex(corner, {0, a});
  BoundaryLoop right;  // [a,w] x [0,a]
  push_vertex(right, {a, 0}, D);
  push_vertex(right, {w, 0});
  push_vertex(right, {w, a});
  push_arc(right, c, r, 0.0, -0.5 * kPi, m);
  push_vertex(right, {a, a - r});
  BoundaryLoop top;  // [0,a] x [a,w]
  push_vertex(top, {0, a});
  push_arc(top, c, r, kPi, 0.5 * kPi, m);
  push_vertex(top, {a, a + r});
  push_vertex(top, {a, w});
  push_vertex(top, {0, w});

  Material stiff;
  Material soft = stiff;
  soft.E = stiff.E / opt.stiffness_ratio;
  CompoundProblem prob;
  // Three unrelated grids: the corner block is finer and rotated.
  prob.bodies.push_back({BoundaryRep({std::move(corner)}), {ElementFamily::Quad, 0.5 * opt.h, kPi / 9, {0.011, 0.007}},
                         stiff, opt.p});
  prob.bodies.push_back({BoundaryRep({std::move(right)}), {ElementFamily::Quad, opt.h, 0.0, {0.023, 0.013}}, soft, opt.p});
  prob.bodies.push_back({BoundaryRep({std::move(top)}), {ElementFamily::Tri, opt.h, -kPi / 11, {0.017, 0.029}}, soft, opt.p});
  prob.interfaces.push_back({0, 1, {{{a, 0}, {a, a - r}}}});
  prob.interfaces.push_back({0, 2, {{{a - r, a}, {0, a}}}});
  prob.coupling = opt.coupling;
  const double tau = opt.traction;
  LoadData top_load;
  top_load.g_n = [tau, w](const Vec2& x, const Vec2& n) {
    return (n.y > 0.5 && std::abs(x.y - w) < 1e-9) ? Vec2{tau, 0.0} : Vec2{};
  };
  prob.loads = {LoadData{}, LoadData{}, top_load};
  return prob;
}

GluedResult glued_manufactured(int p, double h, double theta, const InterfaceOptions& coupling) {
  const Manufactured mf;
  GluedResult res;
  {
    const Model single(manufactured_domain(), GridSpec{ElementFamily::Quad, h, theta, {}}, p, mf.material);
    const System sys = single.assemble(mf.load());
    const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L);
    const CellRules er = build_cell_rules(single.space(), 2 * p + 4, 2 * p);
    res.single_l2 = l2_error(single.space(), er, u, [&](const Vec2& x) { return mf.displacement(x); });
  }
  RectangleSpec left;
  left.hi = {0.5, 1.0};
  RectangleSpec right;
  right.lo = {0.5, 0.0};
  CompoundProblem prob;
  prob.bodies.push_back({make_rectangle(left), {ElementFamily::Quad, h, theta, {}}, mf.material, p});
  prob.bodies.push_back({make_rectangle(right), {ElementFamily::Quad, h, theta, {0.31 * h, 0.17 * h}}, mf.material, p});
  prob.interfaces.push_back({0, 1, {{{0.5, 0.0}, {0.5, 1.0}}}});
  prob.coupling = coupling;
  prob.loads = {mf.load(), mf.load()};
  const CompoundSolution sol = solve_compound(prob);
  double sum = 0.0;
  for (int b = 0; b < 2; ++b) {
    const Model& m = *sol.models[static_cast<std::size_t>(b)];
    const CellRules er = build_cell_rules(m.space(), 2 * p + 4, 2 * p);
    const double e = l2_error(m.space(), er, sol.body_vector(b), [&](const Vec2& x) { return mf.displacement(x); });
    sum += e * e;
  }
  res.glued_l2 = std::sqrt(sum);
  res.jump_l2 = interface_report(sol, 0).jump_l2;
  return res;
}

// ---------------------------------------------------------------------------

std::vector<FibreSpec> reference_trusses() {
  FibreSpec lower{{0.0, 0.249}, {4.0, 0.249}, 0.1, 1e4, true, false};
  FibreSpec upper{{0.0, 0.751}, {4.0, 0.751}, 0.1, 1e4, true, false};
  return {lower, upper};
}

std::vector<FibreSpec> reference_beam() { return {FibreSpec{{0.0, 0.501}, {4.0, 0.501}, 0.1, 1e6, true, true}}; }

FibreConfigResult solve_fibre_config(const std::string& name, const std::vector<FibreSpec>& fibres,
                                     const FibreDemoOptions& opt, Eigen::VectorXd* u_out) {
  RectangleSpec r;
  r.hi = {4.0, 1.0};
  r.dirichlet = {false, false, false, true};
  const Model model(make_rectangle(r), GridSpec{opt.family, opt.h, 0.0, {}}, opt.p, opt.bulk);
  const Vec2 f = opt.load;
  LoadData data;
  data.f = [f](const Vec2&) { return f; };
  const System sys = model.assemble(data);
  SpMat K = sys.Ah;
  Eigen::VectorXd L = sys.L;
  std::vector<FibreMesh> meshes;
  for (const auto& fb : fibres) {
    meshes.push_back(decompose_fibre(model.mesh(), fb));
    K += assemble_fibre(model.space(), fb, meshes.back());
    if (opt.fibre_load) L += fibre_load(model.space(), fb, meshes.back(), data.f);
  }
  const Eigen::VectorXd u = solve_spd(K, L);
  FibreConfigResult res;
  res.name = name;
  res.dofs = model.num_dofs();
  res.compliance = L.dot(u);
  res.energy_balance = std::abs(energy_defect(K, u, L)) / std::abs(res.compliance);
  const Vec2 dir = (1.0 / norm(f)) * f;
  res.tip_deflection = dot(point_value(model, u, {4.0, 0.5}), dir);
  for (std::size_t k = 0; k < fibres.size(); ++k) {
    if (!fibres[k].beam) continue;
    for (const auto& pj : beam_point_values(model.space(), fibres[k], meshes[k], u))
      res.max_rotation_jump = std::max(res.max_rotation_jump, std::abs(pj.rotation_jump));
  }
  if (u_out) *u_out = u;
  return res;
}

}  // namespace cutfem
