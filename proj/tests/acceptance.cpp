// Acceptance checks. Prints one PASS/FAIL line per criterion, with detail
// lines below it. Exit status is 0 when every failing criterion is listed in
// --expect-fail and every listed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "scenarios.hpp"

using namespace cutfem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void info(const std::string& what) { lines.push_back("info  " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* fam_name(ElementFamily f) { return f == ElementFamily::Quad ? "quad" : "tri"; }

// Least-squares slope of log(y) against log(x) over all points.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  return fit_rate(x, y, static_cast<int>(x.size())).rate;
}

// 1. Manufactured convergence.
Report manufactured() {
  Report r;
  const std::vector<double> hs{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  for (int p = 1; p <= 3; ++p)
    for (auto fam : {ElementFamily::Quad, ElementFamily::Tri}) {
      const auto t0 = std::chrono::steady_clock::now();
      for (double theta : {0.0, kPi / 7}) {
        ConvergenceOptions o;
        o.p = p;
        o.family = fam;
        o.theta = theta;
        // Off-lattice anchor so that theta = 0 still cuts cells.
        o.anchor = {0.013, 0.007};
        const auto recs = manufactured_convergence(hs, o);
        std::vector<double> e;
        for (const auto& rec : recs) e.push_back(rec.l2_error);
        const double rate = slope(hs, e);
        r.check(std::abs(rate - (p + 1)) <= 0.25,
                fmt("p=%d %s theta=%.4f: fitted L2 rate %.3f (target %d +- 0.25), error at h=1/64 %.3e", p,
                    fam_name(fam), theta, rate, p + 1, e.back()));
      }
      const double s = seconds_since(t0);
      r.check(s <= 120.0, fmt("p=%d %s: runtime %.1f s (limit 120 s)", p, fam_name(fam), s));
    }
  return r;
}

// 2. Patch test.
Report patch() {
  Report r;
  for (int p : {1, 2})
    for (auto fam : {ElementFamily::Quad, ElementFamily::Tri}) {
      const PatchResult pr = patch_test(p, fam, kPi / 9, 0.1);
      r.check(pr.relative_l2 <= 1e-9 && pr.cut_cells > 0,
              fmt("p=%d %s: relative L2 error %.3e on %zu cut cells", p, fam_name(fam), pr.relative_l2, pr.cut_cells));
    }
  return r;
}

// 3. Conditioning scaling.
Report conditioning() {
  Report r;
  const std::vector<int> ns{8, 16, 32, 64, 128};
  for (int p : {1, 2}) {
    std::vector<double> hs, ka, km;
    for (int n : ns) {
      ConditionOptions o;
      o.variant = MeshVariant::Rotated;
      o.theta = kPi / 9;
      o.h = 1.0 / n;
      o.columns = {false, false, false, true};
      const ConditionRow row = condition_row(p, o);
      hs.push_back(o.h);
      ka.push_back(row.A[3].kappa);
      km.push_back(row.M[3].kappa);
      r.info(fmt("p=%d h=1/%d dofs=%d kappa(A)=%.4e kappa(M)=%.4e", p, n, row.dofs, ka.back(), km.back()));
    }
    const double sa = slope(hs, ka), sm = slope(hs, km);
    r.check(sa >= -2.5 && sa <= -1.5, fmt("p=%d: kappa(A) slope %.3f over h=1/8..1/128 (target [-2.5, -1.5])", p, sa));
    r.check(sm >= -0.4 && sm <= 0.4, fmt("p=%d: kappa(M) slope %.3f over h=1/8..1/128 (target [-0.4, 0.4])", p, sm));
    const RateFit la = fit_rate(hs, ka, 3), lm = fit_rate(hs, km, 3);
    r.info(fmt("p=%d: slopes over the three finest levels: kappa(A) %.3f, kappa(M) %.3f", p, la.rate, lm.rate));
  }
  return r;
}

// 4. Worst-case sliver.
Report sliver() {
  Report r;
  for (int p : {1, 2}) {
    ConditionOptions o;
    o.variant = MeshVariant::Sliver;
    o.delta = 1e-3;
    o.h = 0.1;
    const ConditionRow row = condition_row(p, o);
    r.info(fmt("p=%d: kappa(A) plain %.4e, precond %.4e, stabilized %.4e, stabilized+precond %.4e", p, row.A[0].kappa,
               row.A[1].kappa, row.A[2].kappa, row.A[3].kappa));
    if (p == 1) r.check(row.A[1].kappa <= 1e5, fmt("p=1: preconditioned kappa(A) %.4e <= 1e5", row.A[1].kappa));
    if (p == 2) {
      r.check(row.A[0].kappa >= 1e10, fmt("p=2: unstabilized kappa(A) %.4e >= 1e10", row.A[0].kappa));
      r.check(row.A[3].kappa <= 1e6, fmt("p=2: stabilized+preconditioned kappa(A) %.4e <= 1e6", row.A[3].kappa));
    }
  }
  return r;
}

// Random polynomial of total degree p in each component.
struct RandomPoly {
  std::vector<double> cx, cy;
  int p;
  RandomPoly(int p_, std::mt19937& rng) : p(p_) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int a = 0; a <= p; ++a)
      for (int b = 0; a + b <= p; ++b) {
        cx.push_back(U(rng));
        cy.push_back(U(rng));
      }
  }
  Vec2 operator()(const Vec2& x) const {
    Vec2 v{};
    std::size_t k = 0;
    for (int a = 0; a <= p; ++a)
      for (int b = 0; a + b <= p; ++b, ++k) {
        const double m = std::pow(x.x, a) * std::pow(x.y, b);
        v.x += cx[k] * m;
        v.y += cy[k] * m;
      }
    return v;
  }
};

// 5. Ghost-penalty exactness.
Report ghost() {
  Report r;
  const BoundaryRep rep = make_ring({});
  std::mt19937 rng(2024);
  for (auto fam : {ElementFamily::Quad, ElementFamily::Tri})
    for (int p = 1; p <= 4; ++p) {
      const ActiveMesh mesh(build_background(fam, rep.bbox(), 0.15, kPi / 9, {0.01, 0.02}), rep);
      const FESpace space(mesh, p);
      double worst = 0.0;
      for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd v = space.interpolate(RandomPoly(p, rng));
        worst = std::max(worst, ghost_penalty_value(space, v) / v.squaredNorm());
      }
      r.check(worst <= 1e-20, fmt("p=%d %s: max j_h(v,v)/|v|^2 over 50 polynomials %.3e", p, fam_name(fam), worst));
    }
  return r;
}

// Oracle: fan triangulation of a convex polygon with a collapsed Gauss rule.
double polygon_moment(const std::vector<Vec2>& poly, int a, int b) {
  const Gauss1D& g = gauss_1d(12);
  double sum = 0.0;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Vec2 p0 = poly[0], p1 = poly[k], p2 = poly[k + 1];
    const double jac = cross(p1 - p0, p2 - p0);
    for (std::size_t i = 0; i < g.x.size(); ++i)
      for (std::size_t j = 0; j < g.x.size(); ++j) {
        const double u = 0.5 * (g.x[i] + 1), v = 0.5 * (g.x[j] + 1);
        const Vec2 x = p0 + u * (p1 - p0) + ((1 - u) * v) * (p2 - p0);
        sum += 0.25 * g.w[i] * g.w[j] * (1 - u) * jac * std::pow(x.x, a) * std::pow(x.y, b);
      }
  }
  return sum;
}

// 6. Quadrature exactness.
Report quadrature() {
  Report r;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0, worst_area = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Unit square cut by a random half plane n.x <= c.
    const double phi = 2 * kPi * U(rng);
    const Vec2 n{std::cos(phi), std::sin(phi)};
    const double c = dot(n, Vec2{0.1 + 0.8 * U(rng), 0.1 + 0.8 * U(rng)});
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<Vec2> poly;
    for (std::size_t i = 0; i < 4; ++i) {
      const Vec2 a = sq[i], b = sq[(i + 1) % 4];
      const double fa = dot(n, a) - c, fb = dot(n, b) - c;
      if (fa <= 0) poly.push_back(a);
      if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) poly.push_back(a + (fa / (fa - fb)) * (b - a));
    }
    CutRegion region;
    std::vector<Segment> loop;
    for (std::size_t i = 0; i < poly.size(); ++i) loop.push_back({poly[i], poly[(i + 1) % poly.size()], SegmentKind::CellEdge});
    region.loops.push_back(loop);
    for (int p = 1; p <= 3; ++p) {
      const QuadRule rule = cut_cell_rule(region, 2 * p, MomentMode::Tensor);
      worst_area = std::max(worst_area, std::abs(rule.weight_sum() - signed_area(poly)));
      for (int a = 0; a <= 2 * p; ++a)
        for (int b = 0; b <= 2 * p; ++b) {
          const double exact = polygon_moment(poly, a, b);
          double s = 0.0;
          for (std::size_t i = 0; i < rule.size(); ++i)
            s += rule.weights[i] * std::pow(rule.points[i].x, a) * std::pow(rule.points[i].y, b);
          worst = std::max(worst, std::abs(s - exact) / std::max(std::abs(exact), 1e-3));
          ++cases;
        }
    }
  }
  r.check(worst <= 1e-12, fmt("100 random cuts, %d monomial integrals up to degree 2p (p<=3): max rel error %.3e", cases,
                              worst));
  r.check(worst_area <= 1e-13, fmt("weight sum minus shoelace area: max %.3e", worst_area));
  // Cut cells of real meshes: weight sums against the shoelace areas of K ∩ Ω.
  double mesh_worst = 0.0;
  const BoundaryRep rep = make_ring({});
  for (int k = 0; k < 5; ++k) {
    const ActiveMesh mesh(build_background(ElementFamily::Quad, rep.bbox(), 0.1, U(rng), {U(rng), U(rng)}), rep);
    for (int ci = 0; ci < static_cast<int>(mesh.cells().size()); ++ci) {
      const ActiveCell& cell = mesh.cells()[static_cast<std::size_t>(ci)];
      if (!cell.cut) continue;
      double area = 0.0;
      for (const auto& l : cell.region.loops) {
        std::vector<Vec2> pts;
        for (const auto& s : l) pts.push_back(s.a);
        area += signed_area(pts);
      }
      const QuadRule rule = cut_cell_rule(cell.region, 4, MomentMode::Tensor);
      mesh_worst = std::max(mesh_worst, std::abs(rule.weight_sum() - area));
    }
  }
  r.check(mesh_worst <= 1e-13, fmt("ring cut cells on 5 random grids: weight sum minus shoelace area max %.3e", mesh_worst));
  return r;
}

// 7. Free-beam eigenvalue.
Report free_beam() {
  Report r;
  const double ref = 2.7063377630e7;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> hs, errs;
  for (int n : {2, 4, 8, 16}) {
    const FreeBeamResult fb = free_beam_eigen(GridSpec{ElementFamily::Quad, 0.3 / n, 0.0, {}}, 2);
    hs.push_back(0.3 / n);
    errs.push_back(std::abs(fb.sixth_with_rigid - ref));
    r.info(fmt("h=0.3/%d dofs=%d sixth eigenvalue counting rigid modes %.10e, sixth flexible %.10e", n, fb.dofs,
               fb.sixth_with_rigid, fb.sixth_flexible));
  }
  const double rel = errs.back() / ref;
  r.check(rel <= 5e-3, fmt("p=2 h=0.3/16: relative deviation from 2.7063377630e7 is %.3e (limit 5e-3)", rel));
  const double rate = slope(hs, errs);
  r.check(std::abs(rate - 4.0) <= 0.5, fmt("eigenvalue error rate over 3 refinements %.3f (target 4 +- 0.5)", rate));
  const double s = seconds_since(t0);
  r.check(s <= 300.0, fmt("runtime %.1f s (limit 300 s)", s));
  return r;
}

// 8. Frequency response.
Report frequency() {
  Report r;
  const Material mat;
  const Model model(make_beam_with_holes({}), GridSpec{ElementFamily::Quad, 0.05, 0.0, {}}, 2, mat);
  const System sys = model.assemble(gravity_load(mat));
  const Eigen::VectorXd us = solve_spd(sys.Ah, sys.L);
  const double step = 5.0;
  EigenOptions eo;
  eo.k = 3;
  const EigenResult er = generalized_eigs(sys.Ah, sys.Mh, eo);
  std::vector<double> omegas;
  const double top = 1.2 * std::sqrt(er.values[2]);
  for (int k = 0; k * step <= top; ++k) omegas.push_back(k * step);
  const auto sweep = frequency_sweep(sys, omegas);
  r.check(sweep[0].ok && sweep[0].energy == energy(sys.a, us),
          fmt("omega=0 energy %.17g equals the static energy %.17g", sweep[0].energy, energy(sys.a, us)));
  r.check((frequency_solve(sys, 0.0) - us).cwiseAbs().maxCoeff() == 0.0, "omega=0 solution equals the static solution");
  const auto peaks = sweep_peaks(sweep);
  for (int i = 0; i < 3; ++i) {
    const double w = std::sqrt(er.values[i]);
    double best = INFINITY;
    for (double pk : peaks) best = std::min(best, std::abs(pk - w));
    r.check(best <= step, fmt("sqrt(lambda_%d) = %.4f: nearest peak at distance %.4f (grid step %.1f)", i + 1, w, best, step));
  }
  return r;
}

// 9. Two-grid.
Report two_grid() {
  Report r;
  for (double H : {0.1, 0.05}) {
    TwoGridOptions o;
    o.p = 2;
    o.H = H;
    o.refine = 2;
    const TwoGridResult tg = two_grid_eigen(clamped_beam_domain(), o);
    const double e_tg = std::abs(tg.lambda_h - tg.lambda_direct), e_H = std::abs(tg.lambda_H - tg.lambda_direct);
    r.check(e_tg <= 0.25 * e_H, fmt("H=%g h=%g: |two-grid - fine| = %.4e, |coarse - fine| = %.4e, ratio %.3e", H, H / 2,
                                     e_tg, e_H, e_tg / e_H));
  }
  return r;
}

// 10. Fibre reinforcement.
Report fibres() {
  Report r;
  FibreDemoOptions o;
  o.fibre_load = false;
  const auto bulk = solve_fibre_config("bulk", {}, o);
  const auto trusses = solve_fibre_config("trusses", reference_trusses(), o);
  const auto beam = solve_fibre_config("beam", reference_beam(), o);
  std::vector<FibreSpec> both = reference_trusses();
  for (const auto& f : reference_beam()) both.push_back(f);
  const auto combined = solve_fibre_config("trusses+beam", both, o);
  for (const auto& c : {bulk, trusses, beam, combined})
    r.info(fmt("%s: compliance %.6e, tip deflection %.6e, energy balance %.3e", c.name.c_str(), c.compliance,
               c.tip_deflection, c.energy_balance));
  r.check(trusses.compliance < bulk.compliance,
          fmt("adding the trusses lowers compliance: %.6e -> %.6e", bulk.compliance, trusses.compliance));
  r.check(beam.compliance < trusses.compliance,
          fmt("replacing the trusses by the beam lowers it further: %.6e -> %.6e", trusses.compliance, beam.compliance));
  r.info(fmt("adding the beam on top of the trusses: %.6e -> %.6e", trusses.compliance, combined.compliance));
  double eb = 0.0;
  for (const auto& c : {bulk, trusses, beam, combined}) eb = std::max(eb, c.energy_balance);
  r.check(eb <= 1e-8, fmt("energy balance |u^T K u - f^T u| / |f^T u| max %.3e (limit 1e-8)", eb));
  // Crossing-point terms for fields with linear u.n along the beam.
  RectangleSpec rs;
  rs.hi = {4.0, 1.0};
  rs.dirichlet = {false, false, false, true};
  const BoundaryRep rep = make_rectangle(rs);
  const ActiveMesh mesh(build_background(ElementFamily::Quad, rep.bbox(), o.h, 0.0, {}), rep);
  const FESpace space(mesh, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& f : reference_beam()) {
    const FibreMesh fm = decompose_fibre(mesh, f);
    const double beta = 10.0 * 4, ei = f.modulus * f.inertia();
    for (int trial = 0; trial < 10; ++trial) {
      const double c0 = U(rng), c1 = U(rng), c2 = U(rng);
      const Eigen::VectorXd u = space.interpolate([&](const Vec2& x) {
        const double s = dot(x - f.a, f.tangent());
        return (c0 + c1 * s) * f.normal() + (c2 * x.y * x.x) * f.tangent();
      });
      double terms = 0.0;
      for (const auto& pj : beam_point_values(space, f, fm, u))
        terms += std::abs(2 * pj.moment * pj.rotation_jump) + beta * ei / o.h * pj.rotation_jump * pj.rotation_jump;
      worst = std::max(worst, terms);
    }
  }
  r.check(worst <= 1e-18, fmt("CDG crossing-point terms for linear u.n: max %.3e (limit 1e-18)", worst));
  return r;
}

// Banded random SPD matrix.
SpMat random_spd(int n, unsigned seed, double shift) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (P(rng) < 0.05 || j == i - 1) {
        const double v = U(rng);
        t.emplace_back(i, j, v);
        t.emplace_back(j, i, v);
        rows[i] += std::abs(v);
        rows[j] += std::abs(v);
      }
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, rows[i] + shift * (1.0 + P(rng)));
  SpMat B(n, n);
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

// 11. Solver oracles.
Report oracles() {
  Report r;
  double solve_err = 0.0, eig_err = 0.0, cond_err = 0.0;
  for (int n : {10, 50, 120, 200}) {
    for (unsigned seed = 0; seed < 3; ++seed) {
      const SpMat A = random_spd(n, 10 * seed + n, 1e-2);
      const SpMat M = random_spd(n, 1000 + 10 * seed + n, 2.0);
      const Eigen::MatrixXd Ad(A), Md(M);
      const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
      const Eigen::VectorXd x = solve_spd(A, b), xd = Ad.ldlt().solve(b);
      solve_err = std::max(solve_err, (x - xd).norm() / xd.norm());
      const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ge(Ad, Md);
      EigenOptions eo;
      eo.k = std::min(6, n - 1);
      eo.method = EigenMethod::Lanczos;
      eo.tol = 1e-12;
      const EigenResult er = generalized_eigs(A, M, eo);
      for (int i = 0; i < eo.k; ++i)
        eig_err = std::max(eig_err, std::abs(er.values[i] - ge.eigenvalues()[i]) / std::abs(ge.eigenvalues()[i]));
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Ad).eigenvalues().cwiseAbs();
      const double kref = ev.maxCoeff() / ev.minCoeff();
      const Condition c = condition_estimate(A, ConditionMethod::Lanczos);
      cond_err = std::max(cond_err, std::abs(c.kappa - kref) / kref);
    }
  }
  r.check(solve_err <= 1e-8, fmt("sparse solve vs dense LDL^T: max rel error %.3e", solve_err));
  r.check(eig_err <= 1e-8, fmt("Lanczos generalized eigenvalues vs dense: max rel error %.3e", eig_err));
  r.check(cond_err <= 1e-2, fmt("Lanczos condition number vs dense: max rel error %.3e", cond_err));
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only, expect_fail;
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::pair<std::string, std::function<Report()>>> criteria{
      {1, {"manufactured convergence", manufactured}},
      {2, {"patch test", patch}},
      {3, {"conditioning scaling", conditioning}},
      {4, {"worst-case sliver", sliver}},
      {5, {"ghost-penalty exactness", ghost}},
      {6, {"quadrature exactness", quadrature}},
      {7, {"free-beam eigenvalue", free_beam}},
      {8, {"frequency response", frequency}},
      {9, {"two-grid eigenvalue", two_grid}},
      {10, {"fibre reinforcement", fibres}},
      {11, {"solver oracles", oracles}},
  };
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  int unexpected = 0;
  for (const auto& [id, entry] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    try {
      rep = entry.second();
    } catch (const std::exception& e) {
      rep.check(false, std::string("exception: ") + e.what());
    }
    const bool known = expected.count(id) > 0;
    std::string note;
    if (!rep.pass && known) note = " (expected failure)";
    if (rep.pass && known) note = " (listed as expected failure)";
    if (rep.pass == known) ++unexpected;
    std::printf("%s criterion %d: %s [%.1f s]%s\n", rep.pass ? "PASS" : "FAIL", id, entry.first.c_str(),
                seconds_since(t0), note.c_str());
    for (const auto& l : rep.lines) std::printf("    %s\n", l.c_str());
  }
  return unexpected == 0 ? 0 : 1;
}
