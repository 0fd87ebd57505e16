#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "io.hpp"
#include "scenarios.hpp"

namespace cutfem::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

constexpr const char* kCommands[] = {"run-static", "run-freq",   "run-eig",     "two-grid",      "cond-table", "converge",
                                     "thin-demo",  "fibre-demo", "compound-demo", "dump-quadrature", nullptr};

// Typed access to the option object. Every key must be read by the command;
// leftovers are rejected so that misspelled options do not pass silently.
class Options {
 public:
  explicit Options(const json& j) : j_(j.is_null() ? json::object() : j) {
    require(j_.is_object(), ErrorCode::InvalidArgument, "options must be an object");
  }

  [[nodiscard]] bool has(const std::string& k) const { return j_.contains(k) && !j_.at(k).is_null(); }

  std::string str(const std::string& k, const std::string& def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }
  double num(const std::string& k, double def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (v.is_number()) return v.get<double>();
    require(v.is_string(), ErrorCode::InvalidArgument, "option --" + k + " must be a number");
    return parse_number(v.get<std::string>());
  }
  int integer(const std::string& k, int def) {
    const double v = num(k, def);
    require(v == std::round(v), ErrorCode::InvalidArgument, "option --" + k + " must be an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& k, bool def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (v.is_boolean()) return v.get<bool>();
    const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    fail(ErrorCode::InvalidArgument, "option --" + k + " must be true or false");
  }
  std::vector<int> ints(const std::string& k, std::vector<int> def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (v.is_number_integer()) return {v.get<int>()};
    if (v.is_array()) return v.get<std::vector<int>>();
    return parse_int_list(v.get<std::string>());
  }
  std::vector<double> nums(const std::string& k, std::vector<double> def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) return v.get<std::vector<double>>();
    return parse_double_list(v.get<std::string>());
  }
  std::vector<std::string> words(const std::string& k, std::vector<std::string> def) {
    if (!take(k)) return def;
    std::vector<std::string> out;
    std::stringstream ss(str(k, ""));
    std::string w;
    while (std::getline(ss, w, ',')) out.push_back(w);
    return out;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      require(std::find(read_.begin(), read_.end(), it.key()) != read_.end() || it.value().is_null(),
              ErrorCode::InvalidArgument, "option --" + it.key() + " is not used by this command");
  }
  [[nodiscard]] const json& raw() const { return j_; }

 private:
  bool take(const std::string& k) {
    read_.push_back(k);
    return has(k);
  }
  json j_;
  std::vector<std::string> read_;
};

// Shared state of one command invocation.
struct Context {
  std::string command;
  fs::path out;
  int jobs = 1;
  bool vtk = true;
  std::optional<RunConfig> config;
  std::string config_text;
  RunReport report;
  std::mutex mutex;

  void failed(const std::string& what) {
    std::lock_guard lock(mutex);
    if (report.failed++ == 0) report.message = what;
  }
};

void init_context(Context& ctx, const std::string& command, Options& o) {
  ctx.command = command;
  const std::string cfg = o.str("config", "");
  if (!cfg.empty()) {
    std::ifstream is(cfg);
    require(is.good(), ErrorCode::Io, "cannot read " + cfg);
    std::stringstream ss;
    ss << is.rdbuf();
    ctx.config_text = ss.str();
    try {
      ctx.config = parse_config(ctx.config_text);
    } catch (const Error& e) {
      fail(e.code(), cfg + ":" + e.what());
    }
  }
  ctx.out = o.str("out", ctx.config ? ctx.config->output : "out");
  ctx.jobs = std::max(1, o.integer("jobs", 1));
  ctx.vtk = o.flag("vtk", true);
  fs::create_directories(ctx.out);
}

// Runs f(0..n-1) on up to `jobs` threads; results keep their index. Failed
// items are reported and yield std::nullopt.
template <class F>
auto parallel_map(Context& ctx, int n, F f) -> std::vector<std::optional<decltype(f(0))>> {
  using R = decltype(f(0));
  std::vector<std::optional<R>> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = f(i);
      } catch (const std::exception& e) {
        ctx.failed(e.what());
      }
    }
  };
  const int threads = std::min(ctx.jobs, std::max(n, 1));
  std::vector<std::future<void>> pool;
  for (int t = 1; t < threads; ++t) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& t : pool) t.get();
  ctx.report.runs += n;
  return out;
}

void write_meta(Context& ctx, const Options& o, const json& extra = json::object()) {
  json meta;
  meta["command"] = ctx.command;
  meta["version"] = kVersion;
  meta["options"] = o.raw();
  if (ctx.config) meta["config"] = json::parse(ctx.config_text);
  meta["runs"] = ctx.report.runs;
  meta["failed"] = ctx.report.failed;
  if (!ctx.report.message.empty()) meta["first_failure"] = ctx.report.message;
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  std::ofstream os(ctx.out / "meta.json");
  require(os.good(), ErrorCode::Io, "cannot write meta.json");
  os << meta.dump(2) << '\n';
}

std::string tag(int p, double h, double theta) {
  std::ostringstream s;
  s << "p" << p << "_h" << format_double(h) << "_t" << format_double(theta);
  std::string r = s.str();
  std::replace(r.begin(), r.end(), '.', 'd');
  return r;
}

Material material_of(const Context& ctx) { return ctx.config ? ctx.config->material : Material{}; }
ElementFamily family_of(const Context& ctx, Options& o) {
  return parse_family(o.str("family", ctx.config ? family_name(ctx.config->family) : "quad"));
}
std::vector<int> ps_of(const Context& ctx, Options& o, std::vector<int> def) {
  return o.ints("p", ctx.config ? ctx.config->p : def);
}
std::vector<double> hs_of(const Context& ctx, Options& o, std::vector<double> def) {
  return o.nums("h", ctx.config ? ctx.config->h : def);
}
std::vector<double> thetas_of(const Context& ctx, Options& o) {
  return o.nums("theta", ctx.config ? ctx.config->theta : std::vector<double>{0.0});
}
Stabilization stab_of(const Context& ctx, const Material& mat, int p) {
  return ctx.config ? ctx.config->stabilization(p) : Stabilization::defaults(mat, p);
}

struct Run {
  int p;
  double h;
  double theta;
};
std::vector<Run> product(const std::vector<int>& ps, const std::vector<double>& hs, const std::vector<double>& ts) {
  std::vector<Run> runs;
  for (int p : ps)
    for (double t : ts)
      for (double h : hs) runs.push_back({p, h, t});
  return runs;
}

// ---------------------------------------------------------------------------

void cmd_static(Context& ctx, Options& o) {
  const auto runs = product(ps_of(ctx, o, {2}), hs_of(ctx, o, {0.1}), thetas_of(ctx, o));
  const ElementFamily fam = family_of(ctx, o);
  const Vec2 anchor = ctx.config ? ctx.config->anchor : Vec2{};
  o.finish();
  const Material mat = material_of(ctx);
  const Manufactured mf{mat};
  struct Row {
    int dofs;
    std::size_t cut;
    double energy, compliance, max_disp, l2;
  };
  auto rows = parallel_map(ctx, static_cast<int>(runs.size()), [&](int i) {
    const Run& r = runs[static_cast<std::size_t>(i)];
    const BoundaryRep rep = ctx.config ? ctx.config->geometry : manufactured_domain();
    const Model model(rep, GridSpec{fam, r.h, r.theta, anchor}, r.p, mat, stab_of(ctx, mat, r.p));
    const LoadData data = ctx.config ? ctx.config->load() : mf.load();
    const System sys = model.assemble(data);
    const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L);
    double max_disp = 0.0;
    for (int n = 0; n < model.space().num_nodes(); ++n)
      max_disp = std::max(max_disp, std::hypot(u[FESpace::dof(n, 0)], u[FESpace::dof(n, 1)]));
    const double l2 =
        ctx.config ? kNaN : l2_error(model.space(), model.rules(), u, [&](const Vec2& x) { return mf.displacement(x); });
    if (ctx.vtk) write_vtk((ctx.out / ("static_" + tag(r.p, r.h, r.theta) + ".vtk")).string(), {{&model.space(), mat, &u, {}}});
    return Row{model.num_dofs(), model.mesh().num_cut(), energy(sys.a, u), sys.L.dot(u), max_disp, l2};
  });
  CsvTable t({"family", "p", "h", "theta", "dofs", "cut_cells", "energy", "compliance", "max_displacement", "l2_error",
              "status"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    if (rows[i])
      t.add_row({family_name(fam), (long long)r.p, r.h, r.theta, (long long)rows[i]->dofs, (long long)rows[i]->cut,
                 rows[i]->energy, rows[i]->compliance, rows[i]->max_disp, rows[i]->l2, std::string("ok")});
    else
      t.add_row({family_name(fam), (long long)r.p, r.h, r.theta, 0LL, 0LL, kNaN, kNaN, kNaN, kNaN, std::string("failed")});
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_converge(Context& ctx, Options& o) {
  const std::string scenario = o.str("scenario", "manufactured");
  require(scenario == "manufactured", ErrorCode::InvalidArgument, "converge supports --scenario manufactured");
  const std::vector<int> ps = ps_of(ctx, o, {1, 2});
  std::vector<double> hs = hs_of(ctx, o, {1.0 / 8, 1.0 / 16, 1.0 / 32});
  const std::vector<double> ts = thetas_of(ctx, o);
  const std::vector<std::string> fams = o.words("family", {ctx.config ? family_name(ctx.config->family) : "quad"});
  const std::string variant = o.str("variant", "uniform");
  o.finish();
  require(variant == "uniform" || variant == "split", ErrorCode::InvalidArgument, "--variant is uniform or split");
  std::sort(hs.begin(), hs.end(), std::greater<>());
  struct Series {
    ElementFamily fam;
    int p;
    double theta;
  };
  std::vector<Series> series;
  for (const auto& f : fams)
    for (int p : ps)
      for (double t : ts) series.push_back({parse_family(f), p, t});
  const Material mat = material_of(ctx);
  auto res = parallel_map(ctx, static_cast<int>(series.size()), [&](int i) {
    const Series& s = series[static_cast<std::size_t>(i)];
    ConvergenceOptions co;
    co.family = s.fam;
    co.p = s.p;
    co.theta = s.theta;
    co.material = mat;
    co.variant = variant == "split" ? GhostVariant::Split : GhostVariant::Uniform;
    return manufactured_convergence(hs, co);
  });
  CsvTable t({"family", "p", "theta", "h", "dofs", "l2_error", "energy_error", "rate", "fitted_rate", "fit_residual",
              "status"});
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    if (!res[i]) {
      for (double h : hs)
        t.add_row({family_name(s.fam), (long long)s.p, s.theta, h, 0LL, kNaN, kNaN, kNaN, kNaN, kNaN, std::string("failed")});
      continue;
    }
    std::vector<double> x, y;
    for (const auto& r : *res[i]) {
      x.push_back(r.h);
      y.push_back(r.l2_error);
    }
    const RateFit fit = fit_rate(x, y, 3);
    for (const auto& r : *res[i])
      t.add_row({family_name(s.fam), (long long)s.p, s.theta, r.h, (long long)r.dofs, r.l2_error, r.energy_error, r.rate,
                 fit.rate, fit.residual, std::string("ok")});
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_cond(Context& ctx, Options& o) {
  const std::string variant = o.str("variant", "fitted");
  const double delta = o.num("delta", 1e-3);
  const std::vector<int> ps = ps_of(ctx, o, {1, 2});
  const std::vector<double> hs = hs_of(ctx, o, {0.1});
  const std::vector<double> ts = o.nums("theta", {kPi / 9});
  const ElementFamily fam = family_of(ctx, o);
  o.finish();
  MeshVariant mv;
  if (variant == "fitted")
    mv = MeshVariant::Fitted;
  else if (variant == "sliver")
    mv = MeshVariant::Sliver;
  else if (variant == "rotated")
    mv = MeshVariant::Rotated;
  else
    fail(ErrorCode::InvalidArgument, "--variant is fitted, sliver or rotated");
  const auto runs = product(ps, hs, mv == MeshVariant::Rotated ? ts : std::vector<double>{0.0});
  const Material mat = material_of(ctx);
  auto rows = parallel_map(ctx, static_cast<int>(runs.size()), [&](int i) {
    const Run& r = runs[static_cast<std::size_t>(i)];
    ConditionOptions co;
    co.variant = mv;
    co.family = fam;
    co.h = r.h;
    co.delta = delta;
    co.theta = r.theta;
    co.material = mat;
    return condition_row(r.p, co);
  });
  CsvTable t({"variant", "family", "p", "h", "theta", "dofs", "A_plain", "A_precond", "A_stabilized", "A_stab_precond",
              "M_plain", "M_precond", "M_stabilized", "M_stab_precond", "status"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    std::vector<CsvValue> row{variant, family_name(fam), (long long)r.p};
    if (rows[i]) {
      row.insert(row.end(), {rows[i]->h, r.theta, (long long)rows[i]->dofs});
      for (const auto& c : rows[i]->A) row.emplace_back(c.kappa);
      for (const auto& c : rows[i]->M) row.emplace_back(c.kappa);
      row.emplace_back(std::string("ok"));
    } else {
      row.insert(row.end(), {r.h, r.theta, 0LL});
      for (int k = 0; k < 8; ++k) row.emplace_back(kNaN);
      row.emplace_back(std::string("failed"));
    }
    t.add_row(std::move(row));
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

// "a:b:n" or a comma list.
std::vector<double> omega_grid(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_double_list(s);
  std::vector<double> parts;
  std::stringstream ss(s);
  std::string w;
  while (std::getline(ss, w, ':')) parts.push_back(parse_number(w));
  require(parts.size() == 3 && parts[2] >= 2 && parts[1] > parts[0], ErrorCode::InvalidArgument,
          "--omega expects start:stop:count");
  const int n = static_cast<int>(parts[2]);
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(parts[0] + (parts[1] - parts[0]) * k / (n - 1));
  return out;
}

void cmd_freq(Context& ctx, Options& o) {
  const int p = ps_of(ctx, o, {2}).front();
  const double h = hs_of(ctx, o, {0.05}).front();
  const double theta = thetas_of(ctx, o).front();
  const ElementFamily fam = family_of(ctx, o);
  std::vector<double> omegas;
  if (o.has("omega"))
    omegas = omega_grid(o.str("omega", ""));
  else if (ctx.config && !ctx.config->omega.empty())
    omegas = ctx.config->omega;
  else
    omegas = omega_grid("0:4000:401");
  const int modes = o.integer("modes", 3);
  o.finish();
  const Material mat = material_of(ctx);
  const BoundaryRep rep = ctx.config ? ctx.config->geometry : make_beam_with_holes({});
  const Model model(rep, GridSpec{fam, h, theta, ctx.config ? ctx.config->anchor : Vec2{}}, p, mat,
                    stab_of(ctx, mat, p));
  LoadData data = ctx.config ? ctx.config->load() : gravity_load(mat);
  if (ctx.config && !ctx.config->gravity && ctx.config->body_force == Vec2{} && ctx.config->traction == Vec2{})
    data = gravity_load(mat);
  const System sys = model.assemble(data);

  // Sweep points are independent solves.
  auto recs = parallel_map(ctx, static_cast<int>(omegas.size()), [&](int i) {
    return frequency_sweep(sys, std::span<const double>(&omegas[static_cast<std::size_t>(i)], 1)).front();
  });
  std::vector<SweepRecord> sweep;
  CsvTable st({"omega", "energy", "ok", "near_resonance"});
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    SweepRecord r = recs[i] ? *recs[i] : SweepRecord{omegas[i], kNaN, false, true};
    sweep.push_back(r);
    st.add_row({r.omega, r.energy, (long long)r.ok, (long long)r.near_resonance});
  }
  st.write((ctx.out / "sweep.csv").string());

  EigenOptions eo;
  eo.k = modes;
  const EigenResult er = generalized_eigs(sys.Ah, sys.Mh, eo);
  const std::vector<double> peaks = sweep_peaks(sweep);
  CsvTable et({"mode", "lambda", "omega", "nearest_peak", "grid_step"});
  const double step = omegas.size() > 1 ? omegas[1] - omegas[0] : kNaN;
  for (int k = 0; k < modes; ++k) {
    const double w = std::sqrt(er.values[k]);
    double best = kNaN;
    for (double pk : peaks)
      if (std::isnan(best) || std::abs(pk - w) < std::abs(best - w)) best = pk;
    et.add_row({(long long)(k + 1), er.values[k], w, best, step});
  }
  et.write((ctx.out / "eigen.csv").string());
  CsvTable t({"family", "p", "h", "theta", "dofs", "points", "failed_points", "peaks", "static_energy"});
  long long bad = 0;
  for (const auto& r : sweep) bad += r.ok ? 0 : 1;
  t.add_row({family_name(fam), (long long)p, h, theta, (long long)model.num_dofs(), (long long)sweep.size(), bad,
             (long long)peaks.size(), energy(sys.a, solve_spd(sys.Ah, sys.L))});
  t.write((ctx.out / "summary.csv").string());
  if (ctx.vtk) {
    const Eigen::VectorXd u = solve_spd(sys.Ah, sys.L);
    write_vtk((ctx.out / "static.vtk").string(), {{&model.space(), mat, &u, {}}});
  }
  write_meta(ctx, o);
}

void cmd_eig(Context& ctx, Options& o) {
  const auto runs = product(ps_of(ctx, o, {2}), hs_of(ctx, o, {0.3 / 16}), thetas_of(ctx, o));
  const ElementFamily fam = family_of(ctx, o);
  const int k = o.integer("k", ctx.config ? ctx.config->eigen_count : 6);
  o.finish();
  require(k >= 1, ErrorCode::InvalidArgument, "--k must be positive");
  const Material mat = material_of(ctx);
  const BoundaryRep rep = ctx.config ? ctx.config->geometry : free_beam_domain();
  const bool free = !rep.has_dirichlet();
  struct Out {
    int dofs;
    std::vector<double> values, residuals;
    double rigid_max;
  };
  auto res = parallel_map(ctx, static_cast<int>(runs.size()), [&](int i) {
    const Run& r = runs[static_cast<std::size_t>(i)];
    const Model model(rep, GridSpec{fam, r.h, r.theta, ctx.config ? ctx.config->anchor : Vec2{}}, r.p, mat,
                      stab_of(ctx, mat, r.p));
    const System sys = model.assemble();
    EigenOptions eo;
    eo.k = k;
    Out out{model.num_dofs(), {}, {}, 0.0};
    Eigen::MatrixXd Y;
    if (free) {
      Y = rigid_body_basis(model.space(), sys.Mh);
      for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXd y = Y.col(c);
        out.rigid_max = std::max(out.rigid_max, std::abs(y.dot(sys.Ah * y) / y.dot(sys.Mh * y)));
      }
    }
    const EigenResult er = generalized_eigs(sys.Ah, sys.Mh, eo, free ? &Y : nullptr);
    for (Eigen::Index j = 0; j < er.values.size(); ++j) {
      out.values.push_back(er.values[j]);
      out.residuals.push_back(er.residuals[j]);
    }
    return out;
  });
  CsvTable ev({"family", "p", "h", "theta", "index", "index_with_rigid", "lambda", "omega", "residual"});
  CsvTable t({"family", "p", "h", "theta", "dofs", "free", "rigid_max", "lambda_1", "sixth_with_rigid", "sixth_flexible",
              "status"});
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    if (!res[i]) {
      t.add_row({family_name(fam), (long long)r.p, r.h, r.theta, 0LL, (long long)free, kNaN, kNaN, kNaN, kNaN,
                 std::string("failed")});
      continue;
    }
    const Out& out = *res[i];
    for (std::size_t j = 0; j < out.values.size(); ++j)
      ev.add_row({family_name(fam), (long long)r.p, r.h, r.theta, (long long)(j + 1),
                  (long long)(j + 1 + (free ? 3 : 0)), out.values[j], std::sqrt(std::max(out.values[j], 0.0)),
                  out.residuals[j]});
    auto at = [&](std::size_t j) { return j < out.values.size() ? out.values[j] : kNaN; };
    t.add_row({family_name(fam), (long long)r.p, r.h, r.theta, (long long)out.dofs, (long long)free,
               free ? out.rigid_max : kNaN, at(0), free ? at(2) : kNaN, at(5), std::string("ok")});
  }
  ev.write((ctx.out / "eigenvalues.csv").string());
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_two_grid(Context& ctx, Options& o) {
  const std::string geometry = o.str("geometry", ctx.config ? "config" : "clamped_beam");
  const double H = o.num("H", 0.1);
  const std::vector<double> hs = o.nums("h", {H / 2});
  const std::vector<int> modes = o.ints("mode", {1});
  const int p = ps_of(ctx, o, {2}).front();
  const ElementFamily fam = family_of(ctx, o);
  const double theta = thetas_of(ctx, o).front();
  const bool literal = o.flag("literal", false);
  const bool direct = o.flag("direct", true);
  o.finish();
  BoundaryRep rep;
  if (geometry == "clamped_beam")
    rep = clamped_beam_domain();
  else if (geometry == "ring")
    rep = make_ring({});
  else if (geometry == "config")
    rep = ctx.config.value().geometry;
  else
    fail(ErrorCode::InvalidArgument, "--geometry is clamped_beam, ring or config");
  struct Item {
    double h;
    int mode;
  };
  std::vector<Item> items;
  for (double h : hs)
    for (int m : modes) items.push_back({h, m});
  for (const auto& it : items) refinement_ratio(H, it.h);  // reject before running
  const Material mat = material_of(ctx);
  auto res = parallel_map(ctx, static_cast<int>(items.size()), [&](int i) {
    const Item& it = items[static_cast<std::size_t>(i)];
    TwoGridOptions to;
    to.family = fam;
    to.p = p;
    to.H = H;
    to.refine = refinement_ratio(H, it.h);
    to.theta = theta;
    to.mode = it.mode;
    to.free = !rep.has_dirichlet();
    to.literal = literal;
    to.direct = direct;
    to.material = mat;
    return two_grid_eigen(rep, to);
  });
  CsvTable t({"geometry", "family", "p", "H", "h", "ratio", "mode", "coarse_dofs", "fine_dofs", "lambda_H",
              "lambda_two_grid", "lambda_direct", "status"});
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    const long long ratio = refinement_ratio(H, it.h);
    if (res[i])
      t.add_row({geometry, family_name(fam), (long long)p, H, it.h, ratio, (long long)it.mode,
                 (long long)res[i]->coarse_dofs, (long long)res[i]->fine_dofs, res[i]->lambda_H, res[i]->lambda_h,
                 res[i]->lambda_direct, std::string("ok")});
    else
      t.add_row({geometry, family_name(fam), (long long)p, H, it.h, ratio, (long long)it.mode, 0LL, 0LL, kNaN, kNaN, kNaN,
                 std::string("failed")});
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_thin(Context& ctx, Options& o) {
  const std::vector<std::string> kinds = o.words("kind", {"cantilever", "ring"});
  const std::vector<int> ps = ps_of(ctx, o, {1, 2, 3});
  const std::vector<double> hs = o.nums("h", {});
  const ElementFamily fam = family_of(ctx, o);
  const double omega = o.num("omega", 100.0);
  const double thickness = o.num("thickness", 0.05);
  o.finish();
  struct Item {
    std::string kind;
    int p;
    double h;
  };
  std::vector<Item> items;
  for (const auto& k : kinds) {
    require(k == "cantilever" || k == "ring", ErrorCode::InvalidArgument, "--kind is cantilever or ring");
    const std::vector<double> hk = hs.empty() ? std::vector<double>{k == "ring" ? 0.05 : thickness / 2} : hs;
    for (int p : ps)
      for (double h : hk) items.push_back({k, p, h});
  }
  const Material mat = material_of(ctx);
  struct Out {
    int dofs;
    double value, torque;
  };
  auto res = parallel_map(ctx, static_cast<int>(items.size()), [&](int i) {
    const Item& it = items[static_cast<std::size_t>(i)];
    const GridSpec grid{fam, it.h, 0.0, {0.0031, 0.0017}};
    if (it.kind == "cantilever") {
      const CantileverResult r = thin_cantilever({1.0, thickness}, grid, it.p, mat);
      return Out{r.dofs, r.tip_deflection, kNaN};
    }
    const RingResult r = ring_centrifugal({}, grid, it.p, omega, mat);
    return Out{r.dofs, r.variation, r.net_torque};
  });
  CsvTable t({"kind", "family", "p", "h", "dofs", "indicator", "net_torque", "status"});
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Item& it = items[i];
    if (res[i])
      t.add_row({it.kind, family_name(fam), (long long)it.p, it.h, (long long)res[i]->dofs, res[i]->value,
                 res[i]->torque, std::string("ok")});
    else
      t.add_row({it.kind, family_name(fam), (long long)it.p, it.h, 0LL, kNaN, kNaN, std::string("failed")});
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o, {{"indicator", "cantilever: tip deflection (m); ring: (max - min) / |mean| midline radial displacement"}});
}

void cmd_fibre(Context& ctx, Options& o) {
  const std::vector<std::string> names = o.words("configs", {"bulk", "trusses", "beam"});
  FibreDemoOptions fo;
  fo.p = ps_of(ctx, o, {2}).front();
  fo.h = o.nums("h", {1.0 / 16}).front();
  fo.family = family_of(ctx, o);
  const std::vector<double> load = o.nums("load", {0.0, -1.0});
  fo.fibre_load = o.flag("fibre-load", true);
  o.finish();
  require(load.size() == 2, ErrorCode::InvalidArgument, "--load expects fx,fy");
  fo.load = {load[0], load[1]};
  auto fibres_of = [](const std::string& n) -> std::vector<FibreSpec> {
    if (n == "bulk") return {};
    if (n == "trusses") return reference_trusses();
    if (n == "beam") return reference_beam();
    if (n == "trusses+beam") {
      auto f = reference_trusses();
      const auto b = reference_beam();
      f.insert(f.end(), b.begin(), b.end());
      return f;
    }
    fail(ErrorCode::InvalidArgument, "unknown fibre configuration '" + n + "' (bulk, trusses, beam, trusses+beam)");
  };
  for (const auto& n : names) fibres_of(n);
  auto res = parallel_map(ctx, static_cast<int>(names.size()), [&](int i) {
    const std::string& n = names[static_cast<std::size_t>(i)];
    Eigen::VectorXd u;
    const auto fibres = fibres_of(n);
    FibreConfigResult r = solve_fibre_config(n, fibres, fo, &u);
    if (ctx.vtk) {
      RectangleSpec rs;
      rs.hi = {4.0, 1.0};
      rs.dirichlet = {false, false, false, true};
      const Model m(make_rectangle(rs), GridSpec{fo.family, fo.h, 0.0, {}}, fo.p, fo.bulk);
      std::string file = "fibre_" + n + ".vtk";
      std::replace(file.begin(), file.end(), '+', '_');
      write_vtk((ctx.out / file).string(), {{&m.space(), fo.bulk, &u, fibres}});
    }
    return r;
  });
  CsvTable t({"config", "p", "h", "dofs", "compliance", "tip_deflection", "energy_balance", "max_rotation_jump",
              "status"});
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (res[i])
      t.add_row({names[i], (long long)fo.p, fo.h, (long long)res[i]->dofs, res[i]->compliance, res[i]->tip_deflection,
                 res[i]->energy_balance, res[i]->max_rotation_jump, std::string("ok")});
    else
      t.add_row({names[i], (long long)fo.p, fo.h, 0LL, kNaN, kNaN, kNaN, kNaN, std::string("failed")});
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_compound(Context& ctx, Options& o) {
  const std::vector<double> ratios = o.nums("ratio", {1.0, 10.0});
  DrilledLOptions base;
  base.h = o.nums("h", {0.1}).front();
  base.p = ps_of(ctx, o, {2}).front();
  base.traction = o.num("traction", base.traction);
  const std::string penalty = o.str("penalty", "material");
  o.finish();
  require(penalty == "material" || penalty == "plain", ErrorCode::InvalidArgument, "--penalty is material or plain");
  base.coupling.penalty = penalty == "plain" ? InterfacePenalty::Plain : InterfacePenalty::Material;
  struct Out {
    int dofs;
    double compliance, single_compliance;
    std::array<InterfaceReport, 2> rep;
  };
  auto res = parallel_map(ctx, static_cast<int>(ratios.size()), [&](int i) {
    DrilledLOptions opt = base;
    opt.stiffness_ratio = ratios[static_cast<std::size_t>(i)];
    const CompoundProblem prob = drilled_lshape_compound(opt);
    const CompoundSolution sol = solve_compound(prob);
    Out out{static_cast<int>(sol.u.size()), sol.L.dot(sol.u), kNaN, {interface_report(sol, 0), interface_report(sol, 1)}};
    if (opt.stiffness_ratio == 1.0) {
      // Same body on one grid.
      const Model whole(drilled_lshape_whole(opt), GridSpec{ElementFamily::Quad, opt.h, 0.0, {0.023, 0.013}}, opt.p,
                        Material{});
      const System sys = whole.assemble(prob.loads[2]);
      out.single_compliance = sys.L.dot(solve_spd(sys.Ah, sys.L));
    }
    if (ctx.vtk) {
      std::vector<VtkPart> parts;
      std::vector<Eigen::VectorXd> us;
      for (std::size_t b = 0; b < sol.models.size(); ++b) us.push_back(sol.body_vector(static_cast<int>(b)));
      for (std::size_t b = 0; b < sol.models.size(); ++b)
        parts.push_back({&sol.models[b]->space(), sol.models[b]->material(), &us[b], {}});
      write_vtk((ctx.out / ("compound_ratio" + format_double(opt.stiffness_ratio) + ".vtk")).string(), parts);
    }
    return out;
  });
  CsvTable t({"ratio", "p", "h", "dofs", "compliance", "single_domain_compliance", "interface", "jump_l2", "trace_l2",
              "max_von_mises_jump", "max_von_mises", "status"});
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    for (int k = 0; k < 2; ++k) {
      const std::string name = k == 0 ? "corner|right" : "corner|top";
      if (res[i]) {
        const InterfaceReport& r = res[i]->rep[static_cast<std::size_t>(k)];
        t.add_row({ratios[i], (long long)base.p, base.h, (long long)res[i]->dofs, res[i]->compliance,
                   res[i]->single_compliance, name, r.jump_l2, r.trace_l2, r.max_von_mises_jump, r.max_von_mises,
                   std::string("ok")});
      } else {
        t.add_row({ratios[i], (long long)base.p, base.h, 0LL, kNaN, kNaN, name, kNaN, kNaN, kNaN, kNaN,
                   std::string("failed")});
      }
    }
  }
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

void cmd_quadrature(Context& ctx, Options& o) {
  const int p = ps_of(ctx, o, {2}).front();
  const double h = hs_of(ctx, o, {0.1}).front();
  const double theta = thetas_of(ctx, o).front();
  const ElementFamily fam = family_of(ctx, o);
  const bool matrices = o.flag("matrices", false);
  o.finish();
  const Material mat = material_of(ctx);
  const BoundaryRep rep = ctx.config ? ctx.config->geometry : manufactured_domain();
  const Model model(rep, GridSpec{fam, h, theta, ctx.config ? ctx.config->anchor : Vec2{}}, p, mat,
                    stab_of(ctx, mat, p));
  write_quadrature_csv((ctx.out / "quadrature.csv").string(), model.space(), model.rules());
  if (matrices) {
    const System sys = model.assemble(ctx.config ? ctx.config->load() : LoadData{});
    write_coo((ctx.out / "A.csv").string(), sys.Ah);
    write_coo((ctx.out / "M.csv").string(), sys.Mh);
    write_coo((ctx.out / "J.csv").string(), sys.J);
  }
  double wsum = 0.0;
  long long points = 0;
  for (const auto& c : model.rules().cells) {
    wsum += c.volume.weight_sum();
    points += static_cast<long long>(c.volume.size() + c.boundary.size());
  }
  ctx.report.runs += 1;
  CsvTable t({"family", "p", "h", "theta", "active_cells", "cut_cells", "points", "weight_sum", "domain_area"});
  t.add_row({family_name(fam), (long long)p, h, theta, (long long)model.mesh().cells().size(),
             (long long)model.mesh().num_cut(), points, wsum, rep.area()});
  t.write((ctx.out / "summary.csv").string());
  write_meta(ctx, o);
}

}  // namespace

const char* const* command_names() { return kCommands; }

RunReport run_command(const std::string& command, const json& options) {
  static const std::map<std::string, void (*)(Context&, Options&)> table{
      {"run-static", cmd_static},   {"run-freq", cmd_freq},     {"run-eig", cmd_eig},
      {"two-grid", cmd_two_grid},   {"cond-table", cmd_cond},   {"converge", cmd_converge},
      {"thin-demo", cmd_thin},      {"fibre-demo", cmd_fibre},  {"compound-demo", cmd_compound},
      {"dump-quadrature", cmd_quadrature}};
  const auto it = table.find(command);
  require(it != table.end(), ErrorCode::InvalidArgument, "unknown command '" + command + "'");
  Options o(options);
  Context ctx;
  init_context(ctx, command, o);
  it->second(ctx, o);
  return ctx.report;
}

}  // namespace cutfem::app
