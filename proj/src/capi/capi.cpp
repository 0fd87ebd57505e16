#include "cutfem.h"

#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "error.hpp"
#include "io.hpp"
#include "runner.hpp"
#include "scenarios.hpp"

struct cutfem_model {
  std::unique_ptr<cutfem::Model> model;
  cutfem::LoadData load;
  Eigen::VectorXd u;
};

namespace {

thread_local std::string g_last_error;

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs f and converts exceptions into status codes.
template <class F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const cutfem::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(CUTFEM_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CUTFEM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CUTFEM_INTERNAL, e.what());
  } catch (...) {
    return set_error(CUTFEM_INTERNAL, "unknown error");
  }
}

void check_handle(const void* p, const char* what) {
  cutfem::require(p != nullptr, cutfem::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* cutfem_version(void) { return cutfem::app::kVersion; }

const char* cutfem_last_error(void) { return g_last_error.c_str(); }

int cutfem_model_from_config(const char* json_text, cutfem_model** out) {
  return guarded([&] {
    check_handle(json_text, "json_text");
    check_handle(out, "out");
    *out = nullptr;
    const cutfem::RunConfig cfg = cutfem::parse_config(json_text);
    const int p = cfg.p.front();
    auto m = std::make_unique<cutfem_model>();
    m->model = std::make_unique<cutfem::Model>(cfg.geometry,
                                               cutfem::GridSpec{cfg.family, cfg.h.front(), cfg.theta.front(), cfg.anchor},
                                               p, cfg.material, cfg.stabilization(p));
    m->load = cfg.load();
    *out = m.release();
    return CUTFEM_OK;
  });
}

int cutfem_model_rectangle(double x0, double y0, double x1, double y1, cutfem_family family, int p, double h,
                           double theta, cutfem_model** out) {
  return guarded([&] {
    check_handle(out, "out");
    *out = nullptr;
    cutfem::require(family == CUTFEM_QUAD || family == CUTFEM_TRI, cutfem::ErrorCode::InvalidArgument,
                    "unknown element family");
    cutfem::RectangleSpec rs;
    rs.lo = {x0, y0};
    rs.hi = {x1, y1};
    rs.dirichlet = {false, false, false, true};
    const auto fam = family == CUTFEM_QUAD ? cutfem::ElementFamily::Quad : cutfem::ElementFamily::Tri;
    auto m = std::make_unique<cutfem_model>();
    m->model = std::make_unique<cutfem::Model>(cutfem::make_rectangle(rs), cutfem::GridSpec{fam, h, theta, {}}, p,
                                               cutfem::Material{});
    *out = m.release();
    return CUTFEM_OK;
  });
}

void cutfem_model_destroy(cutfem_model* model) { delete model; }

int cutfem_model_num_dofs(const cutfem_model* model, int* out) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(out, "out");
    *out = model->model->num_dofs();
    return CUTFEM_OK;
  });
}

int cutfem_model_set_load(cutfem_model* model, double fx, double fy, double tx, double ty) {
  return guarded([&] {
    check_handle(model, "model");
    const cutfem::Vec2 f{fx, fy}, t{tx, ty};
    model->load = {};
    model->load.f = [f](const cutfem::Vec2&) { return f; };
    model->load.g_n = [t](const cutfem::Vec2&, const cutfem::Vec2&) { return t; };
    return CUTFEM_OK;
  });
}

int cutfem_model_solve_static(cutfem_model* model, double* energy) {
  return guarded([&] {
    check_handle(model, "model");
    const cutfem::System sys = model->model->assemble(model->load);
    model->u = cutfem::solve_spd(sys.Ah, sys.L);
    if (energy) *energy = cutfem::energy(sys.a, model->u);
    return CUTFEM_OK;
  });
}

int cutfem_model_get_solution(const cutfem_model* model, double* values, size_t count) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(values, "values");
    cutfem::require(model->u.size() > 0, cutfem::ErrorCode::InvalidArgument, "no solution; call solve_static first");
    cutfem::require(count >= static_cast<size_t>(model->u.size()), cutfem::ErrorCode::InvalidArgument,
                    "buffer holds fewer than num_dofs values");
    std::memcpy(values, model->u.data(), sizeof(double) * static_cast<size_t>(model->u.size()));
    return CUTFEM_OK;
  });
}

int cutfem_model_displacement(const cutfem_model* model, double x, double y, double* ux, double* uy) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(ux, "ux");
    check_handle(uy, "uy");
    cutfem::require(model->u.size() > 0, cutfem::ErrorCode::InvalidArgument, "no solution; call solve_static first");
    const cutfem::Vec2 v = cutfem::point_value(*model->model, model->u, {x, y});
    *ux = v.x;
    *uy = v.y;
    return CUTFEM_OK;
  });
}

int cutfem_model_eigenvalues(const cutfem_model* model, int k, double* values) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(values, "values");
    cutfem::require(k >= 1, cutfem::ErrorCode::InvalidArgument, "k must be positive");
    const cutfem::System sys = model->model->assemble();
    cutfem::EigenOptions eo;
    eo.k = k;
    const cutfem::EigenResult er = cutfem::generalized_eigs(sys.Ah, sys.Mh, eo);
    for (int i = 0; i < k; ++i) values[i] = er.values[i];
    return CUTFEM_OK;
  });
}

int cutfem_model_condition(const cutfem_model* model, int scaled, double* kappa) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(kappa, "kappa");
    const cutfem::System sys = model->model->assemble();
    *kappa = cutfem::condition_estimate(scaled ? cutfem::diag_scale(sys.Ah).matrix : sys.Ah).kappa;
    return CUTFEM_OK;
  });
}

int cutfem_model_write_vtk(const cutfem_model* model, const char* path) {
  return guarded([&] {
    check_handle(model, "model");
    check_handle(path, "path");
    cutfem::write_vtk(std::string(path),
                      {{&model->model->space(), model->model->material(), model->u.size() ? &model->u : nullptr, {}}});
    return CUTFEM_OK;
  });
}

int cutfem_run(const char* command, const char* options_json) {
  return guarded([&] {
    check_handle(command, "command");
    const nlohmann::json opts =
        options_json && *options_json ? nlohmann::json::parse(options_json) : nlohmann::json::object();
    const cutfem::app::RunReport rep = cutfem::app::run_command(command, opts);
    if (rep.failed > 0)
      return set_error(CUTFEM_RUN_FAILED, std::to_string(rep.failed) + " of " + std::to_string(rep.runs) +
                                              " runs failed; first: " + rep.message);
    return static_cast<int>(CUTFEM_OK);
  });
}

}  // extern "C"
