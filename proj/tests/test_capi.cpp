#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "cutfem.h"

namespace {

struct ModelPtr {
  cutfem_model* m = nullptr;
  ~ModelPtr() { cutfem_model_destroy(m); }
};

}  // namespace

TEST(CApi, VersionAndErrors) {
  EXPECT_STREQ(cutfem_version(), "0.1.0");
  EXPECT_EQ(cutfem_run("no-such-command", "{}"), CUTFEM_INVALID_ARGUMENT);
  EXPECT_NE(std::string(cutfem_last_error()).find("no-such-command"), std::string::npos);
  EXPECT_EQ(cutfem_run("run-static", "{not json"), CUTFEM_CONFIG);
  EXPECT_EQ(cutfem_model_num_dofs(nullptr, nullptr), CUTFEM_INVALID_ARGUMENT);
  ModelPtr bad;
  EXPECT_EQ(cutfem_model_rectangle(1.0, 0.0, 0.0, 1.0, CUTFEM_QUAD, 1, 0.1, 0.0, &bad.m), CUTFEM_INVALID_ARGUMENT);
  EXPECT_EQ(bad.m, nullptr);
  EXPECT_EQ(cutfem_model_from_config("{\n \"geometry\": {\"kind\": \"ring\", \"r_outr\": 1}\n}", &bad.m), CUTFEM_CONFIG);
  EXPECT_NE(std::string(cutfem_last_error()).find("line 2"), std::string::npos);
}

TEST(CApi, CantileverUnderGravity) {
  ModelPtr model;
  ASSERT_EQ(cutfem_model_rectangle(0.0, 0.0, 1.0, 0.1, CUTFEM_QUAD, 2, 0.05, 0.2, &model.m), CUTFEM_OK)
      << cutfem_last_error();
  int n = 0;
  ASSERT_EQ(cutfem_model_num_dofs(model.m, &n), CUTFEM_OK);
  EXPECT_GT(n, 0);
  double ux = 0, uy = 0;
  EXPECT_EQ(cutfem_model_displacement(model.m, 1.0, 0.05, &ux, &uy), CUTFEM_INVALID_ARGUMENT);  // not solved yet
  ASSERT_EQ(cutfem_model_set_load(model.m, 0.0, -7850 * 9.81, 0.0, 0.0), CUTFEM_OK);
  double e = 0;
  ASSERT_EQ(cutfem_model_solve_static(model.m, &e), CUTFEM_OK) << cutfem_last_error();
  EXPECT_GT(e, 0.0);
  ASSERT_EQ(cutfem_model_displacement(model.m, 1.0, 0.05, &ux, &uy), CUTFEM_OK);
  // Plane strain Euler-Bernoulli tip deflection q L^4 / (8 E' I).
  const double Ep = 200e9 / (1 - 0.09), I = 0.1 * 0.1 * 0.1 / 12, q = 7850 * 9.81 * 0.1;
  EXPECT_NEAR(uy, -q / (8 * Ep * I), 0.05 * q / (8 * Ep * I));
  std::vector<double> u(static_cast<std::size_t>(n));
  EXPECT_EQ(cutfem_model_get_solution(model.m, u.data(), u.size() - 1), CUTFEM_INVALID_ARGUMENT);
  EXPECT_EQ(cutfem_model_get_solution(model.m, u.data(), u.size()), CUTFEM_OK);
  double kappa = 0, kappa_scaled = 0;
  ASSERT_EQ(cutfem_model_condition(model.m, 0, &kappa), CUTFEM_OK);
  ASSERT_EQ(cutfem_model_condition(model.m, 1, &kappa_scaled), CUTFEM_OK);
  EXPECT_LT(kappa_scaled, kappa);
  double lam[3];
  ASSERT_EQ(cutfem_model_eigenvalues(model.m, 3, lam), CUTFEM_OK);
  EXPECT_GT(lam[0], 0.0);
  EXPECT_LE(lam[0], lam[1]);
  const auto vtk = std::filesystem::temp_directory_path() / "cutfem_capi.vtk";
  EXPECT_EQ(cutfem_model_write_vtk(model.m, vtk.string().c_str()), CUTFEM_OK);
  EXPECT_GT(std::filesystem::file_size(vtk), 0u);
  std::filesystem::remove(vtk);
}

TEST(CApi, ModelFromConfigAndRun) {
  ModelPtr model;
  const char* cfg = R"({"geometry": {"kind": "ring", "dirichlet_outer": true}, "mesh": {"p": [1], "h": [0.2]}})";
  ASSERT_EQ(cutfem_model_from_config(cfg, &model.m), CUTFEM_OK) << cutfem_last_error();
  double e = -1;
  ASSERT_EQ(cutfem_model_solve_static(model.m, &e), CUTFEM_OK);
  EXPECT_EQ(e, 0.0);  // no load
  const auto dir = std::filesystem::temp_directory_path() / "cutfem_capi_run";
  const std::string opts = R"({"out": ")" + dir.string() + R"(", "p": "1", "h": "0.25"})";
  ASSERT_EQ(cutfem_run("dump-quadrature", opts.c_str()), CUTFEM_OK) << cutfem_last_error();
  EXPECT_TRUE(std::filesystem::exists(dir / "quadrature.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "meta.json"));
  std::filesystem::remove_all(dir);
}
