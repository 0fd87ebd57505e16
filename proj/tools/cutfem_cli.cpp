// Command line front end. Every subcommand collects its options into a JSON
// object and hands it to cutfem_run.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cutfem.h"

namespace {

struct OptionSpec {
  const char* name;
  const char* help;
};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<OptionSpec> options;
};

const OptionSpec kConfig{"config", "JSON configuration file"};
const OptionSpec kP{"p", "polynomial orders, e.g. 2 or 1,2 or 1..3"};
const OptionSpec kH{"h", "mesh sizes, e.g. 0.1,1/16"};
const OptionSpec kTheta{"theta", "grid rotation angles (rad)"};
const OptionSpec kFamily{"family", "element family: quad or tri"};
const OptionSpec kVtk{"vtk", "write VTK files (true/false)"};

std::vector<CommandSpec> commands() {
  return {
      {"run-static", "static solve of a configuration (default: manufactured problem)",
       {kConfig, kP, kH, kTheta, kFamily, kVtk}},
      {"run-freq", "frequency response sweep under gravity load",
       {kConfig, kP, kH, kTheta, kFamily, kVtk, {"omega", "sweep grid start:stop:count or list (rad/s)"},
        {"modes", "number of eigenfrequencies reported"}}},
      {"run-eig", "smallest eigenvalues (default: free beam 3 x 0.3)",
       {kConfig, kP, kH, kTheta, kFamily, {"k", "number of eigenvalues"}}},
      {"two-grid", "two-grid eigenvalue estimate",
       {kConfig, kP, kTheta, kFamily, {"H", "coarse mesh size"}, {"h", "fine mesh sizes (H / integer)"},
        {"mode", "targeted eigenvalue indices (1-based)"}, {"geometry", "clamped_beam, ring or config"},
        {"literal", "use the ratio of norms instead of squared norms"}, {"direct", "also solve on the fine grid"}}},
      {"cond-table", "condition numbers of stiffness and mass matrices",
       {kConfig, kP, kH, kFamily, {"variant", "fitted, sliver or rotated"}, {"delta", "sliver fraction"},
        {"theta", "rotation angles of the rotated variant"}}},
      {"converge", "manufactured convergence study",
       {kConfig, kP, kH, kTheta, {"family", "element families, e.g. quad,tri"}, {"variant", "ghost penalty uniform or split"},
        {"scenario", "manufactured"}}},
      {"thin-demo", "thin cantilever and spinning ring",
       {kP, kH, kFamily, {"kind", "cantilever, ring or both"}, {"omega", "ring angular velocity (rad/s)"},
        {"thickness", "cantilever thickness (m)"}}},
      {"fibre-demo", "block reinforced by trusses and beams",
       {kP, kH, kFamily, kVtk, {"configs", "bulk, trusses, beam, trusses+beam"}, {"load", "body force fx,fy"},
        {"fibre-load", "apply the body force along fibres too"}}},
      {"compound-demo", "drilled L-shape glued from three independently meshed parts",
       {kP, kH, kVtk, {"ratio", "stiffness ratio corner / arms"}, {"traction", "top edge shear (Pa)"},
        {"penalty", "interface penalty: material or plain"}}},
      {"dump-quadrature", "quadrature points and optionally the assembled matrices",
       {kConfig, kP, kH, kTheta, kFamily, {"matrices", "also write A, M and J as triplets"}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut finite element elasticity"};
  app.set_help_flag("--help", "print help");
  app.set_version_flag("--version", std::string(cutfem_version()));
  app.require_subcommand(1);

  const auto specs = commands();
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> outs;
  std::map<std::string, int> jobs;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    auto& v = values[spec.name];
    for (const auto& opt : spec.options) sub->add_option(std::string("--") + opt.name, v[opt.name], opt.help);
    sub->add_option("--out", outs[spec.name], "output directory");
    sub->add_option("--jobs,-j", jobs[spec.name], "parallel runs")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& spec : specs) {
    CLI::App* sub = app.get_subcommand(spec.name);
    if (!sub->parsed()) continue;
    nlohmann::json opts = nlohmann::json::object();
    for (const auto& [k, v] : values[spec.name])
      if (sub->count("--" + k) > 0) opts[k] = v;
    if (sub->count("--out") > 0) opts["out"] = outs[spec.name];
    if (sub->count("--jobs") > 0) opts["jobs"] = jobs[spec.name];
    const int rc = cutfem_run(spec.name, opts.dump().c_str());
    if (rc != CUTFEM_OK) std::fprintf(stderr, "cutfem %s: %s\n", spec.name, cutfem_last_error());
    return rc;
  }
  return 1;
}
