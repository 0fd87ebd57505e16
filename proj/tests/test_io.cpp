#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "io.hpp"

using namespace cutfem;

namespace {

// Message of the Config error raised by parse_config, or "" if none.
std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Config);
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Io, ParseNumbersAndLists) {
  EXPECT_DOUBLE_EQ(parse_number("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_number("1/16"), 1.0 / 16);
  EXPECT_DOUBLE_EQ(parse_number("0.1/3"), 0.1 / 3);
  EXPECT_THROW(parse_number("abc"), Error);
  EXPECT_THROW(parse_number("1/0"), Error);
  EXPECT_EQ(parse_int_list("1..3"), (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(parse_int_list("1,4"), (std::vector<int>{1, 4}));
  const auto d = parse_double_list("1/8,0.5");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0], 0.125);
  EXPECT_EQ(parse_family("tri"), ElementFamily::Tri);
  EXPECT_EQ(family_name(ElementFamily::Quad), "quad");
  EXPECT_THROW(parse_family("hex"), Error);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(Io, ConfigGeometryKinds) {
  const RunConfig ring = parse_config(R"({"geometry": {"kind": "ring", "r_inner": 0.4, "r_outer": 1.0, "segments": 64}})");
  EXPECT_EQ(ring.geometry_kind, "ring");
  EXPECT_NEAR(ring.geometry.area(), M_PI * (1.0 - 0.16), 0.01);
  const RunConfig rect =
      parse_config(R"({"geometry": {"kind": "rectangle", "lo": [0, 0], "hi": [2, 1], "dirichlet": ["left"]},
                       "mesh": {"family": "tri", "p": [1, 2], "h": [0.1]}, "material": {"E": 1e9}})");
  EXPECT_NEAR(rect.geometry.area(), 2.0, 1e-14);
  EXPECT_EQ(rect.family, ElementFamily::Tri);
  EXPECT_EQ(rect.p, (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(rect.material.E, 1e9);
  const RunConfig loops = parse_config(
      R"({"geometry": {"kind": "loops", "loops": [{"vertices": [[0,0],[1,0],[1,1],[0,1]], "tags": "NNND"}]}})");
  EXPECT_NEAR(loops.geometry.area(), 1.0, 1e-14);
  for (const char* kind : {"rounded_lshape", "drilled_lshape", "beam_with_holes"}) {
    const RunConfig c = parse_config(std::string(R"({"geometry": {"kind": ")") + kind + "\"}}");
    EXPECT_GT(c.geometry.area(), 0.0) << kind;
  }
  const RunConfig sweep = parse_config(R"({"omega": {"start": 0, "stop": 10, "count": 11}, "load": {"gravity": true}})");
  ASSERT_EQ(sweep.omega.size(), 11u);
  EXPECT_DOUBLE_EQ(sweep.omega[3], 3.0);
  EXPECT_TRUE(sweep.gravity);
}

TEST(Io, ConfigErrorsNameTheLine) {
  const std::string unknown = config_error("{\n  \"geometry\": {\n    \"kind\": \"ring\",\n    \"r_outr\": 1.0\n  }\n}");
  EXPECT_NE(unknown.find("line 4"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("geometry.r_outr"), std::string::npos) << unknown;
  const std::string type = config_error("{\n  \"material\": {\n    \"E\": \"steel\"\n  }\n}");
  EXPECT_NE(type.find("line 3"), std::string::npos) << type;
  EXPECT_NE(type.find("material.E"), std::string::npos) << type;
  const std::string syntax = config_error("{\n  \"mesh\": {\n    \"p\": [1, 2,\n  }\n}");
  EXPECT_NE(syntax.find("JSON syntax error"), std::string::npos) << syntax;
  EXPECT_EQ(syntax.rfind("line ", 0), 0u) << syntax;
  EXPECT_NE(config_error(R"({"mesh": {"p": [7]}})").find("mesh.p"), std::string::npos);
  EXPECT_NE(config_error(R"({"geometry": {"kind": "blob"}})").find("geometry.kind"), std::string::npos);
  EXPECT_NE(config_error(R"({"material": {"nu": 0.5}})"), "");
}

TEST(Io, VtkCountsAreConsistent) {
  const BoundaryRep rep = make_ring({});
  for (auto fam : {ElementFamily::Quad, ElementFamily::Tri}) {
    const ActiveMesh mesh(build_background(fam, rep.bbox(), 0.25, 0.2), rep);
    const FESpace space(mesh, 2);
    const Eigen::VectorXd u = space.interpolate([](const Vec2& x) { return Vec2{x.y, -x.x}; });
    std::ostringstream os;
    write_vtk(os, {VtkPart{&space, Material{}, &u, {}}});
    const auto lines = lines_of(os.str());
    long points = -1, cells = -1, size = -1, types = -1, pdata = -1, cdata = -1;
    std::size_t cells_at = 0;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      std::istringstream ls(lines[k]);
      std::string key;
      ls >> key;
      if (key == "POINTS") ls >> points;
      if (key == "CELLS") {
        ls >> cells >> size;
        cells_at = k;
      }
      if (key == "CELL_TYPES") ls >> types;
      if (key == "POINT_DATA") ls >> pdata;
      if (key == "CELL_DATA") ls >> cdata;
    }
    ASSERT_GT(points, 0);
    EXPECT_EQ(cells, types);
    EXPECT_EQ(cells, cdata);
    EXPECT_EQ(points, pdata);
    // The CELLS block lists its size as the total number of integers.
    long ints = 0;
    for (long c = 0; c < cells; ++c) {
      std::istringstream ls(lines[cells_at + 1 + static_cast<std::size_t>(c)]);
      long n = 0, id = 0;
      ls >> n;
      ints += n + 1;
      for (long j = 0; j < n; ++j) {
        ls >> id;
        EXPECT_LT(id, points);
      }
    }
    EXPECT_EQ(ints, size);
  }
}

TEST(Io, CsvAndCooFiles) {
  CsvTable t({"name", "x", "n"});
  t.add_row({std::string("a"), 0.5, 3LL});
  EXPECT_THROW(t.add_row({0.5}), Error);
  std::ostringstream os;
  t.write(os);
  EXPECT_EQ(os.str(), "name,x,n\na,0.5,3\n");

  SpMat m(3, 3);
  m.insert(0, 0) = 2.0;
  m.insert(1, 2) = -1.0;
  m.insert(2, 1) = -1.0;
  const auto path = std::filesystem::temp_directory_path() / "cutfem_test_coo.csv";
  write_coo(path.string(), m);
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  const auto lines = lines_of(ss.str());
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "row,col,value");
  std::filesystem::remove(path);
  EXPECT_THROW(write_coo("/nonexistent/dir/m.csv", m), Error);
}
