#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace cutfem {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  require(os.good(), ErrorCode::Io, "cannot open " + path + " for writing");
  return os;
}

// Sample point of a VTK part: physical position and the active cell used to
// evaluate fields there.
struct VtkPoint {
  Vec2 x;
  int cell = -1;
};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

void write_vtk(std::ostream& os, const std::vector<VtkPart>& parts, const VtkOptions& opt) {
  std::vector<VtkPoint> points;
  std::vector<int> point_part;
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_types;
  std::vector<int> cell_body;
  std::vector<int> cell_kind;

  auto add_point = [&](int part, int cell, const Vec2& x) {
    points.push_back({x, cell});
    point_part.push_back(part);
    return static_cast<int>(points.size()) - 1;
  };

  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const VtkPart& part = parts[pi];
    require(part.space != nullptr, ErrorCode::InvalidArgument, "VTK part without a space");
    const ActiveMesh& mesh = part.space->mesh();
    const bool tri = mesh.background().family == ElementFamily::Tri;
    const int s = opt.subdivisions > 0 ? opt.subdivisions : std::max(1, part.space->order());
    const int ip = static_cast<int>(pi);
    for (std::size_t c = 0; c < mesh.cells().size(); ++c) {
      const ActiveCell& cell = mesh.cells()[c];
      const int ci = static_cast<int>(c);
      if (cell.region.empty()) {
        // Full cell: a lattice of s x s sub-cells in local coordinates.
        const std::vector<Vec2> lv = BackgroundMesh::local_vertices(mesh.background().family, cell.sub);
        auto local_at = [&](int a, int b) {
          const double u = static_cast<double>(a) / s;
          const double v = static_cast<double>(b) / s;
          if (!tri) return Vec2{u, v};
          // Barycentric lattice of the sub-triangle (lv[0], lv[1], lv[2]).
          return lv[0] + u * (lv[1] - lv[0]) + v * (lv[2] - lv[0]);
        };
        for (int b = 0; b < s; ++b) {
          for (int a = 0; a < s; ++a) {
            if (!tri) {
              std::vector<int> ids;
              for (const auto& [da, db] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}})
                ids.push_back(add_point(ip, ci, mesh.to_physical(ci, local_at(a + da, b + db))));
              cells.push_back(ids);
              cell_types.push_back(9);
            } else {
              if (a + b >= s) continue;
              cells.push_back({add_point(ip, ci, mesh.to_physical(ci, local_at(a, b))),
                               add_point(ip, ci, mesh.to_physical(ci, local_at(a + 1, b))),
                               add_point(ip, ci, mesh.to_physical(ci, local_at(a, b + 1)))});
              cell_types.push_back(5);
              if (a + b + 1 < s) {
                cells.push_back({add_point(ip, ci, mesh.to_physical(ci, local_at(a + 1, b))),
                                 add_point(ip, ci, mesh.to_physical(ci, local_at(a + 1, b + 1))),
                                 add_point(ip, ci, mesh.to_physical(ci, local_at(a, b + 1)))});
                cell_types.push_back(5);
              }
            }
          }
        }
        const auto added = static_cast<std::size_t>(s * s);  // both families
        cell_body.insert(cell_body.end(), added, ip);
        cell_kind.insert(cell_kind.end(), added, 0);
        continue;
      }
      for (const auto& loop : cell.region.loops) {
        std::vector<Vec2> poly;
        for (const auto& seg : loop) poly.push_back(seg.a);
        if (poly.size() < 3 || signed_area(poly) <= 0) continue;  // hole loops are not drawn
        std::vector<int> ids;
        for (const auto& x : poly) ids.push_back(add_point(ip, ci, x));
        cells.push_back(ids);
        cell_types.push_back(7);
        cell_body.push_back(ip);
        cell_kind.push_back(cell.cut ? 1 : 0);
      }
    }
    for (const auto& fb : part.fibres) {
      const FibreMesh fm = decompose_fibre(mesh, fb);
      for (const auto& piece : fm.pieces) {
        cells.push_back({add_point(ip, piece.cell, piece.a), add_point(ip, piece.cell, piece.b)});
        cell_types.push_back(3);
        cell_body.push_back(ip);
        cell_kind.push_back(2);
      }
    }
  }

  os << "# vtk DataFile Version 3.0\n" << opt.title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << points.size() << " double\n";
  for (const auto& p : points) os << format_double(p.x.x) << ' ' << format_double(p.x.y) << " 0\n";
  std::size_t total = 0;
  for (const auto& c : cells) total += c.size() + 1;
  os << "CELLS " << cells.size() << ' ' << total << '\n';
  for (const auto& c : cells) {
    os << c.size();
    for (int id : c) os << ' ' << id;
    os << '\n';
  }
  os << "CELL_TYPES " << cells.size() << '\n';
  for (int t : cell_types) os << t << '\n';

  os << "CELL_DATA " << cells.size() << "\nSCALARS body int 1\nLOOKUP_TABLE default\n";
  for (int b : cell_body) os << b << '\n';
  os << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (int k : cell_kind) os << k << '\n';

  os << "POINT_DATA " << points.size() << "\nVECTORS displacement double\n";
  std::vector<double> vm(points.size(), 0.0);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const VtkPart& part = parts[static_cast<std::size_t>(point_part[k])];
    Vec2 u{};
    if (part.u != nullptr && part.u->size() > 0) {
      const Vec2 loc = part.space->mesh().to_local(points[k].cell, points[k].x);
      u = part.space->value(*part.u, points[k].cell, loc);
      vm[k] = von_mises(stress(*part.space, part.material, *part.u, points[k].cell, loc), part.material.nu);
    }
    os << format_double(u.x) << ' ' << format_double(u.y) << " 0\n";
  }
  os << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
  for (double v : vm) os << format_double(v) << '\n';
}

void write_vtk(const std::string& path, const std::vector<VtkPart>& parts, const VtkOptions& opt) {
  std::ofstream os = open_out(path);
  write_vtk(os, parts, opt);
  require(os.good(), ErrorCode::Io, "failed writing " + path);
}

// ---------------------------------------------------------------------------

void CsvTable::add_row(std::vector<CsvValue> row) {
  require(row.size() == header_.size(), ErrorCode::InvalidArgument, "CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << header_[k];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
              os << format_double(v);
            else
              os << v;
          },
          row[k]);
    }
    os << '\n';
  }
}

void CsvTable::write(const std::string& path) const {
  std::ofstream os = open_out(path);
  write(os);
  require(os.good(), ErrorCode::Io, "failed writing " + path);
}

void write_coo(const std::string& path, const SpMat& m) {
  std::ofstream os = open_out(path);
  os << "row,col,value\n";
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      os << it.row() << ',' << it.col() << ',' << format_double(it.value()) << '\n';
  require(os.good(), ErrorCode::Io, "failed writing " + path);
}

void write_quadrature_csv(const std::string& path, const FESpace& space, const CellRules& rules) {
  CsvTable t({"cell", "kind", "x", "y", "weight", "nx", "ny"});
  const ActiveMesh& mesh = space.mesh();
  for (std::size_t c = 0; c < rules.cells.size(); ++c) {
    const int ci = static_cast<int>(c);
    const QuadRule& v = rules.cells[c].volume;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Vec2 x = mesh.to_physical(ci, v.points[k]);
      t.add_row({static_cast<long long>(c), std::string("volume"), x.x, x.y, v.weights[k], 0.0, 0.0});
    }
    const QuadRule& b = rules.cells[c].boundary;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const Vec2 x = mesh.to_physical(ci, b.points[k]);
      const bool dir = k < b.kinds.size() && b.kinds[k] == SegmentKind::DomainDirichlet;
      t.add_row({static_cast<long long>(c), std::string(dir ? "dirichlet" : "neumann"), x.x, x.y, b.weights[k],
                 b.normals[k].x, b.normals[k].y});
    }
  }
  t.write(path);
}

// ---------------------------------------------------------------------------
// Configuration.

double parse_number(const std::string& s) {
  auto one = [&](std::string_view t) {
    while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
    while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    require(ec == std::errc() && ptr == t.data() + t.size() && !t.empty(), ErrorCode::Config,
            "not a number: '" + s + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return one(s);
  const double den = one(std::string_view(s).substr(slash + 1));
  require(den != 0.0, ErrorCode::Config, "division by zero in '" + s + "'");
  return one(std::string_view(s).substr(0, slash)) / den;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  auto to_int = [&](const std::string& t) {
    const double v = parse_number(t);
    require(v == std::round(v), ErrorCode::Config, "not an integer: '" + t + "'");
    return static_cast<int>(v);
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    const int a = to_int(item.substr(0, dots));
    const int b = to_int(item.substr(dots + 2));
    require(a <= b, ErrorCode::Config, "empty range '" + item + "'");
    for (int k = a; k <= b; ++k) out.push_back(k);
  }
  require(!out.empty(), ErrorCode::Config, "empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  require(!out.empty(), ErrorCode::Config, "empty number list");
  return out;
}

ElementFamily parse_family(const std::string& s) {
  if (s == "quad" || s == "Q") return ElementFamily::Quad;
  if (s == "tri" || s == "T") return ElementFamily::Tri;
  fail(ErrorCode::Config, "unknown element family '" + s + "' (quad or tri)");
}

std::string family_name(ElementFamily f) { return f == ElementFamily::Quad ? "quad" : "tri"; }

Stabilization RunConfig::stabilization(int p) const {
  Stabilization s = Stabilization::defaults(material, p);
  if (gamma_m) s.gamma_m = *gamma_m;
  if (gamma_a) s.gamma_a = *gamma_a;
  if (beta) s.beta = *beta;
  s.variant = variant;
  s.ghost = ghost;
  return s;
}

LoadData RunConfig::load() const {
  LoadData d;
  Vec2 f = body_force;
  if (gravity) f.y -= material.rho * 9.81;
  d.f = [f](const Vec2&) { return f; };
  const Vec2 t = traction;
  if (t.x != 0.0 || t.y != 0.0) d.g_n = [t](const Vec2&, const Vec2&) { return t; };
  return d;
}

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Reads one JSON object and reports problems against the line of the key.
class Reader {
 public:
  Reader(const std::string& text, const json& obj, std::string path) : text_(text), obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) error(path_.empty() ? "" : path_, "expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

  const json& get(const std::string& key) {
    seen_.push_back(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_number(v.get<std::string>());
      } catch (const Error&) {
      }
    }
    error(key, "must be a number");
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number_integer()) error(key, "must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) error(key, "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_string()) error(key, "must be a string");
    return v.get<std::string>();
  }

  Vec2 vec2(const std::string& key, Vec2 fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      error(key, "must be a pair of numbers [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    std::vector<double> out;
    auto item = [&](const json& e) {
      if (e.is_number()) return e.get<double>();
      if (e.is_string()) {
        try {
          return parse_number(e.get<std::string>());
        } catch (const Error&) {
        }
      }
      error(key, "entries must be numbers or fractions like \"1/16\"");
    };
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(item(e));
    } else {
      out.push_back(item(v));
    }
    if (out.empty()) error(key, "must not be empty");
    return out;
  }

  std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    std::vector<int> out;
    if (v.is_number_integer()) return {v.get<int>()};
    if (v.is_string()) {
      try {
        return parse_int_list(v.get<std::string>());
      } catch (const Error&) {
        error(key, "must be an integer list like [1, 2] or \"1..5\"");
      }
    }
    if (!v.is_array()) error(key, "must be an integer list");
    for (const auto& e : v) {
      if (!e.is_number_integer()) error(key, "entries must be integers");
      out.push_back(e.get<int>());
    }
    if (out.empty()) error(key, "must not be empty");
    return out;
  }

  Reader child(const std::string& key) { return Reader(text_, get(key), qualified(key)); }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) error(it.key(), "unknown key");
  }

  [[noreturn]] void error(const std::string& key, const std::string& what) const {
    fail(ErrorCode::Config, "line " + std::to_string(line_of_key(key)) + ": '" + qualified(key) + "' " + what);
  }

 private:
  [[nodiscard]] std::string qualified(const std::string& key) const {
    if (path_.empty()) return key;
    if (key.empty()) return path_;
    return path_ + "." + key;
  }

  // First line where "key" appears as an object key; the enclosing path is
  // used to start the search after the parent key.
  [[nodiscard]] int line_of_key(const std::string& key) const {
    std::size_t from = 0;
    std::string rest = qualified(key);
    std::size_t pos = std::string::npos;
    while (!rest.empty()) {
      const auto dot = rest.find('.');
      const std::string part = rest.substr(0, dot);
      rest = dot == std::string::npos ? "" : rest.substr(dot + 1);
      const std::regex re("\"" + std::regex_replace(part, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                          "\"\\s*:");
      std::smatch m;
      const std::string tail = text_.substr(from);
      if (!std::regex_search(tail, m, re)) break;
      pos = from + static_cast<std::size_t>(m.position(0));
      from = pos + 1;
    }
    return pos == std::string::npos ? 1 : line_of_offset(text_, pos);
  }

  const std::string& text_;
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

BoundaryTag parse_tag(Reader& r, const std::string& key, const std::string& t) {
  if (t == "D" || t == "dirichlet") return BoundaryTag::Dirichlet;
  if (t == "N" || t == "neumann") return BoundaryTag::Neumann;
  r.error(key, "tags must be \"D\"/\"dirichlet\" or \"N\"/\"neumann\"");
}

BoundaryRep parse_geometry(Reader& g, std::string& kind) {
  kind = g.string("kind", "rectangle");
  BoundaryRep rep;
  if (kind == "rectangle") {
    RectangleSpec s;
    s.lo = g.vec2("lo", s.lo);
    s.hi = g.vec2("hi", s.hi);
    if (g.has("dirichlet")) {
      const json& d = g.get("dirichlet");
      if (!d.is_array()) g.error("dirichlet", "must be a list of sides (bottom, right, top, left)");
      s.dirichlet = {false, false, false, false};
      const std::array<std::string, 4> names{"bottom", "right", "top", "left"};
      for (const auto& e : d) {
        const auto it = e.is_string() ? std::find(names.begin(), names.end(), e.get<std::string>()) : names.end();
        if (it == names.end()) g.error("dirichlet", "sides must be bottom, right, top or left");
        s.dirichlet[static_cast<std::size_t>(it - names.begin())] = true;
      }
    }
    rep = make_rectangle(s);
  } else if (kind == "ring") {
    RingSpec s;
    s.center = g.vec2("center", s.center);
    s.r_inner = g.number("r_inner", s.r_inner);
    s.r_outer = g.number("r_outer", s.r_outer);
    s.segments = g.integer("segments", s.segments);
    s.dirichlet_outer = g.boolean("dirichlet_outer", s.dirichlet_outer);
    s.dirichlet_inner = g.boolean("dirichlet_inner", s.dirichlet_inner);
    rep = make_ring(s);
  } else if (kind == "rounded_lshape" || kind == "drilled_lshape") {
    LShapeSpec s;
    s.width = g.number("width", s.width);
    s.arm = g.number("arm", s.arm);
    s.radius = g.number("radius", s.radius);
    s.segments = g.integer("segments", kind == "drilled_lshape" ? 40 : s.segments);
    rep = kind == "rounded_lshape" ? make_rounded_lshape(s) : make_drilled_lshape(s);
  } else if (kind == "beam_with_holes") {
    BeamWithHolesSpec s;
    s.length = g.number("length", s.length);
    s.height = g.number("height", s.height);
    s.holes = g.integer("holes", s.holes);
    s.radius = g.number("radius", s.radius);
    s.vertical_offset = g.number("vertical_offset", s.vertical_offset);
    s.segments = g.integer("segments", s.segments);
    rep = make_beam_with_holes(s);
  } else if (kind == "loops") {
    if (!g.has("loops")) g.error("loops", "is required for kind \"loops\"");
    const json& ls = g.get("loops");
    if (!ls.is_array() || ls.empty()) g.error("loops", "must be a non-empty list of loops");
    std::vector<BoundaryLoop> loops;
    for (const auto& l : ls) {
      BoundaryLoop loop;
      const json* verts = &l;
      const json* tags = nullptr;
      if (l.is_object()) {
        for (auto it = l.begin(); it != l.end(); ++it)
          if (it.key() != "vertices" && it.key() != "tags") g.error(it.key(), "unknown key in a loop");
        if (!l.contains("vertices")) g.error("loops", "each loop needs \"vertices\"");
        verts = &l.at("vertices");
        if (l.contains("tags")) tags = &l.at("tags");
      }
      if (!verts->is_array()) g.error("loops", "vertices must be a list of [x, y] pairs");
      for (const auto& v : *verts) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
          g.error("loops", "vertices must be [x, y] pairs");
        loop.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      }
      loop.tags.assign(loop.vertices.size(), BoundaryTag::Neumann);
      if (tags != nullptr) {
        std::vector<std::string> ts;
        if (tags->is_string()) {
          for (char ch : tags->get<std::string>()) ts.emplace_back(1, ch);
        } else if (tags->is_array()) {
          for (const auto& t : *tags) {
            if (!t.is_string()) g.error("tags", "entries must be strings");
            ts.push_back(t.get<std::string>());
          }
        } else {
          g.error("tags", "must be a string like \"DNNN\" or a list");
        }
        if (ts.size() != loop.vertices.size()) g.error("tags", "needs one tag per edge (edge k joins vertex k and k+1)");
        for (std::size_t k = 0; k < ts.size(); ++k) loop.tags[k] = parse_tag(g, "tags", ts[k]);
      }
      loops.push_back(std::move(loop));
    }
    try {
      rep = BoundaryRep(std::move(loops));
    } catch (const Error& e) {
      g.error("loops", std::string("invalid: ") + e.what());
    }
  } else {
    g.error("kind", "must be rectangle, ring, rounded_lshape, drilled_lshape, beam_with_holes or loops");
  }
  g.finish();
  return rep;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, "line " + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                                ": JSON syntax error: " + e.what());
  }
  RunConfig cfg;
  Reader r(text, root, "");
  if (r.has("geometry")) {
    Reader g = r.child("geometry");
    try {
      cfg.geometry = parse_geometry(g, cfg.geometry_kind);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Config) throw;
      g.error("", std::string("invalid: ") + e.what());
    }
  } else {
    cfg.geometry = make_rectangle({});
  }
  if (r.has("material")) {
    Reader m = r.child("material");
    cfg.material.E = m.number("E", cfg.material.E);
    cfg.material.nu = m.number("nu", cfg.material.nu);
    cfg.material.rho = m.number("rho", cfg.material.rho);
    m.finish();
    try {
      cfg.material.validate();
    } catch (const Error& e) {
      m.error("", std::string("invalid: ") + e.what());
    }
  }
  if (r.has("stabilization")) {
    Reader s = r.child("stabilization");
    if (s.has("gamma_m")) cfg.gamma_m = s.number("gamma_m", 0.0);
    if (s.has("gamma_a")) cfg.gamma_a = s.number("gamma_a", 0.0);
    if (s.has("beta")) cfg.beta = s.number("beta", 0.0);
    const std::string v = s.string("variant", "uniform");
    if (v == "uniform")
      cfg.variant = GhostVariant::Uniform;
    else if (v == "split")
      cfg.variant = GhostVariant::Split;
    else
      s.error("variant", "must be \"uniform\" or \"split\"");
    cfg.ghost = s.boolean("ghost", true);
    s.finish();
  }
  if (r.has("mesh")) {
    Reader m = r.child("mesh");
    const std::string fam = m.string("family", "quad");
    try {
      cfg.family = parse_family(fam);
    } catch (const Error&) {
      m.error("family", "must be \"quad\" or \"tri\"");
    }
    cfg.p = m.integers("p", cfg.p);
    for (int p : cfg.p)
      if (p < 1 || p > 5) m.error("p", "orders must lie in 1..5");
    cfg.h = m.numbers("h", cfg.h);
    for (double h : cfg.h)
      if (!(h > 0)) m.error("h", "mesh sizes must be positive");
    cfg.theta = m.numbers("theta", cfg.theta);
    cfg.anchor = m.vec2("anchor", cfg.anchor);
    m.finish();
  }
  if (r.has("load")) {
    Reader l = r.child("load");
    cfg.body_force = l.vec2("body_force", cfg.body_force);
    cfg.gravity = l.boolean("gravity", cfg.gravity);
    cfg.traction = l.vec2("traction", cfg.traction);
    l.finish();
  }
  if (r.has("omega")) {
    const json& o = root.at("omega");
    if (o.is_object()) {
      Reader w = r.child("omega");
      const double a = w.number("start", 0.0);
      const double b = w.number("stop", 0.0);
      const int n = w.integer("count", 2);
      if (n < 2 || !(b > a)) w.error("", "needs start < stop and count >= 2");
      w.finish();
      for (int k = 0; k < n; ++k) cfg.omega.push_back(a + (b - a) * k / (n - 1));
    } else {
      cfg.omega = r.numbers("omega", {});
    }
  }
  if (r.has("eigen")) {
    Reader e = r.child("eigen");
    cfg.eigen_count = e.integer("count", cfg.eigen_count);
    if (cfg.eigen_count < 1) e.error("count", "must be positive");
    e.finish();
  }
  cfg.output = r.string("output", cfg.output);
  r.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), ErrorCode::Io, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cutfem
