#include "devlab/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "devlab/hull.hpp"

namespace devlab::io {

namespace {

// Whitespace tokenizer with '#' line comments (OFF).
std::optional<std::string> next_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  return std::nullopt;
}

double token_double(std::istream& in, const char* what) {
  auto tok = next_token(in);
  if (!tok) throw ConfigError(std::string("unexpected end of file reading ") + what);
  try {
    size_t used = 0;
    double v = std::stod(*tok, &used);
    if (used != tok->size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("malformed number '") + *tok + "' in " + what);
  }
}

long token_long(std::istream& in, const char* what) {
  auto tok = next_token(in);
  if (!tok) throw ConfigError(std::string("unexpected end of file reading ") + what);
  try {
    size_t used = 0;
    long v = std::stol(*tok, &used);
    if (used != tok->size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("malformed integer '") + *tok + "' in " + what);
  }
}

void fan_triangulate(std::vector<std::array<int, 3>>& faces,
                     const std::vector<int>& poly) {
  for (size_t i = 1; i + 1 < poly.size(); ++i)
    faces.push_back({poly[0], poly[i], poly[i + 1]});
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(std::string("descriptor missing field '") + key + "'");
  return *it;
}

std::string lower_ext(const std::string& path) {
  size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (char& ch : ext) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

// === Mesh input =============================================================

MeshSpec read_off(std::istream& in) {
  auto magic = next_token(in);
  if (!magic || *magic != "OFF") throw ConfigError("not an OFF file (missing OFF header)");
  long nv = token_long(in, "OFF vertex count");
  long nf = token_long(in, "OFF face count");
  token_long(in, "OFF edge count");
  if (nv < 3 || nf < 1) throw ConfigError("OFF mesh too small");

  MeshSpec spec;
  spec.n_vertices = int(nv);
  std::vector<Vec3> pos(static_cast<size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    pos[size_t(i)].x = token_double(in, "OFF vertex");
    pos[size_t(i)].y = token_double(in, "OFF vertex");
    pos[size_t(i)].z = token_double(in, "OFF vertex");
  }
  for (long f = 0; f < nf; ++f) {
    long k = token_long(in, "OFF face size");
    if (k < 3) throw ConfigError("OFF face with fewer than 3 vertices");
    std::vector<int> poly(static_cast<size_t>(k));
    for (long i = 0; i < k; ++i) {
      long v = token_long(in, "OFF face index");
      if (v < 0 || v >= nv) throw ConfigError("OFF face index out of range");
      poly[size_t(i)] = int(v);
    }
    fan_triangulate(spec.faces, poly);
  }
  spec.positions = std::move(pos);
  return spec;
}

MeshSpec read_obj(std::istream& in) {
  MeshSpec spec;
  std::vector<Vec3> pos;
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z)) throw ConfigError("malformed OBJ vertex line");
      pos.push_back(p);
    } else if (word == "f") {
      std::vector<int> poly;
      std::string vert;
      while (ls >> vert) {
        size_t slash = vert.find('/');
        std::string head = slash == std::string::npos ? vert : vert.substr(0, slash);
        long v;
        try {
          size_t used = 0;
          v = std::stol(head, &used);
          if (used != head.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw ConfigError("malformed OBJ face index '" + vert + "'");
        }
        if (v < 1 || size_t(v) > pos.size())
          throw ConfigError("OBJ face index out of range (negative or forward references unsupported)");
        poly.push_back(int(v - 1));
      }
      if (poly.size() < 3) throw ConfigError("OBJ face with fewer than 3 vertices");
      fan_triangulate(spec.faces, poly);
    }
    // Other keywords (vn, vt, o, g, s, usemtl, mtllib) are ignored.
  }
  if (pos.size() < 3 || spec.faces.empty()) throw ConfigError("OBJ mesh too small");
  spec.n_vertices = int(pos.size());
  spec.positions = std::move(pos);
  return spec;
}

// === Descriptors ============================================================

Surface surface_from_json(const json& j) {
  std::string type = require(j, "type").get<std::string>();
  if (type == "plane") return make_plane();
  if (type == "half_plane") return make_half_plane();
  if (type == "flat_torus")
    return make_flat_torus(j.value("a", 1.0), j.value("b", 1.0));
  if (type == "sphere") return make_sphere(j.value("R", 1.0));
  if (type == "cone") {
    if (j.contains("rho")) return make_cone(j["rho"].get<double>());
    if (j.contains("alpha"))
      return make_cone(2 * kPi - j["alpha"].get<double>());
    throw ConfigError("cone descriptor needs 'rho' or 'alpha'");
  }
  if (type == "cube")
    return make_polyhedral(
        make_cube_mesh(j.value("edge", 1.0), j.value("subdiv", 1)));
  if (type == "doubled_square")
    return make_polyhedral(
        make_doubled_square_mesh(j.value("side", 1.0), j.value("n", 1)));
  if (type == "tetrahedron")
    return make_polyhedral(make_tetrahedron_mesh(j.value("edge", 1.0)));
  if (type == "icosphere")
    return make_polyhedral(
        make_icosphere_mesh(j.value("R", 1.0), j.value("level", 2)));
  if (type == "rect_grid")
    return make_polyhedral(make_rect_grid_mesh(j.value("w", 1.0),
                                               j.value("h", 1.0),
                                               j.value("nx", 1),
                                               j.value("ny", 1)));
  if (type == "doubled_polygon") {
    std::vector<Vec2> poly;
    for (const auto& row : require(j, "vertices"))
      poly.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    return make_polyhedral(double_polygon(poly));
  }
  if (type == "hull") {
    std::vector<Vec3> pts;
    for (const auto& row : require(j, "points"))
      pts.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                     row.at(2).get<double>()});
    return make_polyhedral(build_convex_hull_surface(pts));
  }
  if (type == "mesh")
    return load_surface(require(j, "path").get<std::string>());
  throw ConfigError("unknown surface type '" + type + "'");
}

Surface load_surface(const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "off" || ext == "obj") {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file: " + path);
    MeshSpec spec = ext == "off" ? read_off(in) : read_obj(in);
    return make_polyhedral(build_mesh(spec));
  }
  if (ext == "json") {
    json j;
    try {
      j = json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return surface_from_json(j);
  }
  throw ConfigError("unsupported surface file extension: " + path);
}

json surface_to_json(const Surface& s) {
  json j;
  switch (s.backend) {
    case Backend::plane:
      j["type"] = "plane";
      break;
    case Backend::half_plane:
      j["type"] = "half_plane";
      break;
    case Backend::flat_torus:
      j["type"] = "flat_torus";
      j["a"] = s.a;
      j["b"] = s.b;
      break;
    case Backend::sphere:
      j["type"] = "sphere";
      j["R"] = s.R;
      break;
    case Backend::cone:
      j["type"] = "cone";
      j["rho"] = s.rho;
      j["alpha"] = 2 * kPi - s.rho;
      break;
    case Backend::polyhedral: {
      const PolyhedralMesh& m = s.require_mesh();
      j["type"] = "mesh";
      j["n_vertices"] = m.n_vertices;
      j["n_faces"] = m.faces.size();
      j["total_area"] = m.total_area;
      j["convex_embedded"] = m.convex_embedded;
      j["has_boundary"] = m.has_boundary;
      j["has_spike_vertex"] = m.has_spike_vertex;
      break;
    }
  }
  return j;
}

SurfacePoint point_from_json(const json& j) {
  SurfacePoint p;
  p.face = j.value("face", -1);
  p.p.x = require(j, "x").get<double>();
  p.p.y = require(j, "y").get<double>();
  return p;
}

json point_to_json(const SurfacePoint& p) {
  json j;
  j["face"] = p.face;
  j["x"] = p.p.x;
  j["y"] = p.p.y;
  return j;
}

RegionSpec region_from_json(const json& j) {
  std::string kind = require(j, "kind").get<std::string>();
  if (kind == "whole") return RegionSpec::whole();
  if (kind == "ball")
    return RegionSpec::ball(point_from_json(require(j, "center")),
                            require(j, "radius").get<double>());
  if (kind == "vertex_ball")
    return RegionSpec::vertex_ball(require(j, "vertex").get<int>(),
                                   require(j, "radius").get<double>());
  if (kind == "boundary_strip")
    return RegionSpec::boundary_strip(require(j, "offset").get<double>());
  if (kind == "faces")
    return RegionSpec::faces(require(j, "ids").get<std::vector<int>>());
  throw ConfigError("unknown region kind '" + kind + "'");
}

json region_to_json(const RegionSpec& region) {
  json j;
  switch (region.kind) {
    case RegionSpec::Kind::whole:
      j["kind"] = "whole";
      break;
    case RegionSpec::Kind::ball:
      j["kind"] = "ball";
      j["center"] = point_to_json(region.center);
      j["radius"] = region.radius;
      break;
    case RegionSpec::Kind::vertex_ball:
      j["kind"] = "vertex_ball";
      j["vertex"] = region.vertex;
      j["radius"] = region.radius;
      break;
    case RegionSpec::Kind::boundary_strip:
      j["kind"] = "boundary_strip";
      j["offset"] = region.offset;
      break;
    case RegionSpec::Kind::faces:
      j["kind"] = "faces";
      j["ids"] = region.face_ids;
      break;
  }
  return j;
}

measures::MeasureSpec measure_from_json(const json& j) {
  std::string kind = require(j, "kind").get<std::string>();
  if (kind == "hausdorff") return measures::MeasureSpec::hausdorff();
  if (kind == "dirac")
    return measures::MeasureSpec::dirac(point_from_json(require(j, "point")));
  if (kind == "weighted")
    return measures::MeasureSpec::weighted(
        require(j, "density").get<std::vector<double>>());
  throw ConfigError("unknown measure kind '" + kind + "'");
}

json measure_to_json(const measures::MeasureSpec& spec) {
  json j;
  switch (spec.kind) {
    case measures::MeasureSpec::Kind::hausdorff:
      j["kind"] = "hausdorff";
      break;
    case measures::MeasureSpec::Kind::dirac:
      j["kind"] = "dirac";
      j["point"] = point_to_json(spec.point);
      break;
    case measures::MeasureSpec::Kind::weighted:
      j["kind"] = "weighted";
      j["density"] = spec.face_density;
      break;
  }
  return j;
}

// === Tensor fields ==========================================================

chart::TensorField builtin_tensor_field(const std::string& name, double a) {
  if (name == "identity")
    return [](Vec2) { return std::array<double, 3>{1.0, 0.0, 1.0}; };
  if (name == "conformal_bump")
    return [a](Vec2 p) {
      double rho2 = (norm2(p - Vec2{0.5, 0.5})) / (0.35 * 0.35);
      double bump = rho2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rho2)) : 0.0;
      double f = 1.0 + a * bump;
      return std::array<double, 3>{f, 0.0, f};
    };
  if (name == "linear")
    return [a](Vec2 p) { return std::array<double, 3>{1.0 + a * p.x, 0.0, 1.0}; };
  throw ConfigError("unknown tensor field '" + name + "'");
}

chart::TensorField tensor_field_from_csv(const std::string& path,
                                         double snap_tol) {
  if (!(snap_tol > 0)) throw ConfigError("tensor table: snap_tol must be positive");
  struct Row {
    Vec2 p;
    std::array<double, 3> g;
  };
  auto rows = std::make_shared<std::vector<Row>>();
  auto index = std::make_shared<std::map<std::pair<long long, long long>, size_t>>();

  std::istringstream in(read_text_file(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double x, y, g11, g12, g22;
    if (!(ls >> x >> y >> g11 >> g12 >> g22)) {
      if (first) {
        first = false;  // header line
        continue;
      }
      throw ConfigError("malformed tensor table row: " + line);
    }
    first = false;
    rows->push_back({{x, y}, {g11, g12, g22}});
  }
  if (rows->empty()) throw ConfigError("tensor table is empty: " + path);
  for (size_t i = 0; i < rows->size(); ++i) {
    auto key = std::make_pair(llround((*rows)[i].p.x / snap_tol),
                              llround((*rows)[i].p.y / snap_tol));
    (*index)[key] = i;
  }

  return [rows, index, snap_tol](Vec2 p) {
    long long qx = llround(p.x / snap_tol), qy = llround(p.y / snap_tol);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = index->find({qx + dx, qy + dy});
        if (it == index->end()) continue;
        const Row& row = (*rows)[it->second];
        if (std::abs(row.p.x - p.x) <= snap_tol &&
            std::abs(row.p.y - p.y) <= snap_tol)
          return row.g;
      }
    throw ConfigError("tensor table has no node near (" + format_double(p.x) +
                      ", " + format_double(p.y) + ")");
  };
}

// === Reports ================================================================

json estimate_to_json(const MeasureEstimate& e) {
  json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["n_samples"] = e.n_samples;
  j["method"] = method_name(e.method);
  return j;
}

json profile_to_json(const measures::DeviationProfile& p) {
  json j;
  j["region"] = region_to_json(p.region);
  json rows = json::array();
  for (const auto& row : p.rows) {
    json rj;
    rj["r"] = row.r;
    rj["V_r"] = row.vr.value;
    rj["se"] = row.vr.std_error;
    rj["V_r_over_r"] = row.v_over_r;
    rj["V_r_over_r2"] = row.v_over_r2;
    rj["method"] = method_name(row.vr.method);
    rj["seed"] = row.row_seed;
    rows.push_back(std::move(rj));
  }
  j["rows"] = std::move(rows);
  json fit;
  fit["c1"] = p.fit.c1;
  fit["c1_se"] = p.fit.c1_se;
  fit["c1_ci95"] = p.fit.c1_ci95;
  fit["c2"] = p.fit.c2;
  fit["c2_se"] = p.fit.c2_se;
  fit["c2_ci95"] = p.fit.c2_ci95;
  fit["cov"] = p.fit.cov;
  fit["chi2"] = p.fit.chi2;
  fit["dof"] = p.fit.dof;
  fit["chi2_threshold"] = p.fit.chi2_threshold;
  fit["unreliable"] = p.fit.unreliable;
  j["fit"] = std::move(fit);
  return j;
}

std::string profile_to_csv(const measures::DeviationProfile& p) {
  std::string out = "r,V_r,se,V_r_over_r,V_r_over_r2\n";
  for (const auto& row : p.rows) {
    out += format_double(row.r) + "," + format_double(row.vr.value) + "," +
           format_double(row.vr.std_error) + "," +
           format_double(row.v_over_r) + "," + format_double(row.v_over_r2) +
           "\n";
  }
  return out;
}

std::string flow_events_to_csv(const FlowResult& res) {
  std::string out = "event_index,time,face_id,edge_id,x,y,dir_x,dir_y\n";
  for (const auto& e : res.events) {
    out += std::to_string(e.index) + "," + format_double(e.time) + "," +
           std::to_string(e.face) + "," + std::to_string(e.edge) + "," +
           format_double(e.pos.x) + "," + format_double(e.pos.y) + "," +
           format_double(e.dir.x) + "," + format_double(e.dir.y) + "\n";
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const json& j) {
  uint64_t h = fnv1a(j.dump());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace devlab::io
