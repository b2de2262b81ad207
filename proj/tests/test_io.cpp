// Mesh file parsing, JSON descriptors and round-trips, CSV report formats,
// tensor-field tables, and the hashing/format helpers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "devlab/common.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/io.hpp"
#include "devlab/measures.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"

using namespace devlab;
using io::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

const char* kTetraOff =
    "OFF\n"
    "# a regular-enough tetrahedron\n"
    "4 4 6\n"
    "0 0 0\n"
    "1 0 0\n"
    "0 1 0\n"
    "0 0 1\n"
    "3 0 2 1\n"
    "3 0 1 3\n"
    "3 1 2 3\n"
    "3 0 3 2\n";

}  // namespace

TEST_CASE("read_off: tetrahedron with comments, closed and curved") {
  std::istringstream in(kTetraOff);
  MeshSpec spec = io::read_off(in);
  CHECK(spec.n_vertices == 4);
  CHECK(spec.faces.size() == 4);
  REQUIRE(spec.positions.has_value());
  PolyhedralMesh m = build_mesh(spec);
  CHECK(!m.has_boundary);
  double defect = 0;
  for (int v = 0; v < m.n_vertices; ++v) defect += m.defect(v);
  CHECK(defect == doctest::Approx(4 * kPi).epsilon(1e-9));
}

TEST_CASE("read_off: polygon faces are fan-triangulated") {
  std::istringstream in(
      "OFF\n"
      "4 1 4\n"
      "0 0 0\n"
      "1 0 0\n"
      "1 1 0\n"
      "0 1 0\n"
      "4 0 1 2 3\n");
  MeshSpec spec = io::read_off(in);
  CHECK(spec.faces.size() == 2);
  PolyhedralMesh m = build_mesh(spec);
  CHECK(m.has_boundary);
  CHECK(m.total_area == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("read_off: malformed inputs are rejected") {
  std::istringstream no_header("4 4 6\n0 0 0\n");
  CHECK_THROWS_AS(io::read_off(no_header), ConfigError);
  std::istringstream truncated("OFF\n4 4 6\n0 0 0\n1 0 0\n");
  CHECK_THROWS_AS(io::read_off(truncated), ConfigError);
  std::istringstream bad_index(
      "OFF\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  CHECK_THROWS_AS(io::read_off(bad_index), ConfigError);
}

TEST_CASE("read_obj: slash forms, quads, ignored keywords, index checks") {
  std::istringstream in(
      "# comment\n"
      "o square\n"
      "v 0 0 0\n"
      "v 1 0 0\n"
      "v 1 1 0\n"
      "v 0 1 0\n"
      "vn 0 0 1\n"
      "vt 0 0\n"
      "s off\n"
      "f 1/1/1 2/2/1 3/3/1 4/4/1\n");
  MeshSpec spec = io::read_obj(in);
  CHECK(spec.n_vertices == 4);
  CHECK(spec.faces.size() == 2);
  PolyhedralMesh m = build_mesh(spec);
  CHECK(m.total_area == doctest::Approx(1.0).epsilon(1e-12));

  std::istringstream bad("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 -3\n");
  CHECK_THROWS_AS(io::read_obj(bad), ConfigError);
  std::istringstream fwd("v 0 0 0\nv 1 0 0\nf 1 2 3\nv 0 1 0\n");
  CHECK_THROWS_AS(io::read_obj(fwd), ConfigError);
}

TEST_CASE("surface descriptors: every type builds the right surface") {
  CHECK(io::surface_from_json(json{{"type", "plane"}}).backend ==
        Backend::plane);
  Surface torus = io::surface_from_json(json{{"type", "flat_torus"}});
  CHECK(torus.a == 1.0);
  CHECK(torus.b == 1.0);
  CHECK(io::surface_from_json(json{{"type", "sphere"}, {"R", 2.0}}).R == 2.0);

  Surface cone_rho =
      io::surface_from_json(json{{"type", "cone"}, {"rho", 3.0}});
  Surface cone_alpha =
      io::surface_from_json(json{{"type", "cone"}, {"alpha", 2 * kPi - 3.0}});
  CHECK(cone_rho.rho == doctest::Approx(cone_alpha.rho).epsilon(1e-12));

  Surface cube =
      io::surface_from_json(json{{"type", "cube"}, {"subdiv", 2}});
  CHECK(cube.require_mesh().faces.size() == 48);

  Surface ds = io::surface_from_json(
      json{{"type", "doubled_square"}, {"side", 2.0}, {"n", 1}});
  CHECK(ds.require_mesh().total_area == doctest::Approx(8.0).epsilon(1e-12));

  Surface tri = io::surface_from_json(
      json{{"type", "doubled_polygon"},
           {"vertices", json::array({json::array({0.0, 0.0}),
                                     json::array({1.0, 0.0}),
                                     json::array({0.0, 1.0})})}});
  CHECK(tri.require_mesh().total_area == doctest::Approx(1.0).epsilon(1e-12));

  Surface hull = io::surface_from_json(
      json{{"type", "hull"},
           {"points",
            json::array({json::array({0.0, 0.0, 0.0}),
                         json::array({1.0, 0.0, 0.0}),
                         json::array({0.0, 1.0, 0.0}),
                         json::array({0.0, 0.0, 1.0}),
                         json::array({0.25, 0.25, 0.25})})}});
  CHECK(hull.require_mesh().n_vertices == 4);
  CHECK(hull.require_mesh().convex_embedded);

  Surface grid = io::surface_from_json(json{
      {"type", "rect_grid"}, {"w", 2.0}, {"h", 1.0}, {"nx", 4}, {"ny", 2}});
  CHECK(grid.require_mesh().total_area == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(io::surface_from_json(json{{"type", "klein_bottle"}}),
                  ConfigError);
  CHECK_THROWS_AS(io::surface_from_json(json{{"type", "cone"}}), ConfigError);
  CHECK_THROWS_AS(io::surface_from_json(json{{"R", 1.0}}), ConfigError);
}

TEST_CASE("surface_to_json: analytic parameters and mesh summaries") {
  json sph = io::surface_to_json(make_sphere(2.0));
  CHECK(sph["type"] == "sphere");
  CHECK(sph["R"] == 2.0);

  json cone = io::surface_to_json(make_cone(3.0));
  CHECK(cone["rho"] == 3.0);
  CHECK(cone["alpha"].get<double>() ==
        doctest::Approx(2 * kPi - 3.0).epsilon(1e-12));

  json mesh = io::surface_to_json(make_polyhedral(make_cube_mesh(1.0, 1)));
  CHECK(mesh["type"] == "mesh");
  CHECK(mesh["n_faces"] == 12);
  CHECK(mesh["convex_embedded"] == true);
  CHECK(mesh["has_boundary"] == false);
}

TEST_CASE("load_surface: extension dispatch, mesh descriptor indirection") {
  std::string off_path = temp_path("devlab_io_test_tetra.off");
  io::write_text_file(off_path, kTetraOff);
  Surface s = io::load_surface(off_path);
  CHECK(s.require_mesh().faces.size() == 4);

  Surface via_json =
      io::surface_from_json(json{{"type", "mesh"}, {"path", off_path}});
  CHECK(via_json.require_mesh().faces.size() == 4);

  std::string json_path = temp_path("devlab_io_test_surface.json");
  io::write_text_file(json_path, json{{"type", "sphere"}, {"R", 3.0}}.dump());
  CHECK(io::load_surface(json_path).R == 3.0);

  CHECK_THROWS_AS(io::load_surface(temp_path("missing_file.off")),
                  ConfigError);
  CHECK_THROWS_AS(io::load_surface(temp_path("surface.xyz")), ConfigError);
  std::remove(off_path.c_str());
  std::remove(json_path.c_str());
}

TEST_CASE("point, region, and measure JSON round-trips") {
  SurfacePoint p;
  p.face = 5;
  p.p = {0.25, -1.5};
  SurfacePoint p2 = io::point_from_json(io::point_to_json(p));
  CHECK(p2.face == 5);
  CHECK(p2.p.x == 0.25);
  CHECK(p2.p.y == -1.5);

  for (RegionSpec reg :
       {RegionSpec::whole(), RegionSpec::ball(p, 0.4),
        RegionSpec::vertex_ball(3, 0.2), RegionSpec::boundary_strip(0.1),
        RegionSpec::faces({1, 4, 7})}) {
    json j = io::region_to_json(reg);
    RegionSpec back = io::region_from_json(j);
    CHECK(back.kind == reg.kind);
    CHECK(io::region_to_json(back).dump() == j.dump());
  }
  CHECK_THROWS_AS(io::region_from_json(json{{"kind", "annulus"}}),
                  ConfigError);

  for (measures::MeasureSpec spec :
       {measures::MeasureSpec::hausdorff(), measures::MeasureSpec::dirac(p),
        measures::MeasureSpec::weighted({1.0, 2.0, 3.0})}) {
    json j = io::measure_to_json(spec);
    measures::MeasureSpec back = io::measure_from_json(j);
    CHECK(back.kind == spec.kind);
    CHECK(io::measure_to_json(back).dump() == j.dump());
  }
  CHECK_THROWS_AS(io::measure_from_json(json{{"kind", "gaussian"}}),
                  ConfigError);
}

TEST_CASE("estimate JSON carries value, error, sample count, and method") {
  json j = io::estimate_to_json(analytic_estimate(2.5));
  CHECK(j["value"] == 2.5);
  CHECK(j["std_error"] == 0.0);
  CHECK(j["n_samples"] == 0);
  CHECK(j["method"] == "analytic");
}

TEST_CASE("CSV reports: headers and row counts") {
  measures::EstimatorConfig cfg;
  cfg.seed = 12;
  cfg.r0 = 0.2;
  cfg.ratio = 0.5;
  cfg.count = 3;
  measures::DeviationProfile p =
      measures::profile(make_flat_torus(1.0, 1.0), RegionSpec::whole(), cfg);
  std::string csv = io::profile_to_csv(p);
  CHECK(csv.rfind("r,V_r,se,V_r_over_r,V_r_over_r2\n", 0) == 0);
  size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 4);  // header + 3 rows

  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  TangentVector v;
  v.base = sample_uniform(cube, RegionSpec::whole(), 1, 5)[0];
  v.dir = {0.7, 0.3};
  FlowResult fr = geodesic_flow(cube, v, 3.0, /*record_events=*/true);
  std::string ev = io::flow_events_to_csv(fr);
  CHECK(ev.rfind("event_index,time,face_id,edge_id,x,y,dir_x,dir_y\n", 0) == 0);
  lines = 0;
  for (char ch : ev)
    if (ch == '\n') ++lines;
  CHECK(lines == fr.events.size() + 1);
}

TEST_CASE("format_double round-trips bit for bit; hashes are stable") {
  for (double v : {1.0 / 3, 0.1, -2.5e17, 3.14159265358979, 1e-300}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
  json a{{"x", 1}, {"y", json::array({1, 2, 3})}};
  json b{{"x", 2}, {"y", json::array({1, 2, 3})}};
  CHECK(io::hash_hex(a) == io::hash_hex(a));
  CHECK(io::hash_hex(a) != io::hash_hex(b));
  CHECK(io::hash_hex(a).size() == 16);
}

TEST_CASE("builtin tensor fields: identity, linear, compactly supported bump") {
  auto id = io::builtin_tensor_field("identity", 0.5);
  auto g = id({0.3, 0.7});
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 1.0);

  auto lin = io::builtin_tensor_field("linear", 0.1);
  CHECK(lin({0.5, 0.9})[0] == doctest::Approx(1.05).epsilon(1e-12));
  CHECK(lin({0.5, 0.9})[2] == 1.0);

  auto bump = io::builtin_tensor_field("conformal_bump", 0.04);
  auto center = bump({0.5, 0.5});
  CHECK(center[0] == doctest::Approx(1.04).epsilon(1e-12));
  CHECK(center[0] == center[2]);
  auto outside = bump({0.95, 0.95});
  CHECK(outside[0] == 1.0);

  CHECK_THROWS_AS(io::builtin_tensor_field("sinusoid", 0.1), ConfigError);
}

TEST_CASE("tensor tables: snapped lookups, headers, malformed rows") {
  std::string path = temp_path("devlab_io_test_tensor.csv");
  io::write_text_file(path,
                      "x,y,g11,g12,g22\n"
                      "# grid nodes\n"
                      "0,0,1,0,1\n"
                      "0.1,0,1.5,0.1,1.25\n"
                      "0,0.1,2,0,2\n");
  auto field = io::tensor_field_from_csv(path, 1e-3);
  auto g = field({0.1, 0.0});
  CHECK(g[0] == 1.5);
  CHECK(g[1] == 0.1);
  CHECK(g[2] == 1.25);
  auto snapped = field({0.1004, 0.0006});
  CHECK(snapped[0] == 1.5);
  CHECK_THROWS_AS(field({0.05, 0.05}), ConfigError);
  CHECK_THROWS_AS(io::tensor_field_from_csv(path, 0.0), ConfigError);

  std::string bad_path = temp_path("devlab_io_test_tensor_bad.csv");
  io::write_text_file(bad_path, "x,y,g11,g12,g22\n0,0,1,0,1\n0.1,oops\n");
  CHECK_THROWS_AS(io::tensor_field_from_csv(bad_path, 1e-3), ConfigError);

  std::string empty_path = temp_path("devlab_io_test_tensor_empty.csv");
  io::write_text_file(empty_path, "# nothing here\n");
  CHECK_THROWS_AS(io::tensor_field_from_csv(empty_path, 1e-3), ConfigError);
  std::remove(path.c_str());
  std::remove(bad_path.c_str());
  std::remove(empty_path.c_str());
}
