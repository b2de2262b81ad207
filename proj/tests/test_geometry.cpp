// Meshes, hulls, and surface primitives against closed-form geometry:
// angle-defect sums, areas, edge-curvature totals, hull correctness,
// analytic ball areas, and sampling determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/hull.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"
#include "helpers.hpp"

using namespace devlab;

namespace {

double total_defect(const PolyhedralMesh& m) {
  double t = 0;
  for (int v = 0; v < m.n_vertices; ++v)
    if (!m.vertex_boundary[size_t(v)]) t += m.defect(v);
  return t;
}

int nonzero_defects(const PolyhedralMesh& m, double eps = 1e-9) {
  int c = 0;
  for (int v = 0; v < m.n_vertices; ++v)
    if (!m.vertex_boundary[size_t(v)] && std::abs(m.defect(v)) > eps) c++;
  return c;
}

}  // namespace

TEST_CASE("cube mesh: defect sum 4*pi, eight corners of pi/2") {
  for (int subdiv : {1, 3}) {
    PolyhedralMesh m = make_cube_mesh(1.0, subdiv);
    CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
    CHECK(nonzero_defects(m) == 8);
    for (int v = 0; v < m.n_vertices; ++v) {
      double d = m.defect(v);
      if (std::abs(d) > 1e-9) CHECK(d == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
    CHECK(m.total_area == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(m.convex_embedded);
    CHECK(!m.has_boundary);
  }
}

TEST_CASE("tetrahedron: four defects of pi") {
  PolyhedralMesh m = make_tetrahedron_mesh(1.0);
  CHECK(m.n_vertices == 4);
  CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
  for (int v = 0; v < 4; ++v)
    CHECK(m.defect(v) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(m.total_area == doctest::Approx(4 * std::sqrt(3.0) / 4).epsilon(1e-12));
}

TEST_CASE("icosphere: defect sum 4*pi, positive curvature, area below 4*pi*R^2") {
  PolyhedralMesh m = make_icosphere_mesh(1.0, 2);
  CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
  for (int v = 0; v < m.n_vertices; ++v) CHECK(m.defect(v) > 0);
  CHECK(m.total_area < 4 * kPi);
  CHECK(m.total_area > 0.95 * 4 * kPi);
  CHECK(m.convex_embedded);
}

TEST_CASE("flat torus mesh: zero curvature everywhere, exact area") {
  PolyhedralMesh m = make_flat_torus_mesh(1.5, 0.8, 6);
  CHECK(std::abs(total_defect(m)) < 1e-9);
  for (int v = 0; v < m.n_vertices; ++v)
    CHECK(std::abs(m.defect(v)) < 1e-9);
  CHECK(m.total_area == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(!m.has_boundary);
}

TEST_CASE("doubled square: four corner cone points of defect pi, doubled area") {
  PolyhedralMesh m = make_doubled_square_mesh(1.0, 2);
  CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(nonzero_defects(m) == 4);
  for (int v = 0; v < m.n_vertices; ++v) {
    double d = m.defect(v);
    if (std::abs(d) > 1e-9) CHECK(d == doctest::Approx(kPi).epsilon(1e-12));
  }
  CHECK(m.total_area == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(!m.has_boundary);
}

TEST_CASE("doubled polygon: area doubles the input polygon") {
  // L-shaped hexagon of area 0.75.
  std::vector<Vec2> poly = {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5},
                            {0.5, 1}, {0, 1}};
  PolyhedralMesh m = double_polygon(poly);
  CHECK(m.total_area == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(!m.has_boundary);
}

TEST_CASE("cube edge curvature: length-weighted exterior angles sum to 6*pi") {
  PolyhedralMesh mm = make_cube_mesh(1.0, 1);
  double steiner = 0;
  for (size_t e = 0; e < mm.edges.size(); ++e)
    steiner += mm.edges[e].len * mm.edge_exterior_angle[e];
  CHECK(steiner == doctest::Approx(6 * kPi).epsilon(1e-12));

  Surface s = make_polyhedral(std::move(mm));
  MeasureEstimate M = mean_curvature_measure(s, RegionSpec::whole());
  CHECK(M.value == doctest::Approx(6 * kPi).epsilon(1e-12));
  CHECK(M.std_error == 0);
}

TEST_CASE("convex hull: cube corners, interior points discarded, exact area") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i)
    pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  pts.push_back({0.5, 0.5, 0.5});
  pts.push_back({0.2, 0.7, 0.3});
  PolyhedralMesh m = build_convex_hull_surface(pts);
  CHECK(m.n_vertices == 8);
  CHECK(m.total_area == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(total_defect(m) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(m.convex_embedded);
}

TEST_CASE("convex hull faces: outward orientation, all points enclosed") {
  Rng rng(2024);
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) {
    Vec3 p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    pts.push_back(p);
  }
  auto faces = convex_hull_faces(pts);
  CHECK(faces.size() >= 4);
  Vec3 centroid{0, 0, 0};
  for (const auto& p : pts) centroid = centroid + p;
  centroid = centroid * (1.0 / double(pts.size()));
  for (const auto& f : faces) {
    Vec3 a = pts[size_t(f[0])];
    Vec3 n = cross(pts[size_t(f[1])] - a, pts[size_t(f[2])] - a);
    CHECK(dot(n, centroid - a) < 0);  // centroid strictly behind each face
    for (const auto& p : pts)
      CHECK(dot(n, p - a) <= 1e-9 * (1 + norm(n)));  // nothing outside
  }
}

TEST_CASE("rect grid: boundary flags and exact area") {
  PolyhedralMesh m = make_rect_grid_mesh(2.0, 1.0, 4, 2);
  CHECK(m.total_area == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m.has_boundary);
  int boundary = 0, interior = 0;
  for (int v = 0; v < m.n_vertices; ++v) {
    if (m.vertex_boundary[size_t(v)]) {
      boundary++;
    } else {
      interior++;
      CHECK(std::abs(m.defect(v)) < 1e-9);
    }
  }
  CHECK(boundary == 12);  // perimeter nodes of a 5 x 3 grid
  CHECK(interior == 3);
}

TEST_CASE("mesh edges are manifold and consistently glued") {
  for (const PolyhedralMesh& m :
       {make_cube_mesh(1.0, 2), make_doubled_square_mesh(1.0, 2),
        make_icosphere_mesh(1.0, 1)}) {
    CHECK(m.min_edge > 0);
    CHECK(m.max_edge >= m.min_edge);
    for (const MeshEdge& e : m.edges) {
      CHECK(e.f0 >= 0);
      if (!e.boundary) {
        CHECK(e.f1 >= 0);
        CHECK(e.f1 != e.f0);
        // Chart lengths of the shared edge agree on both sides.
        Vec2 a0 = m.corner(e.f0, e.k0), b0 = m.corner(e.f0, (e.k0 + 1) % 3);
        Vec2 a1 = m.corner(e.f1, e.k1), b1 = m.corner(e.f1, (e.k1 + 1) % 3);
        CHECK(dist(a0, b0) == doctest::Approx(e.len).epsilon(1e-12));
        CHECK(dist(a1, b1) == doctest::Approx(e.len).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("analytic surfaces: whole areas and apex ball area") {
  CHECK(area(make_sphere(1.0), RegionSpec::whole()).value ==
        doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(area(make_flat_torus(1.3, 0.7), RegionSpec::whole()).value ==
        doctest::Approx(0.91).epsilon(1e-12));

  Surface cone = make_cone(kPi / 2);
  SurfacePoint apex;
  apex.p = {0, 0};
  MeasureEstimate ab = area(cone, RegionSpec::ball(apex, 0.3));
  CHECK(ab.value == doctest::Approx((kPi / 2) * 0.09 / 2).epsilon(1e-12));
  CHECK(ab.std_error == 0);

  // Cap area on the sphere, against 2*pi*R^2*(1 - cos(r/R)).
  Surface sph = make_sphere(2.0);
  SurfacePoint north;
  north.p = {0, 0};
  MeasureEstimate cap = area(sph, RegionSpec::ball(north, 1.0));
  CHECK(cap.value ==
        doctest::Approx(2 * kPi * 4 * (1 - std::cos(0.5))).epsilon(1e-12));
}

TEST_CASE("surface factory validation") {
  CHECK_THROWS_AS(make_cone(0.0), ConfigError);
  CHECK_THROWS_AS(make_cone(-1.0), ConfigError);
  CHECK_THROWS_AS(make_cone(2 * kPi + 0.1), ConfigError);
  CHECK_THROWS_AS(make_flat_torus(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(make_sphere(-2.0), ConfigError);
  CHECK_THROWS_AS(RegionSpec::ball(SurfacePoint{}, -0.1), ConfigError);
  CHECK_NOTHROW(RegionSpec::ball(SurfacePoint{}, 0.0));
}

TEST_CASE("canonical_point wraps torus coordinates") {
  Surface t = make_flat_torus(1.0, 1.0);
  SurfacePoint q;
  q.p = {1.2, -0.3};
  SurfacePoint c = canonical_point(t, q);
  CHECK(c.p.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.p.y == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("uniform sampling: deterministic, per-index substreams, plausible mean") {
  Surface t = make_flat_torus(1.0, 1.0);
  auto a = sample_uniform(t, RegionSpec::whole(), 20, 7);
  auto b = sample_uniform(t, RegionSpec::whole(), 20, 7);
  auto c = sample_uniform(t, RegionSpec::whole(), 10, 7);
  for (int i = 0; i < 20; ++i) {
    CHECK(a[size_t(i)].p.x == b[size_t(i)].p.x);
    CHECK(a[size_t(i)].p.y == b[size_t(i)].p.y);
  }
  for (int i = 0; i < 10; ++i)
    CHECK(a[size_t(i)].p.x == c[size_t(i)].p.x);  // prefix property

  auto big = sample_uniform(t, RegionSpec::whole(), 4096, 11);
  double mean = 0;
  for (const auto& p : big) mean += p.p.x;
  mean /= double(big.size());
  double se = (1.0 / std::sqrt(12.0)) / 64.0;
  CHECK(std::abs(mean - 0.5) < 5 * se);

  // Region-restricted samples stay in the region.
  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  auto in_faces = sample_uniform(cube, RegionSpec::faces({3, 4}), 50, 5);
  for (const auto& p : in_faces) CHECK((p.face == 3 || p.face == 4));
}

TEST_CASE("atomic curvature measure: partitions and absolute variant") {
  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  MeasureEstimate whole = curvature_measure(cube, RegionSpec::whole());
  CHECK(whole.value == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(whole.std_error == 0);

  // Per-face regions partition the cone points exactly once.
  double split = 0;
  for (int f = 0; f < 12; ++f)
    split += curvature_measure(cube, RegionSpec::faces({f})).value;
  CHECK(split == doctest::Approx(4 * kPi).epsilon(1e-12));

  CHECK(curvature_measure(cube, RegionSpec::whole(), true).value ==
        doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK_THROWS_AS(curvature_measure(make_sphere(1.0), RegionSpec::whole()),
                  UnsupportedError);

  Surface cone = make_cone(2 * kPi - 0.4);
  SurfacePoint apex;
  apex.p = {0, 0};
  CHECK(curvature_measure(cone, RegionSpec::ball(apex, 1.0)).value ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("feature scale matches the smallest mesh edge") {
  PolyhedralMesh m = make_cube_mesh(1.0, 2);
  double expect = m.min_edge;
  CHECK(feature_scale(make_polyhedral(std::move(m))) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("locate/embed round-trip on the cube") {
  PolyhedralMesh m = make_cube_mesh(1.0, 1);
  Rng rng(99);
  for (int i = 0; i < 10; ++i) {
    // A point on the top face z = 1.
    Vec3 q{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), 1.0};
    SurfacePoint x = testutil::locate(m, q);
    Vec3 back = testutil::embed(m, x);
    CHECK(norm(back - q) < 1e-9);
  }
}
