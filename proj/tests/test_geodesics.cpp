// Distances and the geodesic flow against closed forms: flat charts are
// exact, cube face-to-face unfoldings have known lengths, doubled squares
// close up vertical loops, and the analytic backends follow their formulas.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"
#include "helpers.hpp"

using namespace devlab;
using testutil::chart_dir;
using testutil::embed;
using testutil::locate;

TEST_CASE("flat rectangle: geodesic distance is the Euclidean chord") {
  Surface s = make_polyhedral(make_rect_grid_mesh(1.0, 1.0, 4, 4));
  const PolyhedralMesh& m = s.require_mesh();
  Rng rng(31);
  for (int i = 0; i < 15; ++i) {
    Vec3 a{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), 0};
    Vec3 b{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), 0};
    DistanceAnswer d = distance(s, locate(m, a), locate(m, b));
    REQUIRE(d.value.has_value());
    CHECK(*d.value == doctest::Approx(norm(a - b)).epsilon(1e-9));
  }
}

TEST_CASE("cube distances: face-center unfoldings and same-face chords") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();
  SurfacePoint bottom = locate(m, {0.5, 0.5, 0});
  SurfacePoint top = locate(m, {0.5, 0.5, 1});
  SurfacePoint side = locate(m, {1, 0.5, 0.5});

  DistanceAnswer d1 = distance(s, bottom, top);
  REQUIRE(d1.value.has_value());
  CHECK(*d1.value == doctest::Approx(2.0).epsilon(1e-9));

  DistanceAnswer d2 = distance(s, bottom, side);
  REQUIRE(d2.value.has_value());
  CHECK(*d2.value == doctest::Approx(1.0).epsilon(1e-9));

  SurfacePoint p = locate(m, {0.3, 0.2, 0});
  SurfacePoint q = locate(m, {0.7, 0.6, 0});
  DistanceAnswer d3 = distance(s, p, q);
  REQUIRE(d3.value.has_value());
  CHECK(*d3.value == doctest::Approx(std::sqrt(0.32)).epsilon(1e-9));

  // r_max prunes: a cap below the true distance reports no value.
  CHECK(!distance(s, bottom, top, 1.5).value.has_value());
}

TEST_CASE("cube distances: symmetry and triangle inequality") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  auto pts = sample_uniform(s, RegionSpec::whole(), 9, 17);
  for (int i = 0; i + 2 < 9; i += 3) {
    const auto &x = pts[size_t(i)], &y = pts[size_t(i + 1)],
               &z = pts[size_t(i + 2)];
    double dxy = *distance(s, x, y).value;
    double dyx = *distance(s, y, x).value;
    double dyz = *distance(s, y, z).value;
    double dxz = *distance(s, x, z).value;
    CHECK(dxy == doctest::Approx(dyx).epsilon(1e-10));
    CHECK(dxz <= dxy + dyz + 1e-9);
  }
}

TEST_CASE("doubled square: crossing to the mirror sheet and closing a loop") {
  Surface s = make_polyhedral(make_doubled_square_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();

  // The start (0.5, 0.2) on the first sheet, built from corner barycentrics
  // so the test does not assume a chart layout. Face 0 carries input corners
  // (0,0), (1,0), (1,1) of the unit square in some order.
  int f = 0;
  Vec2 c[3] = {m.corner(f, 0), m.corner(f, 1), m.corner(f, 2)};
  double bary[3] = {0, 0, 0};
  // Solve (0.5, 0.2) = sum bary_v * square_corner(vertex id).
  // square corners by vertex id: 0:(0,0) 1:(1,0) 2:(1,1) 3:(0,1).
  Vec2 square[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  {
    Vec2 target{0.5, 0.2};
    Vec2 s0 = square[size_t(m.vertex_at(f, 0))];
    Vec2 s1 = square[size_t(m.vertex_at(f, 1))];
    Vec2 s2 = square[size_t(m.vertex_at(f, 2))];
    Vec2 u1 = s1 - s0, u2 = s2 - s0, w = target - s0;
    double det = cross(u1, u2);
    double b1 = cross(w, u2) / det, b2 = cross(u1, w) / det;
    bary[0] = 1 - b1 - b2;
    bary[1] = b1;
    bary[2] = b2;
  }
  TangentVector v;
  v.base.face = f;
  v.base.p = c[0] * bary[0] + c[1] * bary[1] + c[2] * bary[2];
  {
    // Chart image of the square direction (0, -1).
    Vec2 s0 = square[size_t(m.vertex_at(f, 0))];
    Vec2 s1 = square[size_t(m.vertex_at(f, 1))];
    Vec2 s2 = square[size_t(m.vertex_at(f, 2))];
    Vec2 u1 = s1 - s0, u2 = s2 - s0;
    double det = cross(u1, u2);
    Vec2 d{0, -1};
    double a1 = cross(d, u2) / det, a2 = cross(u1, d) / det;
    v.dir = (c[1] - c[0]) * a1 + (c[2] - c[0]) * a2;
  }

  // After 0.4 the trajectory sits at the mirror image (across the bottom
  // edge), at distance exactly 2 * 0.2 from the start.
  FlowResult half = geodesic_flow(s, v, 0.4);
  REQUIRE(half.status == FlowStatus::completed);
  DistanceAnswer dm = distance(s, v.base, half.end->base);
  REQUIRE(dm.value.has_value());
  CHECK(*dm.value == doctest::Approx(0.4).epsilon(1e-9));

  // The vertical loop has length 2: down 0.2, over the mirror sheet, back.
  FlowResult loop = geodesic_flow(s, v, 2.0);
  REQUIRE(loop.status == FlowStatus::completed);
  CHECK(loop.end->base.face == v.base.face);
  CHECK(dist(loop.end->base.p, v.base.p) < 1e-9);
  CHECK(dist(loop.end->dir, v.dir) < 1e-9);
}

TEST_CASE("rect grid flow: straight line in the plane, consistent events") {
  Surface s = make_polyhedral(make_rect_grid_mesh(1.0, 1.0, 4, 4));
  const PolyhedralMesh& m = s.require_mesh();
  Vec3 start{0.3, 0.4, 0};
  double theta = 0.7;
  Vec3 d3{std::cos(theta), std::sin(theta), 0};
  TangentVector v{locate(m, start), chart_dir(m, locate(m, start).face, d3)};
  double t = 0.35;
  FlowResult fr = geodesic_flow(s, v, t, /*record_events=*/true);
  REQUIRE(fr.status == FlowStatus::completed);
  Vec3 expect = start + d3 * t;
  CHECK(norm(embed(m, fr.end->base) - expect) < 1e-9);
  CHECK(fr.n_events >= 1);
  CHECK(fr.events.size() == fr.n_events);

  double prev_time = 0;
  for (const FlowEvent& ev : fr.events) {
    CHECK(ev.time >= prev_time);
    prev_time = ev.time;
    CHECK(ev.param >= 0);
    CHECK(ev.param <= 1);
    // The event's pos equals the edge point at `param` along va -> vb, read
    // in the entered face's chart.
    const MeshEdge& e = m.edges[size_t(ev.edge)];
    int ia = -1, ib = -1;
    for (int i = 0; i < 3; ++i) {
      if (m.vertex_at(ev.face, i) == e.va) ia = i;
      if (m.vertex_at(ev.face, i) == e.vb) ib = i;
    }
    REQUIRE(ia >= 0);
    REQUIRE(ib >= 0);
    Vec2 a = m.corner(ev.face, ia), b = m.corner(ev.face, ib);
    CHECK(dist(a + (b - a) * ev.param, ev.pos) < 1e-9);
  }
}

TEST_CASE("cube flow: bottom center to top center over a side face") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();
  SurfacePoint start = locate(m, {0.5, 0.5, 0});
  TangentVector v{start, chart_dir(m, start.face, {1, 0, 0})};
  FlowResult fr = geodesic_flow(s, v, 2.0);
  REQUIRE(fr.status == FlowStatus::completed);
  CHECK(norm(embed(m, fr.end->base) - Vec3{0.5, 0.5, 1.0}) < 1e-9);
}

TEST_CASE("cube flow: aiming at a corner reports the vertex hit") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();
  SurfacePoint start = locate(m, {0.3, 0.3, 0});
  Vec3 d3 = normalized(Vec3{0, 0, 0} - Vec3{0.3, 0.3, 0});
  TangentVector v{start, chart_dir(m, start.face, d3)};
  FlowResult fr = geodesic_flow(s, v, 1.0);
  CHECK(fr.status == FlowStatus::vertex_hit);
  CHECK(fr.time_elapsed == doctest::Approx(std::sqrt(0.18)).epsilon(1e-9));
}

TEST_CASE("event budget exhaustion is reported, not silently truncated") {
  Surface s = make_polyhedral(make_flat_torus_mesh(1.0, 1.0, 4));
  TangentVector v;
  v.base = sample_uniform(s, RegionSpec::whole(), 1, 3)[0];
  v.dir = normalized(Vec2{1.0, 1.6180339887498949});
  FlowResult fr = geodesic_flow(s, v, 1000.0, false, /*max_events=*/5);
  CHECK(fr.status == FlowStatus::budget_exceeded);
  CHECK(fr.n_events == 5);
  CHECK(!fr.end.has_value());
}

TEST_CASE("exp_map agrees with unit-time flow of the same vector") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  auto pts = sample_uniform(s, RegionSpec::whole(), 5, 23);
  Rng rng(24);
  for (const auto& base : pts) {
    double ang = rng.uniform(0, 2 * kPi);
    TangentVector v{base, {0.8 * std::cos(ang), 0.8 * std::sin(ang)}};
    FlowResult a = exp_map(s, v);
    FlowResult b = geodesic_flow(s, v, 1.0);
    REQUIRE(a.status == FlowStatus::completed);
    REQUIRE(b.status == FlowStatus::completed);
    CHECK(a.end->base.face == b.end->base.face);
    CHECK(dist(a.end->base.p, b.end->base.p) < 1e-12);
  }
}

TEST_CASE("flat torus flow: straight lines modulo the lattice") {
  Surface s = make_flat_torus(1.0, 1.0);
  TangentVector v;
  v.base.p = {0.2, 0.2};
  v.dir = {0.6, 0.8};
  FlowResult fr = geodesic_flow(s, v, 5.0);  // displacement (3, 4): closes up
  REQUIRE(fr.status == FlowStatus::completed);
  CHECK(fr.end->base.p.x == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fr.end->base.p.y == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(fr.end->dir.x == 0.6);
  CHECK(fr.end->dir.y == 0.8);
}

TEST_CASE("sphere flow: great circles close after one period") {
  Surface s = make_sphere(1.0);
  TangentVector v;
  v.base.p = {1.1, 0.3};  // (colatitude, longitude)
  v.dir = {0.3, 0.4};     // orthonormal-frame components, speed 0.5
  FlowResult fr = geodesic_flow(s, v, 4 * kPi);  // arclength 2*pi
  REQUIRE(fr.status == FlowStatus::completed);
  CHECK(analytic_distance(s, fr.end->base, v.base) < 1e-9);
  CHECK(std::abs(fr.end->dir.x - 0.3) < 1e-9);
  CHECK(std::abs(fr.end->dir.y - 0.4) < 1e-9);
}

TEST_CASE("cone flow: radial rays hit the apex, others develop straight") {
  Surface s = make_cone(kPi);
  TangentVector inward;
  inward.base.p = {1.0, 0.2};
  inward.dir = {-1.0, 0.0};  // (radial, angular) frame components
  FlowResult hit = geodesic_flow(s, inward, 2.0);
  CHECK(hit.status == FlowStatus::vertex_hit);
  CHECK(hit.time_elapsed == doctest::Approx(1.0).epsilon(1e-9));

  TangentVector tangential;
  tangential.base.p = {1.0, 0.2};
  tangential.dir = {0.0, 1.0};
  FlowResult fr = geodesic_flow(s, tangential, 1.0);
  REQUIRE(fr.status == FlowStatus::completed);
  CHECK(fr.end->base.p.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("half-plane flow: downward rays terminate on the boundary") {
  Surface s = make_half_plane();
  TangentVector v;
  v.base.p = {0.0, 0.5};
  v.dir = {0.0, -1.0};
  FlowResult fr = geodesic_flow(s, v, 2.0);
  CHECK(fr.status == FlowStatus::boundary_hit);
  CHECK(fr.time_elapsed == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fr.last.base.p.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("negating a tangent vector is an involution") {
  TangentVector v;
  v.base.face = 3;
  v.base.p = {0.25, 0.5};
  v.dir = {0.6, -0.1};
  TangentVector w = negate(negate(v));
  CHECK(w.base.face == v.base.face);
  CHECK(w.base.p.x == v.base.p.x);
  CHECK(w.dir.x == v.dir.x);
  CHECK(w.dir.y == v.dir.y);
}
