// Ball volumes, deviation integrals, coefficient laws, and the measure
// inequalities against closed forms: flat and spherical ball areas, the
// half-plane strip constant 2/(3 pi), cone scale invariance, half-space
// boundary constants, and handcrafted equality cases of the exchange check.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/hull.hpp"
#include "devlab/measures.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"
#include "helpers.hpp"

using namespace devlab;
using measures::EstimatorConfig;
using measures::MeasureSpec;
using testutil::locate;

namespace {

EstimatorConfig cfg_with(uint64_t seed, uint64_t outer = 1024,
                         uint64_t inner = 1024) {
  EstimatorConfig cfg;
  cfg.seed = seed;
  cfg.outer = outer;
  cfg.inner = inner;
  return cfg;
}

SurfacePoint pt(double x, double y, int face = 0) {
  SurfacePoint p;
  p.face = face;
  p.p = {x, y};
  return p;
}

}  // namespace

TEST_CASE("analytic ball volumes match closed forms exactly") {
  EstimatorConfig cfg = cfg_with(1);

  MeasureEstimate torus = measures::ball_volume(
      make_flat_torus(1.0, 1.0), pt(0.4, 0.7), 0.1, cfg);
  CHECK(torus.value == doctest::Approx(kPi * 0.01).epsilon(1e-12));
  CHECK(torus.std_error == 0.0);

  MeasureEstimate plane =
      measures::ball_volume(make_plane(), pt(3.0, -2.0), 2.0, cfg);
  CHECK(plane.value == doctest::Approx(4 * kPi).epsilon(1e-12));

  Surface sph = make_sphere(1.0);
  MeasureEstimate cap = measures::ball_volume(sph, pt(1.2, 0.5), 1.0, cfg);
  CHECK(cap.value == doctest::Approx(2 * kPi * (1 - std::cos(1.0))).epsilon(1e-12));
  MeasureEstimate full = measures::ball_volume(sph, pt(1.2, 0.5), kPi, cfg);
  CHECK(full.value == doctest::Approx(4 * kPi).epsilon(1e-12));

  MeasureEstimate apex =
      measures::ball_volume(make_cone(1.0), pt(0.0, 0.0), 0.3, cfg);
  CHECK(apex.value == doctest::Approx(1.0 * 0.09 / 2).epsilon(1e-12));

  // Half-plane ball clipped by the boundary: disk minus a circular segment.
  double d = 0.3, r = 0.5;
  double seg = r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d);
  MeasureEstimate half =
      measures::ball_volume(make_half_plane(), pt(0.0, d), r, cfg);
  CHECK(half.value == doctest::Approx(kPi * r * r - seg).epsilon(1e-12));
}

TEST_CASE("polyhedral ball volume: Monte Carlo matches flat and cone areas") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();
  EstimatorConfig cfg = cfg_with(7, 1024, 20000);

  // Face center, radius below the edge distance: an exact flat disk.
  SurfacePoint center = locate(m, {0.5, 0.5, 0});
  MeasureEstimate flat = measures::ball_volume(s, center, 0.2, cfg);
  REQUIRE(flat.std_error > 0);
  CHECK(std::abs(flat.value - kPi * 0.04) <= 4 * flat.std_error);

  // Corner: cone angle 3*pi/2, so the vertex ball has 3/4 the flat area.
  SurfacePoint corner =
      region_center(s, RegionSpec::vertex_ball(m.vertex_at(0, 0), 0.2));
  MeasureEstimate vb = measures::ball_volume(s, corner, 0.2, cfg);
  CHECK(std::abs(vb.value - 0.75 * kPi * 0.04) <= 4 * vb.std_error);
}

TEST_CASE("polyhedral ball volume agrees with the exact ball area") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 2));
  EstimatorConfig cfg = cfg_with(11, 1024, 16384);
  auto pts = sample_uniform(s, RegionSpec::whole(), 5, 13);
  for (const auto& x : pts) {
    MeasureEstimate mc = measures::ball_volume(s, x, 0.15, cfg);
    // Exact sweep where the ball avoids cone points; an independent Monte
    // Carlo fallback otherwise.
    MeasureEstimate ref = area(s, RegionSpec::ball(x, 0.15));
    double sigma = std::sqrt(mc.std_error * mc.std_error +
                             ref.std_error * ref.std_error);
    CHECK(std::abs(mc.value - ref.value) <= 4 * sigma + 1e-9 * ref.value);
  }
}

TEST_CASE("exact ball areas grow with radius and obey the flat upper bound") {
  for (Surface s : {make_polyhedral(make_cube_mesh(1.0, 1)),
                    make_polyhedral(make_tetrahedron_mesh(1.0))}) {
    auto pts = sample_uniform(s, RegionSpec::whole(), 5, 29);
    for (const auto& x : pts) {
      double prev = 0;
      for (double r : {0.1, 0.2, 0.3}) {
        MeasureEstimate a = area(s, RegionSpec::ball(x, r));
        CHECK(a.value > prev);
        CHECK(a.value <= kPi * r * r + 1e-9);  // nonnegative curvature
        prev = a.value;
      }
    }
  }
}

TEST_CASE("deviation is additive over a face partition of the cube") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  double r = 0.15;
  MeasureEstimate whole =
      measures::deviation(s, RegionSpec::whole(), r, cfg_with(40));
  MeasureEstimate lower = measures::deviation(
      s, RegionSpec::faces({0, 1, 2, 3, 4, 5}), r, cfg_with(41));
  MeasureEstimate upper = measures::deviation(
      s, RegionSpec::faces({6, 7, 8, 9, 10, 11}), r, cfg_with(42));
  double sigma = std::sqrt(whole.std_error * whole.std_error +
                           lower.std_error * lower.std_error +
                           upper.std_error * upper.std_error);
  CHECK(std::abs(whole.value - lower.value - upper.value) <= 3 * sigma);
}

TEST_CASE("sphere deviation: quadrature equals the closed form") {
  Surface s = make_sphere(1.0);
  for (double r : {0.2, 0.3}) {
    MeasureEstimate dev =
        measures::deviation(s, RegionSpec::whole(), r, cfg_with(2));
    double vr = 1 - 2 * (1 - std::cos(r)) / (r * r);
    CHECK(dev.value == doctest::Approx(4 * kPi * vr).epsilon(1e-9));
    // The integrand is constant on the sphere, so Monte Carlo over the
    // closed-form ball volume reproduces the same number.
    EstimatorConfig mc = cfg_with(3, 512, 512);
    mc.force_monte_carlo = true;
    MeasureEstimate dev_mc = measures::deviation(s, RegionSpec::whole(), r, mc);
    CHECK(dev_mc.value == doctest::Approx(dev.value).epsilon(1e-9));
  }
}

TEST_CASE("cone deviation: scale invariant and equal to the apex mass") {
  double alpha = 0.3;
  Surface s = make_cone(2 * kPi - alpha);
  double m_ref = measures::cone_mass(alpha).value;
  for (double r : {0.5, 1.5}) {
    RegionSpec reg = RegionSpec::ball(pt(0.0, 0.0), 10 * r);
    MeasureEstimate dev = measures::deviation(s, reg, r, cfg_with(4));
    CHECK(dev.value / (r * r) == doctest::Approx(m_ref).epsilon(1e-6));
  }
}

TEST_CASE("profiles are bit-for-bit reproducible, rows carry their seed") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  EstimatorConfig cfg = cfg_with(77, 256, 256);
  cfg.r0 = 0.3;
  cfg.ratio = 0.5;
  cfg.count = 3;
  measures::DeviationProfile a = measures::profile(s, RegionSpec::whole(), cfg);
  measures::DeviationProfile b = measures::profile(s, RegionSpec::whole(), cfg);
  EstimatorConfig par = cfg;
  par.workers = 4;
  measures::DeviationProfile c =
      measures::profile(s, RegionSpec::whole(), par);
  REQUIRE(a.rows.size() == 3);
  for (size_t j = 0; j < 3; ++j) {
    CHECK(a.rows[j].vr.value == b.rows[j].vr.value);
    CHECK(a.rows[j].vr.std_error == b.rows[j].vr.std_error);
    CHECK(a.rows[j].vr.value == c.rows[j].vr.value);
    CHECK(a.rows[j].vr.std_error == c.rows[j].vr.std_error);
    CHECK(a.rows[j].vr.std_error > 0);
    if (j > 0) CHECK(a.rows[j].r < a.rows[j - 1].r);

    EstimatorConfig row_cfg = cfg;
    row_cfg.seed = a.rows[j].row_seed;
    MeasureEstimate redo =
        measures::deviation(s, RegionSpec::whole(), a.rows[j].r, row_cfg);
    CHECK(redo.value == a.rows[j].vr.value);
    CHECK(redo.std_error == a.rows[j].vr.std_error);
  }
  CHECK(a.fit.c1 == b.fit.c1);
  CHECK(a.fit.c2 == b.fit.c2);
}

TEST_CASE("flat torus profile: exact zero rows, zero fitted coefficients") {
  Surface s = make_flat_torus(1.0, 1.0);
  EstimatorConfig cfg = cfg_with(5);
  cfg.r0 = 0.2;
  cfg.ratio = 0.5;
  cfg.count = 3;
  measures::DeviationProfile p = measures::profile(s, RegionSpec::whole(), cfg);
  for (const auto& row : p.rows) {
    CHECK(row.vr.value == 0.0);
    CHECK(row.vr.std_error == 0.0);
  }
  CHECK(p.fit.c1 == 0.0);
  CHECK(p.fit.c2 == 0.0);
  CHECK(!p.fit.unreliable);
}

TEST_CASE("half-space boundary constants match the closed-form family") {
  // c_n = omega_{n-1} / ((n+1) omega_n); the first three have simple forms.
  MeasureEstimate c1 = measures::halfspace_boundary_constant(1);
  CHECK(c1.value == 0.25);
  CHECK(c1.std_error == 0.0);
  CHECK(measures::halfspace_boundary_constant(2).value ==
        doctest::Approx(2 / (3 * kPi)).epsilon(1e-12));
  CHECK(measures::halfspace_boundary_constant(3).value ==
        doctest::Approx(3.0 / 16).epsilon(1e-12));
  double prev = c1.value;
  for (int n = 2; n <= 8; ++n) {
    MeasureEstimate cn = measures::halfspace_boundary_constant(n);
    double ref = unit_ball_volume(n - 1) / ((n + 1) * unit_ball_volume(n));
    CHECK(cn.value == doctest::Approx(ref).epsilon(1e-6));
    CHECK(cn.value < prev);
    prev = cn.value;
  }
  CHECK_THROWS_AS(measures::halfspace_boundary_constant(0), ConfigError);
  CHECK_THROWS_AS(measures::halfspace_boundary_constant(9), ConfigError);
}

TEST_CASE("cone apex mass: small-defect law, monotone, cubic residual") {
  CHECK(measures::cone_mass(0.0).value == 0.0);

  double alpha = 1e-3;
  MeasureEstimate tiny = measures::cone_mass(alpha);
  CHECK(std::abs(tiny.value / alpha - 1.0 / 12) <= 0.5 * alpha);

  double m01 = measures::cone_mass(0.1).value;
  double m02 = measures::cone_mass(0.2).value;
  double m04 = measures::cone_mass(0.4).value;
  CHECK(m01 < m02);
  CHECK(m02 < m04);
  CHECK(measures::cone_mass(kPi / 2).value > 0);

  // The residual against the linear law shrinks superlinearly: doubling the
  // defect multiplies it by a factor between quadratic and cubic growth.
  double res1 = m01 - 0.1 / 12;
  double res2 = m02 - 0.2 / 12;
  CHECK(res1 != 0.0);
  CHECK(res2 / res1 >= 2.0);
  CHECK(res2 / res1 <= 8.0);

  CHECK_THROWS_AS(measures::cone_mass(-0.1), ConfigError);
  CHECK_THROWS_AS(measures::cone_mass(2 * kPi - 0.005), ConfigError);
  CHECK_THROWS_AS(measures::cone_mass(7.0), ConfigError);
}

TEST_CASE("half-plane strip: per-length deviation hits 2/(3 pi) * r") {
  Surface s = make_half_plane();
  CHECK(area(s, RegionSpec::boundary_strip(0.5)).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  for (double r : {0.2, 0.3}) {
    MeasureEstimate dev =
        measures::deviation(s, RegionSpec::boundary_strip(0.5), r, cfg_with(6));
    CHECK(std::abs(dev.value - (2 / (3 * kPi)) * r) <= 1e-6 * r);
  }
  // A strip narrower than r captures only part of the boundary mass.
  MeasureEstimate partial =
      measures::deviation(s, RegionSpec::boundary_strip(0.1), 0.3, cfg_with(6));
  CHECK(partial.value > 0);
  CHECK(partial.value < (2 / (3 * kPi)) * 0.3);
}

TEST_CASE("exchange check: handcrafted exact equality cases") {
  Surface torus = make_flat_torus(1.0, 1.0);
  EstimatorConfig cfg = cfg_with(90, 512, 512);

  measures::ExchangeRecord same = measures::exchange_check(
      torus, MeasureSpec::hausdorff(), MeasureSpec::hausdorff(),
      RegionSpec::whole(), 0.2, cfg);
  CHECK(same.holds);
  CHECK(same.lhs == same.rhs);

  SurfacePoint p = pt(0.3, 0.4);
  measures::ExchangeRecord point_case = measures::exchange_check(
      torus, MeasureSpec::hausdorff(), MeasureSpec::dirac(p),
      RegionSpec::ball(p, 0.0), 0.15, cfg);
  CHECK(point_case.holds);
  CHECK(point_case.lhs == point_case.rhs);
  CHECK(point_case.lhs > 0);
}

TEST_CASE("exchange check: two point masses reduce to indicator logic") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = s.require_mesh();
  EstimatorConfig cfg = cfg_with(91, 256, 256);
  SurfacePoint x0 = locate(m, {0.4, 0.5, 0});
  SurfacePoint q = locate(m, {0.5, 0.5, 0});  // distance 0.1 from x0

  // x0 inside A and d(q, x0) < r: both sides count exactly one pair.
  measures::ExchangeRecord in = measures::exchange_check(
      s, MeasureSpec::dirac(q), MeasureSpec::dirac(x0),
      RegionSpec::ball(x0, 0.0), 0.2, cfg);
  CHECK(in.lhs == 1.0);
  CHECK(in.rhs == 1.0);
  CHECK(in.holds);

  // x0 outside A: the left side is empty.
  SurfacePoint far = locate(m, {0.9, 0.9, 0});
  measures::ExchangeRecord out = measures::exchange_check(
      s, MeasureSpec::dirac(q), MeasureSpec::dirac(x0),
      RegionSpec::ball(far, 0.0), 0.2, cfg);
  CHECK(out.lhs == 0.0);
  CHECK(out.holds);
}

TEST_CASE("exchange check: random instances and a weighted measure hold") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  EstimatorConfig cfg = cfg_with(92, 512, 512);
  measures::ExchangeRecord faces_case = measures::exchange_check(
      s, MeasureSpec::hausdorff(), MeasureSpec::hausdorff(),
      RegionSpec::faces({0, 1}), 0.2, cfg);
  CHECK(faces_case.holds);

  std::vector<double> density(12, 2.0);
  measures::ExchangeRecord weighted = measures::exchange_check(
      s, MeasureSpec::weighted(density), MeasureSpec::hausdorff(),
      RegionSpec::whole(), 0.2, cfg);
  CHECK(weighted.holds);
}

TEST_CASE("exchange check: measure validation errors") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  EstimatorConfig cfg = cfg_with(93, 64, 64);
  CHECK_THROWS_AS(
      measures::exchange_check(s, MeasureSpec::weighted({1.0, 2.0}),
                               MeasureSpec::hausdorff(), RegionSpec::whole(),
                               0.2, cfg),
      ConfigError);
  std::vector<double> bad(12, 1.0);
  bad[3] = -1.0;
  CHECK_THROWS_AS(
      measures::exchange_check(s, MeasureSpec::weighted(bad),
                               MeasureSpec::hausdorff(), RegionSpec::whole(),
                               0.2, cfg),
      ConfigError);
  CHECK_THROWS_AS(
      measures::exchange_check(make_flat_torus(1.0, 1.0),
                               MeasureSpec::weighted({1.0}),
                               MeasureSpec::hausdorff(), RegionSpec::whole(),
                               0.2, cfg),
      UnsupportedError);
}

TEST_CASE("point_in_region: open balls, closed singletons, face sets") {
  Surface torus = make_flat_torus(1.0, 1.0);
  RegionSpec ball = RegionSpec::ball(pt(0.2, 0.2), 0.3);
  CHECK(measures::point_in_region(torus, pt(0.4, 0.2), ball));
  CHECK(!measures::point_in_region(torus, pt(0.6, 0.2), ball));
  CHECK(!measures::point_in_region(torus, pt(0.5, 0.2), ball));  // d == r

  RegionSpec singleton = RegionSpec::ball(pt(0.2, 0.2), 0.0);
  CHECK(measures::point_in_region(torus, pt(0.2, 0.2), singleton));
  CHECK(!measures::point_in_region(torus, pt(0.2, 0.21), singleton));
  CHECK(measures::point_in_region(torus, pt(0.9, 0.9), RegionSpec::whole()));

  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  SurfacePoint on3 = sample_uniform(cube, RegionSpec::faces({3}), 1, 8)[0];
  CHECK(measures::point_in_region(cube, on3, RegionSpec::faces({3})));
  CHECK(!measures::point_in_region(cube, on3, RegionSpec::faces({4})));
}

TEST_CASE("deficit-vs-curvature check on cone apex, plane, tetrahedron") {
  double alpha = 0.8;
  Surface cone = make_cone(2 * kPi - alpha);
  measures::BonkLangRecord c =
      measures::bonk_lang_check(cone, pt(0.0, 0.0), 0.5, cfg_with(50));
  CHECK(c.precondition_ok);
  CHECK(c.omega_ball == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(c.lhs == doctest::Approx(alpha / (2 * kPi)).epsilon(1e-9));
  CHECK(c.rhs == doctest::Approx(3 * alpha).epsilon(1e-12));
  CHECK(c.holds);

  Surface flat_mesh = make_polyhedral(make_flat_torus_mesh(1.0, 1.0, 4));
  SurfacePoint mid = sample_uniform(flat_mesh, RegionSpec::whole(), 1, 19)[0];
  measures::BonkLangRecord flat =
      measures::bonk_lang_check(flat_mesh, mid, 0.2, cfg_with(51));
  CHECK(flat.precondition_ok);
  CHECK(flat.omega_ball == 0.0);
  CHECK(flat.lhs <= 3 * flat.sigma + 1e-12);
  CHECK(flat.holds);

  CHECK_THROWS_AS(
      measures::bonk_lang_check(make_plane(), pt(1.0, 1.0), 0.5, cfg_with(51)),
      UnsupportedError);

  // The tetrahedron concentrates 4*pi of curvature in four points: far from
  // the almost-flat regime the comparison is stated for.
  Surface tetra = make_polyhedral(make_tetrahedron_mesh(1.0));
  SurfacePoint v0 = region_center(tetra, RegionSpec::vertex_ball(0, 0.25));
  measures::BonkLangRecord t =
      measures::bonk_lang_check(tetra, v0, 0.25, cfg_with(52));
  CHECK(!t.precondition_ok);
}

TEST_CASE("deficit-vs-curvature check on a shallow polyhedral tent") {
  // One interior vertex of small positive defect over an open square ring:
  // a convex polyhedral plane in miniature. The apex ball is an exact cone
  // ball, so lhs approaches defect / (2 pi).
  MeshSpec spec;
  std::vector<Vec3> pos = {{0, 0, 0.2}};
  for (int k = 0; k < 8; ++k) {
    double ang = 2 * kPi * k / 8;
    pos.push_back({std::cos(ang), std::sin(ang), 0.0});
  }
  for (int k = 0; k < 8; ++k)
    spec.faces.push_back({0, 1 + k, 1 + (k + 1) % 8});
  spec.n_vertices = 9;
  spec.positions = pos;
  Surface tent = make_polyhedral(build_mesh(spec));
  const PolyhedralMesh& m = tent.require_mesh();
  double alpha = m.defect(0);
  REQUIRE(alpha > 0.01);
  REQUIRE(alpha < 0.5);

  SurfacePoint apex = region_center(tent, RegionSpec::vertex_ball(0, 0.3));
  measures::BonkLangRecord rec =
      measures::bonk_lang_check(tent, apex, 0.3, cfg_with(52, 1024, 32768));
  CHECK(rec.precondition_ok);
  CHECK(rec.omega_ball == doctest::Approx(alpha).epsilon(1e-12));
  CHECK(std::abs(rec.lhs - alpha / (2 * kPi)) <= 5 * rec.sigma + 1e-9);
  CHECK(rec.holds);

  // A ball reaching the mesh boundary voids the precondition.
  measures::BonkLangRecord edge =
      measures::bonk_lang_check(tent, apex, 1.05, cfg_with(52));
  CHECK(!edge.precondition_ok);
}

TEST_CASE("deficit-vs-mean-curvature check on the cube and a convex cap") {
  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  const PolyhedralMesh& m = cube.require_mesh();
  EstimatorConfig cfg = cfg_with(53, 1024, 8192);

  measures::MeanCurvRecord fc =
      measures::mean_curvature_check(cube, locate(m, {0.5, 0.5, 0}), 0.1, cfg);
  CHECK(fc.lhs <= 3 * fc.sigma + 1e-12);
  CHECK(fc.delta > 0);
  CHECK(measures::holds_with(fc, 100.0));

  measures::MeanCurvRecord ec =
      measures::mean_curvature_check(cube, locate(m, {0.5, 0.0, 0.0}), 0.1, cfg);
  CHECK(ec.delta > 0);
  CHECK(measures::holds_with(ec, 100.0));

  // A paraboloid cap hull: strictly convex, so the deficit is positive but
  // controlled by the mean curvature of the 6r ball.
  std::vector<Vec3> pts;
  pts.push_back({0, 0, 0});
  for (int ring = 1; ring <= 5; ++ring) {
    double rr = 0.1 * ring;
    int K = 6 * ring;
    for (int k = 0; k < K; ++k) {
      double ang = 2 * kPi * (k + 0.5 * (ring % 2)) / K;
      pts.push_back({rr * std::cos(ang), rr * std::sin(ang), rr * rr / 2});
    }
  }
  Surface cap = make_polyhedral(build_convex_hull_surface(pts));
  const PolyhedralMesh& cm = cap.require_mesh();
  int apex = -1;
  for (int vtx = 0; vtx < int(cm.positions->size()); ++vtx)
    if (norm((*cm.positions)[size_t(vtx)]) < 1e-12) apex = vtx;
  REQUIRE(apex >= 0);
  SurfacePoint ap = region_center(cap, RegionSpec::vertex_ball(apex, 0.05));
  measures::MeanCurvRecord pc =
      measures::mean_curvature_check(cap, ap, 0.05, cfg);
  CHECK(pc.delta > 0);
  CHECK(measures::holds_with(pc, 100.0));
}

TEST_CASE("estimator config validation rejects bad schedules") {
  EstimatorConfig cfg;
  cfg.ratio = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EstimatorConfig{};
  cfg.count = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EstimatorConfig{};
  cfg.workers = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EstimatorConfig{};
  cfg.count = 1;
  CHECK_THROWS_AS(
      measures::profile(make_flat_torus(1.0, 1.0), RegionSpec::whole(), cfg),
      ConfigError);
  CHECK_THROWS_AS(measures::ball_volume(make_plane(), pt(0, 0), -1.0,
                                        EstimatorConfig{}),
                  ConfigError);
}
