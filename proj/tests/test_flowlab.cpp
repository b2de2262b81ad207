// Phase-space machinery: deterministic phase sampling, the tube-mass
// identity wiring, Jacobians of the flow map, reversibility, and
// phase-volume preservation on flat and polyhedral surfaces.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/flowlab.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/measures.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"
#include "helpers.hpp"

using namespace devlab;
using measures::EstimatorConfig;

namespace {

EstimatorConfig cfg_with(uint64_t seed, uint64_t outer = 1024,
                         uint64_t inner = 1024) {
  EstimatorConfig cfg;
  cfg.seed = seed;
  cfg.outer = outer;
  cfg.inner = inner;
  return cfg;
}

}  // namespace

TEST_CASE("liouville_sample: deterministic prefixes, in-region, norm < r") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  RegionSpec K = RegionSpec::faces({0, 1});
  auto a = flow::liouville_sample(s, K, 0.3, 12, 99);
  auto b = flow::liouville_sample(s, K, 0.3, 5, 99);
  REQUIRE(a.size() == 12);
  REQUIRE(b.size() == 5);
  for (size_t i = 0; i < b.size(); ++i) {
    CHECK(a[i].base.face == b[i].base.face);
    CHECK(a[i].base.p.x == b[i].base.p.x);
    CHECK(a[i].dir.x == b[i].dir.x);
  }
  for (const auto& v : a) {
    CHECK(norm(v.dir) < 0.3);
    CHECK(measures::point_in_region(s, v.base, K));
  }
  CHECK(flow::liouville_sample(s, K, 0.3, 0, 99).empty());
}

TEST_CASE("tube-mass identity: phase mass and direct deviation agree") {
  Surface mesh_torus = make_polyhedral(make_flat_torus_mesh(1.0, 1.0, 4));
  flow::ComparisonRecord rec = flow::compare_measures(
      mesh_torus, RegionSpec::whole(), 0.1, cfg_with(60));
  CHECK(rec.M_TrK == doctest::Approx(kPi * 0.01).epsilon(1e-12));
  CHECK(rec.agree);
  double combined = std::sqrt(rec.Vr_identity_se * rec.Vr_identity_se +
                              rec.Vr_direct.std_error * rec.Vr_direct.std_error);
  CHECK(std::abs(rec.Vr_from_identity) <= 3 * combined + 1e-12);

  Surface torus = make_flat_torus(1.0, 1.0);
  flow::ComparisonRecord an =
      flow::compare_measures(torus, RegionSpec::whole(), 0.1, cfg_with(61));
  CHECK(an.agree);
}

TEST_CASE("phase volume is preserved on the flat torus mesh") {
  Surface s = make_polyhedral(make_flat_torus_mesh(1.0, 1.0, 4));
  flow::PreservationRecord rec = flow::liouville_preservation_check(
      s, RegionSpec::whole(), 0.1, 1.0, cfg_with(62), 200000);
  CHECK(rec.M_A == doctest::Approx(kPi * 0.01).epsilon(1e-12));
  CHECK(rec.vertex_loss == 0.0);
  CHECK(rec.holds);
  CHECK(std::abs(rec.M_phi_A - rec.M_A) <= 4 * rec.sigma + 1e-12);
}

TEST_CASE("phase volume is preserved over a cube face pair") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  flow::PreservationRecord rec = flow::liouville_preservation_check(
      s, RegionSpec::faces({0, 1}), 0.1, 0.5, cfg_with(63), 150000);
  CHECK(rec.holds);
  CHECK(rec.vertex_loss >= 0.0);
  CHECK(rec.vertex_loss < 0.05);
}

TEST_CASE("flow Jacobians: unit determinant on flat and polyhedral charts") {
  Surface torus = make_polyhedral(make_flat_torus_mesh(1.0, 1.0, 4));
  auto tv = flow::liouville_sample(torus, RegionSpec::whole(), 0.8, 20, 64);
  int ok = 0;
  for (const auto& v : tv) {
    flow::JacobianRecord jr = flow::jacobian_check(torus, v, 0.7);
    if (!jr.ok) continue;
    ++ok;
    CHECK(std::abs(jr.det - 1.0) <= 1e-8);
  }
  CHECK(ok >= 18);

  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  auto cv = flow::liouville_sample(cube, RegionSpec::whole(), 0.8, 30, 65);
  ok = 0;
  for (const auto& v : cv) {
    flow::JacobianRecord jr = flow::jacobian_check(cube, v, 0.8);
    if (!jr.ok) continue;
    ++ok;
    CHECK(std::abs(jr.det - 1.0) <= 1e-6);
  }
  CHECK(ok >= 15);

  TangentVector sv;
  sv.base.p = {1.0, 1.0};
  sv.dir = {0.3, 0.2};
  CHECK_THROWS_AS(flow::jacobian_check(make_sphere(1.0), sv, 0.5), UnsupportedError);
}

TEST_CASE("flow-negate-flow-negate returns every sampled vector") {
  Surface cube = make_polyhedral(make_cube_mesh(1.0, 1));
  flow::ReversibilityRecord r1 =
      flow::reversibility_check(cube, RegionSpec::whole(), 0.8, 1.5, 2000, 66);
  CHECK(r1.count == 2000);
  CHECK(r1.chart_mismatches == 0);
  CHECK(r1.vertex_hit_fraction < 0.05);
  CHECK(r1.completed >= uint64_t(2000 * 0.95));
  CHECK(r1.max_residual <= 1e-9);

  Surface ds = make_polyhedral(make_doubled_square_mesh(1.0, 2));
  flow::ReversibilityRecord r2 =
      flow::reversibility_check(ds, RegionSpec::whole(), 0.8, 1.5, 2000, 67);
  CHECK(r2.chart_mismatches == 0);
  CHECK(r2.max_residual <= 1e-9);

  flow::ReversibilityRecord r3 = flow::reversibility_check(
      make_sphere(1.0), RegionSpec::whole(), 1.0, 2.0, 500, 68);
  CHECK(r3.completed == 500);
  CHECK(r3.max_residual <= 1e-9);

  // Parallel runs reproduce the single-worker result bit for bit.
  flow::ReversibilityRecord r4 =
      flow::reversibility_check(cube, RegionSpec::whole(), 0.8, 1.5, 2000, 66, 4);
  CHECK(r4.max_residual == r1.max_residual);
  CHECK(r4.completed == r1.completed);
}

TEST_CASE("total exponential: lattice translation on the flat torus") {
  Surface s = make_flat_torus(1.0, 1.0);
  TangentVector v;
  v.base.p = {0.9, 0.9};
  v.dir = {0.3, 0.4};
  flow::TotalExpResult res = flow::total_exponential(s, v);
  REQUIRE(res.status == FlowStatus::completed);
  REQUIRE(res.target.has_value());
  CHECK(res.source.p.x == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(res.target->p.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(res.target->p.y == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("total exponential: endpoint lies within arclength of the source") {
  Surface s = make_polyhedral(make_cube_mesh(1.0, 1));
  auto tv = flow::liouville_sample(s, RegionSpec::whole(), 0.7, 50, 69);
  for (const auto& v : tv) {
    flow::TotalExpResult res = flow::total_exponential(s, v);
    if (res.status != FlowStatus::completed) continue;
    DistanceAnswer d = distance(s, res.source, *res.target);
    REQUIRE(d.value.has_value());
    CHECK(*d.value <= norm(v.dir) + 1e-9);
  }
}
