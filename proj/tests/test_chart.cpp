// Grid charts: tensor validation, lattice distances against the flat
// metric, derivative-mass oracles, and exact scale equivariance of the
// bias-calibrated deviation check under a power-of-two rescaling.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "devlab/chart.hpp"
#include "devlab/common.hpp"
#include "devlab/io.hpp"

using namespace devlab;
using chart::ChartRect;
using chart::GridChart;
using chart::TensorField;

namespace {

// Pull the tensor back to doubled coordinates: the chart over the doubled
// domain with this field is the original geometry with every length scaled
// by exactly 2 (a homothety), so dimensionless outputs reproduce bit for bit.
TensorField coordinate_doubled(const TensorField& f) {
  return [f](Vec2 p) { return f({p.x / 2, p.y / 2}); };
}

// Worst-case flat-metric overestimate of the 16-direction lattice graph: the
// largest angular gap in {axis, diagonal, knight} directions is atan(1/2),
// and adjacent direction pairs are unimodular, so any node displacement
// splits exactly into integer steps along its two flanking directions. The
// factor is sec(atan(1/2)/2) via the half-angle identity.
const double kEta16 = 1.0 / std::sqrt(0.5 * (1.0 + 2.0 / std::sqrt(5.0)));

}  // namespace

TEST_CASE("build_chart: bi-Lipschitz bound and positive-definite guard") {
  ChartRect dom{0, 0, 1, 1};
  GridChart id = chart::build_chart(dom, 0.01, io::builtin_tensor_field("identity", 0));
  CHECK(id.delta_g == 0.0);
  CHECK(id.nx >= 101);

  GridChart conf = chart::build_chart(
      dom, 0.01, io::builtin_tensor_field("conformal_bump", 0.02));
  CHECK(conf.delta_g == doctest::Approx(0.02).epsilon(1e-9));

  // Indefinite tensor: g12^2 >= g11*g22.
  TensorField bad = [](Vec2) { return std::array<double, 3>{1.0, 2.0, 1.0}; };
  CHECK_THROWS_AS(chart::build_chart(dom, 0.05, bad), ConfigError);

  // Distortion above 1/c_control with the default control constant.
  CHECK_THROWS_AS(chart::build_chart(
                      dom, 0.01, io::builtin_tensor_field("conformal_bump", 0.2)),
                  ConfigError);
  // The same field passes once the control constant is relaxed.
  GridChart ok = chart::build_chart(
      dom, 0.01, io::builtin_tensor_field("conformal_bump", 0.2), 4.0);
  CHECK(ok.delta_g == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("chart_distance: flat metric within the lattice direction bound") {
  ChartRect dom{0, 0, 1, 1};
  GridChart id = chart::build_chart(dom, 0.01, io::builtin_tensor_field("identity", 0));

  // Axis-aligned paths are exact.
  CHECK(chart::chart_distance(id, {0.2, 0.5}, {0.8, 0.5}) ==
        doctest::Approx(0.6).epsilon(1e-12));

  double diag = chart::chart_distance(id, {0.2, 0.2}, {0.8, 0.8});
  CHECK(diag >= 0.6 * std::sqrt(2.0) - 1e-12);
  CHECK(diag <= 0.6 * std::sqrt(2.0) * 1.02);

  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    Vec2 a{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
    Vec2 b{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
    // Snap to nodes so the Euclidean reference is exact.
    a = {std::round(a.x / 0.01) * 0.01, std::round(a.y / 0.01) * 0.01};
    b = {std::round(b.x / 0.01) * 0.01, std::round(b.y / 0.01) * 0.01};
    double d = chart::chart_distance(id, a, b);
    double eu = dist(a, b);
    CHECK(d >= eu - 1e-9);
    CHECK(d <= eu * kEta16 + 1e-9);
  }
}

TEST_CASE("chart_distance: homogeneity and conformal lower bound") {
  ChartRect dom{0, 0, 1, 1};
  TensorField four = [](Vec2) { return std::array<double, 3>{4.0, 0.0, 4.0}; };
  GridChart id = chart::build_chart(dom, 0.02, io::builtin_tensor_field("identity", 0));
  GridChart big = chart::build_chart(dom, 0.02, four, 0.25);
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    Vec2 a{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    Vec2 b{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    double d1 = chart::chart_distance(id, a, b);
    double d2 = chart::chart_distance(big, a, b);
    CHECK(d2 == doctest::Approx(2 * d1).epsilon(1e-12));
  }

  GridChart conf = chart::build_chart(
      dom, 0.02, io::builtin_tensor_field("conformal_bump", 0.05), 10.0);
  for (int i = 0; i < 5; ++i) {
    Vec2 a{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    Vec2 b{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    CHECK(chart::chart_distance(conf, a, b) >=
          chart::chart_distance(id, a, b) - 1e-12);
  }
}

TEST_CASE("metric_derivative_mass: zero for constant fields, |a| for linear") {
  ChartRect dom{0, 0, 1, 1};
  ChartRect all{-1, -1, 2, 2};
  GridChart id = chart::build_chart(dom, 0.01, io::builtin_tensor_field("identity", 0));
  CHECK(chart::metric_derivative_mass(id, all) == 0.0);

  TensorField fixed = [](Vec2) {
    return std::array<double, 3>{1.1, 0.02, 0.95};
  };
  GridChart c = chart::build_chart(dom, 0.01, fixed, 5.0);
  CHECK(chart::metric_derivative_mass(c, all) == 0.0);

  double a = 0.02;
  GridChart lin =
      chart::build_chart(dom, 0.01, io::builtin_tensor_field("linear", a));
  double mass = chart::metric_derivative_mass(lin, all);
  // Node cells tile [0, 1 + h]^2 up to the boundary row, so the discrete
  // total sits within a few percent of |a| * 1.
  CHECK(mass == doctest::Approx(a).epsilon(0.03));
}

TEST_CASE("prop_smooth_check: identity chart is exactly bias-free") {
  ChartRect dom{0, 0, 1, 1};
  GridChart id = chart::build_chart(dom, 0.005, io::builtin_tensor_field("identity", 0));
  chart::SmoothCheckRecord rec =
      chart::prop_smooth_check(id, ChartRect{0.42, 0.42, 0.58, 0.58}, 0.1, {});
  CHECK(rec.flat_bias > 0);     // the lattice overestimates distances
  CHECK(rec.Vr_A == 0.0);       // calibration removes it identically
  CHECK(rec.bound == 0.0);
  CHECK(rec.ratio == 0.0);
  CHECK(rec.n_nodes_A > 0);
  CHECK(rec.n_nodes_B > rec.n_nodes_A);
}

TEST_CASE("prop_smooth_check: exact equivariance under doubling") {
  ChartRect dom{0, 0, 1, 1};
  TensorField base_field = io::builtin_tensor_field("conformal_bump", 0.02);
  GridChart base = chart::build_chart(dom, 0.01, base_field);
  chart::SmoothCheckRecord a =
      chart::prop_smooth_check(base, ChartRect{0.4, 0.4, 0.6, 0.6}, 0.1, {});

  // Double every length: domain, A, h, and r scale by 2 while the tensor
  // values ride along to the doubled coordinates. Each edge weight, Dijkstra
  // threshold, and cell area in the pipeline scales by an exact power of
  // two, and IEEE arithmetic commutes with powers of two, so dimensionless
  // outputs are bitwise equal and dimensionful ones scale exactly.
  GridChart twice = chart::build_chart(ChartRect{0, 0, 2, 2}, 0.02,
                                       coordinate_doubled(base_field));
  chart::SmoothCheckRecord b =
      chart::prop_smooth_check(twice, ChartRect{0.8, 0.8, 1.2, 1.2}, 0.2, {});

  CHECK(a.Vr_A != 0.0);  // the bump must actually bend this chart
  CHECK(b.flat_bias == a.flat_bias);
  CHECK(b.mean_v == a.mean_v);
  CHECK(b.Vr_A == 4 * a.Vr_A);
  CHECK(b.area_A == 4 * a.area_A);
  CHECK(b.bound == 4 * a.bound);
  CHECK(b.ratio == a.ratio);
  CHECK(b.n_nodes_A == a.n_nodes_A);
  CHECK(b.n_nodes_B == a.n_nodes_B);
}

TEST_CASE("prop_smooth_check: resolution and margin guards") {
  ChartRect dom{0, 0, 1, 1};
  GridChart id = chart::build_chart(dom, 0.02, io::builtin_tensor_field("identity", 0));
  ChartRect A{0.4, 0.4, 0.6, 0.6};
  CHECK_THROWS_AS(chart::prop_smooth_check(id, A, 0.05, {}), ConfigError);
  CHECK_THROWS_AS(
      chart::prop_smooth_check(id, ChartRect{0.05, 0.05, 0.2, 0.2}, 0.15, {}),
      ConfigError);
}
