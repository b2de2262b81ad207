// devlab: batch front-end over the estimator library. One process, one
// subcommand per run, machine-readable reports. Every report embeds the seed
// and a hash of its own config block; wall-clock data lives in a separate
// "metadata" key, so stripping that one key makes identical runs byte-equal.
//
// Exit codes: 0 = all asserted checks passed, 1 = a check failed,
// 2 = configuration or input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "devlab/chart.hpp"
#include "devlab/common.hpp"
#include "devlab/flowlab.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/io.hpp"
#include "devlab/measures.hpp"
#include "devlab/mesh.hpp"
#include "devlab/suite.hpp"
#include "devlab/surface.hpp"

namespace {

using devlab::ConfigError;
using devlab::MeasureEstimate;
using devlab::RegionSpec;
using devlab::Surface;
using devlab::SurfacePoint;
using devlab::TangentVector;
using devlab::io::json;
namespace io = devlab::io;
namespace measures = devlab::measures;
namespace flow = devlab::flow;
namespace chart = devlab::chart;
namespace suite = devlab::suite;

struct GlobalOpts {
  uint64_t seed = 42;
  int workers = 1;
  std::string out;               // report directory; empty = stdout only
  std::string format = "json";   // json | csv (csv adds a table file)
};

json parse_inline_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw ConfigError(std::string(what) + " is not valid JSON: " + text);
  return j;
}

Surface parse_surface(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{')
    return io::surface_from_json(parse_inline_json(arg, "surface"));
  return io::load_surface(arg);
}

RegionSpec parse_region(const std::string& arg) {
  return io::region_from_json(parse_inline_json(arg, "region"));
}

SurfacePoint parse_point(const std::string& arg) {
  return io::point_from_json(parse_inline_json(arg, "point"));
}

measures::MeasureSpec parse_measure(const std::string& arg) {
  return io::measure_from_json(parse_inline_json(arg, "measure"));
}

json ci_interval(const MeasureEstimate& e) {
  return json::array(
      {e.value - 1.96 * e.std_error, e.value + 1.96 * e.std_error});
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Assemble the final report around the deterministic config/result pair,
// print it, and (optionally) persist it. Everything is computed before the
// first byte is written, so a throw never leaves partial outputs.
void emit_report(const GlobalOpts& g, const std::string& name,
                 const json& config, const json& result,
                 const std::string& csv_table = "") {
  json report;
  report["subcommand"] = name;
  report["seed"] = g.seed;
  report["workers"] = g.workers;
  report["config"] = config;
  report["config_hash"] = io::hash_hex(config);
  report["result"] = result;
  report["metadata"] = {{"written_at", utc_now()}};
  std::string text = report.dump(2) + "\n";

  std::cout << text;
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    io::write_text_file(g.out + "/" + name + ".json", text);
    if (g.format == "csv" && !csv_table.empty())
      io::write_text_file(g.out + "/" + name + ".csv", csv_table);
  }
}

int fail_check(const GlobalOpts& g, const std::string& invariant) {
  std::cerr << "FAIL: " << invariant << " (seed " << g.seed << ")\n";
  return 1;
}

measures::EstimatorConfig base_cfg(const GlobalOpts& g) {
  measures::EstimatorConfig cfg;
  cfg.seed = g.seed;
  cfg.workers = g.workers;
  return cfg;
}

// === Subcommand handlers ====================================================

int cmd_surface_info(const GlobalOpts& g, const std::string& surface_arg) {
  Surface s = parse_surface(surface_arg);
  json cfgj = {{"surface", surface_arg}};
  emit_report(g, "surface-info", cfgj, io::surface_to_json(s));
  return 0;
}

int cmd_ball_volume(const GlobalOpts& g, const std::string& surface_arg,
                    const std::string& point_arg, double r, int inner) {
  Surface s = parse_surface(surface_arg);
  SurfacePoint x = parse_point(point_arg);
  auto cfg = base_cfg(g);
  cfg.inner = inner;
  MeasureEstimate e = measures::ball_volume(s, x, r, cfg);
  json cfgj = {{"surface", surface_arg},
               {"point", io::point_to_json(x)},
               {"r", r},
               {"inner", inner}};
  emit_report(g, "ball-volume", cfgj, io::estimate_to_json(e));
  return 0;
}

int cmd_deviation(const GlobalOpts& g, const std::string& surface_arg,
                  const std::string& region_arg, double r, int outer,
                  int inner) {
  Surface s = parse_surface(surface_arg);
  RegionSpec region = parse_region(region_arg);
  auto cfg = base_cfg(g);
  cfg.outer = outer;
  cfg.inner = inner;
  MeasureEstimate e = measures::deviation(s, region, r, cfg);
  json cfgj = {{"surface", surface_arg},
               {"region", io::region_to_json(region)},
               {"r", r},
               {"outer", outer},
               {"inner", inner}};
  emit_report(g, "deviation", cfgj, io::estimate_to_json(e));
  return 0;
}

int cmd_profile(const GlobalOpts& g, const std::string& surface_arg,
                const std::string& region_arg, double r0, double ratio,
                int count, int outer, int inner) {
  Surface s = parse_surface(surface_arg);
  RegionSpec region = parse_region(region_arg);
  auto cfg = base_cfg(g);
  cfg.outer = outer;
  cfg.inner = inner;
  cfg.r0 = r0;
  cfg.ratio = ratio;
  cfg.count = count;
  measures::DeviationProfile p = measures::profile(s, region, cfg);
  json cfgj = {{"surface", surface_arg},
               {"region", io::region_to_json(region)},
               {"r0", r0},
               {"ratio", ratio},
               {"count", count},
               {"outer", outer},
               {"inner", inner}};
  emit_report(g, "profile", cfgj, io::profile_to_json(p),
              io::profile_to_csv(p));
  return 0;
}

int cmd_cone_mass(const GlobalOpts& g, double alpha, double quad_tol) {
  MeasureEstimate e = measures::cone_mass(alpha, quad_tol);
  json cfgj = {{"alpha", alpha}, {"quad_tol", quad_tol}};
  json result = {{"alpha", alpha}, {"m", e.value}, {"ci", ci_interval(e)}};
  emit_report(g, "cone-mass", cfgj, result);
  return 0;
}

int cmd_boundary_constant(const GlobalOpts& g, int n) {
  MeasureEstimate e = measures::halfspace_boundary_constant(n);
  json cfgj = {{"n", n}};
  json result = {{"n", n}, {"value", e.value}, {"ci", ci_interval(e)}};
  emit_report(g, "boundary-constant", cfgj, result);
  return 0;
}

int cmd_exchange_check(const GlobalOpts& g, const std::string& surface_arg,
                       const std::string& mu_arg, const std::string& nu_arg,
                       const std::string& region_arg, double r, int outer,
                       int inner) {
  Surface s = parse_surface(surface_arg);
  measures::MeasureSpec mu = parse_measure(mu_arg);
  measures::MeasureSpec nu = parse_measure(nu_arg);
  RegionSpec A = parse_region(region_arg);
  auto cfg = base_cfg(g);
  cfg.outer = outer;
  cfg.inner = inner;
  measures::ExchangeRecord rec = measures::exchange_check(s, mu, nu, A, r, cfg);
  json cfgj = {{"surface", surface_arg},
               {"mu", io::measure_to_json(mu)},
               {"nu", io::measure_to_json(nu)},
               {"region", io::region_to_json(A)},
               {"r", r},
               {"outer", outer},
               {"inner", inner}};
  json result = {{"lhs", rec.lhs},
                 {"rhs", rec.rhs},
                 {"sigma_lhs", rec.sigma_lhs},
                 {"sigma_rhs", rec.sigma_rhs},
                 {"holds", rec.holds}};
  emit_report(g, "exchange-check", cfgj, result);
  if (!rec.holds)
    return fail_check(g, "exchange inequality: lhs <= rhs + 3*sigma violated");
  return 0;
}

int cmd_bonk_lang(const GlobalOpts& g, const std::string& surface_arg,
                  const std::string& point_arg, double r, int inner,
                  double delta0) {
  Surface s = parse_surface(surface_arg);
  SurfacePoint x = parse_point(point_arg);
  auto cfg = base_cfg(g);
  cfg.inner = inner;
  measures::BonkLangRecord rec = measures::bonk_lang_check(s, x, r, cfg, delta0);
  json cfgj = {{"surface", surface_arg},
               {"point", io::point_to_json(x)},
               {"r", r},
               {"inner", inner},
               {"delta0", delta0}};
  json result = {{"precondition_ok", rec.precondition_ok},
                 {"lhs", rec.lhs},
                 {"rhs", rec.rhs},
                 {"omega_ball", rec.omega_ball},
                 {"sigma", rec.sigma},
                 {"holds", rec.holds}};
  emit_report(g, "bonk-lang", cfgj, result);
  if (!rec.precondition_ok)
    throw ConfigError(
        "deficit-vs-curvature precondition failed: ball meets the boundary "
        "or concentrates defect beyond delta0");
  if (!rec.holds)
    return fail_check(
        g, "deficit bound: |v_r(x)| <= 3*|curvature|(B(x,r)) + 3*sigma violated");
  return 0;
}

int cmd_mean_curv_check(const GlobalOpts& g, const std::string& surface_arg,
                        const std::string& point_arg, double r, int inner,
                        double C) {
  Surface s = parse_surface(surface_arg);
  SurfacePoint x = parse_point(point_arg);
  auto cfg = base_cfg(g);
  cfg.inner = inner;
  measures::MeanCurvRecord rec = measures::mean_curvature_check(s, x, r, cfg);
  bool holds = measures::holds_with(rec, C);
  json cfgj = {{"surface", surface_arg},
               {"point", io::point_to_json(x)},
               {"r", r},
               {"inner", inner},
               {"C", C}};
  json result = {{"lhs", rec.lhs},
                 {"delta", rec.delta},
                 {"sigma", rec.sigma},
                 {"C", C},
                 {"holds", holds}};
  emit_report(g, "mean-curv-check", cfgj, result);
  if (!holds)
    return fail_check(g, "mean-curvature bound: lhs <= C*delta^2 violated");
  return 0;
}

int cmd_compare(const GlobalOpts& g, const std::string& surface_arg,
                const std::string& region_arg, double r, int outer,
                int inner) {
  Surface s = parse_surface(surface_arg);
  RegionSpec K = parse_region(region_arg);
  auto cfg = base_cfg(g);
  cfg.outer = outer;
  cfg.inner = inner;
  flow::ComparisonRecord rec = flow::compare_measures(s, K, r, cfg);
  json cfgj = {{"surface", surface_arg},
               {"region", io::region_to_json(K)},
               {"r", r},
               {"outer", outer},
               {"inner", inner}};
  json result = {{"r", rec.r},
                 {"area_K", io::estimate_to_json(rec.area_K)},
                 {"M_TrK", rec.M_TrK},
                 {"H2n_UrK", io::estimate_to_json(rec.H2n_UrK)},
                 {"Vr_from_identity", rec.Vr_from_identity},
                 {"Vr_identity_se", rec.Vr_identity_se},
                 {"Vr_direct", io::estimate_to_json(rec.Vr_direct)},
                 {"agree", rec.agree}};
  emit_report(g, "compare", cfgj, result);
  if (!rec.agree)
    return fail_check(
        g, "tube-mass identity: identity and direct deviation disagree > 3*sigma");
  return 0;
}

int cmd_flow_check(const GlobalOpts& g, const std::string& surface_arg,
                   const std::string& region_arg, double r, double t,
                   uint64_t count, uint64_t rev_count, int jacobians,
                   double rev_tol, double jac_tol) {
  Surface s = parse_surface(surface_arg);
  RegionSpec K = parse_region(region_arg);
  auto cfg = base_cfg(g);

  flow::PreservationRecord pres =
      flow::liouville_preservation_check(s, K, r, t, cfg, count);

  std::vector<SurfacePoint> bases = devlab::sample_uniform(
      s, RegionSpec::whole(), size_t(std::max(1, 3 * jacobians)),
      devlab::derive_seed(g.seed, 21));
  devlab::Rng rng(devlab::derive_seed(g.seed, 22));
  int jac_done = 0, jac_skipped = 0;
  double jac_max = 0;
  for (size_t i = 0; i < bases.size() && jac_done < jacobians; ++i) {
    TangentVector v;
    v.base = bases[i];
    double ang = rng.uniform(0, 2 * devlab::kPi);
    double speed = rng.uniform(0.5, 1.5);
    v.dir = {speed * std::cos(ang), speed * std::sin(ang)};
    flow::JacobianRecord jr = flow::jacobian_check(s, v, t);
    if (!jr.ok) {
      jac_skipped++;
      continue;
    }
    jac_done++;
    jac_max = std::max(jac_max, std::abs(jr.det - 1.0));
  }

  flow::ReversibilityRecord rev = flow::reversibility_check(
      s, K, r, t, rev_count, devlab::derive_seed(g.seed, 23), g.workers);

  bool pres_ok = pres.holds;
  bool jac_ok = jac_done == jacobians && jac_max <= jac_tol;
  bool rev_ok = rev.max_residual <= rev_tol && rev.chart_mismatches == 0;

  json cfgj = {{"surface", surface_arg},
               {"region", io::region_to_json(K)},
               {"r", r},
               {"t", t},
               {"count", count},
               {"rev_count", rev_count},
               {"jacobians", jacobians},
               {"rev_tol", rev_tol},
               {"jac_tol", jac_tol}};
  json result = {
      {"preservation",
       {{"M_A", pres.M_A},
        {"M_phi_A", pres.M_phi_A},
        {"M_phi_A_se", pres.M_phi_A_se},
        {"discrepancy", pres.discrepancy},
        {"sigma", pres.sigma},
        {"vertex_loss", pres.vertex_loss},
        {"count", pres.count},
        {"holds", pres_ok}}},
      {"jacobian",
       {{"requested", jacobians},
        {"computed", jac_done},
        {"skipped_stencil", jac_skipped},
        {"max_abs_det_minus_1", jac_max},
        {"tolerance", jac_tol},
        {"holds", jac_ok}}},
      {"reversibility",
       {{"count", rev.count},
        {"completed", rev.completed},
        {"max_residual", rev.max_residual},
        {"vertex_hit_fraction", rev.vertex_hit_fraction},
        {"chart_mismatches", rev.chart_mismatches},
        {"tolerance", rev_tol},
        {"holds", rev_ok}}},
      {"holds", pres_ok && jac_ok && rev_ok}};
  emit_report(g, "flow-check", cfgj, result);
  if (!pres_ok)
    return fail_check(g,
                      "phase-volume preservation: discrepancy exceeds "
                      "3*sigma + vertex_loss*M_A");
  if (!jac_ok)
    return fail_check(g, "flow Jacobian: |det - 1| exceeds tolerance");
  if (!rev_ok)
    return fail_check(g, "flow reversibility: residual exceeds tolerance");
  return 0;
}

int cmd_prop_smooth(const GlobalOpts& g, const std::string& field_name,
                    double amplitude, const std::string& field_csv,
                    double snap_tol, double h, double c_control,
                    std::vector<double> radii,
                    const std::vector<double>& domain,
                    const std::vector<double>& region) {
  chart::TensorField field =
      field_csv.empty() ? io::builtin_tensor_field(field_name, amplitude)
                        : io::tensor_field_from_csv(field_csv, snap_tol);
  chart::ChartRect dom{domain[0], domain[1], domain[2], domain[3]};
  chart::ChartRect A{region[0], region[1], region[2], region[3]};
  chart::GridChart c = chart::build_chart(dom, h, field, c_control);
  chart::SmoothCheckConfig scfg;
  scfg.workers = g.workers;
  std::sort(radii.rbegin(), radii.rend());

  json rows = json::array();
  std::string csv = "r,Vr_A,bound,ratio,flat_bias,area_A\n";
  for (double r : radii) {
    chart::SmoothCheckRecord rec = chart::prop_smooth_check(c, A, r, scfg);
    rows.push_back({{"r", rec.r},
                    {"Vr_A", rec.Vr_A},
                    {"bound", rec.bound},
                    {"ratio", rec.ratio},
                    {"flat_bias", rec.flat_bias},
                    {"area_A", rec.area_A},
                    {"mean_v", rec.mean_v},
                    {"n_nodes_A", rec.n_nodes_A},
                    {"n_nodes_B", rec.n_nodes_B}});
    csv += io::format_double(rec.r) + "," + io::format_double(rec.Vr_A) + "," +
           io::format_double(rec.bound) + "," + io::format_double(rec.ratio) +
           "," + io::format_double(rec.flat_bias) + "," +
           io::format_double(rec.area_A) + "\n";
  }
  json cfgj = {{"field", field_csv.empty() ? field_name : field_csv},
               {"amplitude", amplitude},
               {"h", h},
               {"c_control", c_control},
               {"domain", domain},
               {"A", region},
               {"r", radii}};
  emit_report(g, "prop-smooth", cfgj, {{"rows", rows}}, csv);
  return 0;
}

int cmd_suite(const GlobalOpts& g, const std::string& catalog,
              std::vector<int> ids) {
  if (catalog != "default")
    throw ConfigError("unknown catalog: " + catalog + " (only: default)");
  suite::SuiteOptions opt;
  opt.seed = g.seed;
  opt.workers = g.workers;
  std::vector<suite::CriterionResult> results = suite::run_suite(opt, ids);
  json report = suite::suite_report(results, opt);
  json cfgj = {{"catalog", catalog}, {"ids", ids}};
  emit_report(g, "suite", cfgj, report);
  bool all = true;
  for (const auto& cr : results) {
    std::cerr << (cr.passed ? "PASS" : "FAIL") << " criterion " << cr.id
              << " (" << cr.name << ")\n";
    all = all && cr.passed;
  }
  if (!all) return fail_check(g, "acceptance catalog: a criterion failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deviation measures, curvature profiles, and geodesic flow "
               "checks on model surfaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed (stamped into every report)");
  app.add_option("--workers", g.workers, "worker threads (never affects results)");
  app.add_option("--out", g.out, "directory for report files");
  app.add_option("--format", g.format, "json | csv (csv adds a table file)")
      ->check(CLI::IsMember({"json", "csv"}));

  // Shared option storage; each subcommand binds the subset it uses.
  std::string surface, region = R"({"kind":"whole"})", point, mu, nu;
  double r = 0.1, r0 = 0, ratio = 0.5, alpha = 0.1, t = 1.0;
  double quad_tol = 1e-10, delta0 = 0.5, Cbound = 100.0;
  double rev_tol = 1e-9, jac_tol = 1e-6, amplitude = 0.02, snap_tol = 1e-9;
  double h = 0.01, c_control = 20.0;
  int outer = 4096, inner = 4096, count = 7, n = 2, jacobians = 20;
  uint64_t pres_count = 400000, rev_count = 10000;
  std::string field = "identity", field_csv, catalog = "default";
  std::vector<double> radii = {0.1, 0.05};
  std::vector<double> domain = {0, 0, 1, 1}, regionA = {0.3, 0.3, 0.7, 0.7};
  std::vector<int> ids;

  auto* c_info = app.add_subcommand("surface-info", "describe a surface");
  c_info->add_option("--surface", surface, "path or inline JSON descriptor")
      ->required();

  auto* c_ball = app.add_subcommand("ball-volume", "measure of a metric ball");
  c_ball->add_option("--surface", surface)->required();
  c_ball->add_option("--point", point, "inline JSON point")->required();
  c_ball->add_option("--r", r, "radius")->required();
  c_ball->add_option("--inner", inner, "samples for the ball estimate");

  auto* c_dev = app.add_subcommand("deviation", "ball-volume deficit over a region");
  c_dev->add_option("--surface", surface)->required();
  c_dev->add_option("--region", region, "inline JSON region");
  c_dev->add_option("--r", r)->required();
  c_dev->add_option("--outer", outer);
  c_dev->add_option("--inner", inner);

  auto* c_prof = app.add_subcommand("profile", "deviation across a radius schedule, with linear+quadratic fit");
  c_prof->add_option("--surface", surface)->required();
  c_prof->add_option("--region", region);
  c_prof->add_option("--r0", r0, "schedule start (0 = from feature scale)");
  c_prof->add_option("--ratio", ratio);
  c_prof->add_option("--count", count);
  c_prof->add_option("--outer", outer);
  c_prof->add_option("--inner", inner);

  auto* c_cone = app.add_subcommand("cone-mass", "apex deviation coefficient of a cone with given defect");
  c_cone->add_option("--alpha", alpha, "cone defect in (0, 2*pi)")->required();
  c_cone->add_option("--quad-tol", quad_tol);

  auto* c_bc = app.add_subcommand("boundary-constant", "half-space boundary density constant in dimension n");
  c_bc->add_option("--n", n, "dimension >= 1")->required();

  auto* c_ex = app.add_subcommand("exchange-check", "two-measure ball-mass exchange inequality");
  c_ex->add_option("--surface", surface)->required();
  c_ex->add_option("--mu", mu, "inline JSON measure")->required();
  c_ex->add_option("--nu", nu, "inline JSON measure")->required();
  c_ex->add_option("--region", region);
  c_ex->add_option("--r", r)->required();
  c_ex->add_option("--outer", outer);
  c_ex->add_option("--inner", inner);

  auto* c_bl = app.add_subcommand("bonk-lang", "pointwise deficit vs curvature mass of the ball");
  c_bl->add_option("--surface", surface)->required();
  c_bl->add_option("--point", point)->required();
  c_bl->add_option("--r", r)->required();
  c_bl->add_option("--inner", inner);
  c_bl->add_option("--delta0", delta0, "defect concentration threshold");

  auto* c_mc = app.add_subcommand("mean-curv-check", "pointwise deficit vs squared scale-free mean curvature");
  c_mc->add_option("--surface", surface)->required();
  c_mc->add_option("--point", point)->required();
  c_mc->add_option("--r", r)->required();
  c_mc->add_option("--inner", inner);
  c_mc->add_option("--C", Cbound, "constant to test lhs <= C*delta^2");

  auto* c_cmp = app.add_subcommand("compare", "tube-mass identity vs direct deviation");
  c_cmp->add_option("--surface", surface)->required();
  c_cmp->add_option("--region", region);
  c_cmp->add_option("--r", r)->required();
  c_cmp->add_option("--outer", outer);
  c_cmp->add_option("--inner", inner);

  auto* c_flow = app.add_subcommand("flow-check", "phase-volume preservation + Jacobians + reversibility");
  c_flow->add_option("--surface", surface)->required();
  c_flow->add_option("--region", region);
  c_flow->add_option("--r", r, "speed cap of the phase region")->required();
  c_flow->add_option("--t", t, "flow time")->required();
  c_flow->add_option("--count", pres_count, "phase samples for preservation");
  c_flow->add_option("--rev-count", rev_count, "samples for reversibility");
  c_flow->add_option("--jacobians", jacobians, "finite-difference Jacobians");
  c_flow->add_option("--rev-tol", rev_tol);
  c_flow->add_option("--jac-tol", jac_tol);

  auto* c_ps = app.add_subcommand("prop-smooth", "deviation vs metric-derivative mass on a grid chart");
  c_ps->add_option("--field", field, "identity | conformal_bump | linear");
  c_ps->add_option("--amplitude", amplitude);
  c_ps->add_option("--field-csv", field_csv, "CSV node table x,y,g11,g12,g22");
  c_ps->add_option("--snap-tol", snap_tol);
  c_ps->add_option("--h", h, "grid step");
  c_ps->add_option("--c-control", c_control, "bi-Lipschitz control constant");
  c_ps->add_option("--r", radii, "radii (repeatable)");
  c_ps->add_option("--domain", domain, "x0 y0 x1 y1")->expected(4);
  c_ps->add_option("--A", regionA, "x0 y0 x1 y1")->expected(4);

  auto* c_suite = app.add_subcommand("suite", "run the acceptance catalog");
  c_suite->add_option("--catalog", catalog, "catalog name (default)");
  c_suite->add_option("--ids", ids, "criterion ids (default: all twelve)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // flag/usage problems are config errors
  }

  try {
    if (*c_info) return cmd_surface_info(g, surface);
    if (*c_ball) return cmd_ball_volume(g, surface, point, r, inner);
    if (*c_dev) return cmd_deviation(g, surface, region, r, outer, inner);
    if (*c_prof)
      return cmd_profile(g, surface, region, r0, ratio, count, outer, inner);
    if (*c_cone) return cmd_cone_mass(g, alpha, quad_tol);
    if (*c_bc) return cmd_boundary_constant(g, n);
    if (*c_ex)
      return cmd_exchange_check(g, surface, mu, nu, region, r, outer, inner);
    if (*c_bl) return cmd_bonk_lang(g, surface, point, r, inner, delta0);
    if (*c_mc) return cmd_mean_curv_check(g, surface, point, r, inner, Cbound);
    if (*c_cmp) return cmd_compare(g, surface, region, r, outer, inner);
    if (*c_flow)
      return cmd_flow_check(g, surface, region, r, t, pres_count, rev_count,
                            jacobians, rev_tol, jac_tol);
    if (*c_ps)
      return cmd_prop_smooth(g, field, amplitude, field_csv, snap_tol, h,
                             c_control, radii, domain, regionA);
    if (*c_suite) return cmd_suite(g, catalog, ids);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << " (seed " << g.seed << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << " (seed " << g.seed << ")\n";
    return 2;
  }
}
