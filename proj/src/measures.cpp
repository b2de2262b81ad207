#include "devlab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "devlab/geodesics.hpp"
#include "devlab/unfold.hpp"

namespace devlab::measures {

namespace {

// Seed labels for the nested estimator stages.
constexpr uint64_t kOuterLabel = 1;
constexpr uint64_t kInnerLabel = 2;
constexpr uint64_t kAreaLabel = 3;

// se = 0 certifies exactness; keep the method tag consistent with it.
MeasureEstimate finish(double value, double se, uint64_t n, Method method) {
  if (se == 0) method = Method::analytic;
  return {value, se, n, method};
}

double tiny_floor(double value) { return 1e-15 * (1.0 + std::abs(value)); }

// === Superset Monte Carlo ball estimator (polyhedral) ======================

struct SupersetBall {
  double r = 0;
  double area = 0;                    // total superset area
  std::vector<int> faces;             // faces carrying window pieces
  std::vector<double> cum;            // cumulative face areas
  std::vector<std::vector<Vec2>> tri;      // face polygons, parallel to faces
  std::vector<double> tri_area;            // face areas
  std::vector<std::vector<WindowPiece>> piece;  // pieces per face slot
  uint64_t states = 0;
};

SupersetBall build_superset(const PolyhedralMesh& m, const SweepSource& src,
                            double r, uint64_t max_states) {
  if (m.has_spike_vertex)
    throw UnsupportedError(
        "ball volume on meshes with cone angles above 2*pi is not supported "
        "(window pieces no longer cover the metric ball)");
  SweepOptions opt;
  opt.radius = r;
  opt.collect_pieces = true;
  opt.max_states = max_states;
  SweepResult res = sweep(m, src, opt);

  SupersetBall out;
  out.r = r;
  out.states = res.states;
  std::vector<int> slot_of(m.faces.size(), -1);
  for (auto& p : res.pieces) {
    int f = p.face;
    if (slot_of[size_t(f)] < 0) {
      slot_of[size_t(f)] = int(out.faces.size());
      out.faces.push_back(f);
      out.tri.push_back(m.face_polygon(f));
      out.tri_area.push_back(m.face_area[size_t(f)]);
      out.piece.emplace_back();
    }
    out.piece[size_t(slot_of[size_t(f)])].push_back(std::move(p));
  }
  out.cum.resize(out.faces.size());
  double acc = 0;
  for (size_t i = 0; i < out.faces.size(); ++i) {
    acc += out.tri_area[i];
    out.cum[i] = acc;
  }
  out.area = acc;
  return out;
}

bool superset_covered(const SupersetBall& sb, size_t slot, Vec2 y) {
  double r2 = sb.r * sb.r;
  for (const auto& p : sb.piece[slot]) {
    if (norm2(y - p.src) < r2 && point_in_convex_polygon(y, p.poly)) return true;
  }
  return false;
}

// Hit-fraction estimate of the ball area; unbiased (value = frac * area).
// The standard error uses a Jeffreys-smoothed fraction so that Monte Carlo
// results never report se = 0.
MeasureEstimate superset_mc(const SupersetBall& sb, int n, Rng& rng) {
  if (sb.area <= 0 || sb.faces.empty()) return finish(0, 0, 0, Method::analytic);
  uint64_t hits = 0;
  for (int j = 0; j < n; ++j) {
    double u = rng.uniform(0, sb.area);
    size_t slot = size_t(
        std::lower_bound(sb.cum.begin(), sb.cum.end(), u) - sb.cum.begin());
    if (slot >= sb.faces.size()) slot = sb.faces.size() - 1;
    Vec2 y = sample_polygon(sb.tri[slot], sb.tri_area[slot], rng);
    if (superset_covered(sb, slot, y)) ++hits;
  }
  double frac = double(hits) / double(n);
  double smooth = (double(hits) + 0.5) / (double(n) + 1.0);
  double se = sb.area * std::sqrt(smooth * (1.0 - smooth) / double(n));
  return {frac * sb.area, se, uint64_t(n), Method::monte_carlo};
}

// === Analytic ball volumes ==================================================

MeasureEstimate analytic_ball(const Surface& s, const SurfacePoint& x,
                              double r, double quad_tol) {
  switch (s.backend) {
    case Backend::plane:
      return analytic_estimate(kPi * r * r);
    case Backend::half_plane:
      return analytic_estimate(halfplane_ball_area(x.p.y, r));
    case Backend::flat_torus:
      return analytic_estimate(torus_ball_area(s.a, s.b, r));
    case Backend::sphere:
      return analytic_estimate(sphere_cap_area(s.R, r));
    case Backend::cone: {
      if (x.p.x == 0) return analytic_estimate(0.5 * s.rho * r * r);
      QuadResult q = cone_ball_area(s.rho, x.p.x, r, quad_tol);
      return finish(q.value, std::max(q.error, tiny_floor(q.value)),
                    uint64_t(q.evals), Method::quadrature);
    }
    default:
      throw UnsupportedError("analytic ball volume needs an analytic backend");
  }
}

// Support radius of v_r on the cone, in units of r: balls centered farther
// than this from the apex are flat (no wrap and no apex inside).
double cone_support_factor(double rho) {
  if (rho >= kPi) return 1.0;
  return 1.0 / std::sin(rho / 2);
}

// === Half-plane strip deviation (closed form) ===============================

// Integral over depth d in [0, w] of the circular-segment area beyond the
// boundary chord: seg(d) = r^2*acos(d/r) - d*sqrt(r^2 - d^2).
double halfplane_segment_integral(double r, double w) {
  w = std::clamp(w, 0.0, r);
  double t = w / r;
  double root = std::sqrt(std::max(0.0, 1.0 - t * t));
  double acos_part = r * r * r * (t * std::acos(t) - root + 1.0);
  double radial = (r * r - w * w);
  double radial_part =
      (r * r * r - radial * std::sqrt(radial)) / 3.0;
  return acos_part - radial_part;
}

// === Weighted ball measure (per-face densities) ============================

struct WeightedBall {
  double value = 0;
  double std_error = 0;
};

// Same piece decomposition as mesh_ball_area, with a per-face density w:
// exact sum of w * |piece ∩ disk| minus an unbiased Monte Carlo estimate of
// the weighted multiplicity excess over the overlap set.
WeightedBall weighted_ball(const PolyhedralMesh& m, const SweepSource& src,
                           double r, const std::vector<double>& w, int n_mc,
                           Rng& rng, uint64_t max_states) {
  SupersetBall sb = build_superset(m, src, r, max_states);
  double exact = 0;
  size_t total_pieces = 0;
  bool overlap_possible = false;
  for (size_t slot = 0; slot < sb.faces.size(); ++slot) {
    double wf = w[size_t(sb.faces[slot])];
    for (const auto& p : sb.piece[slot]) exact += wf * polygon_disk_area(p.poly, p.src, r);
    total_pieces += sb.piece[slot].size();
    if (sb.piece[slot].size() > 1) overlap_possible = true;
  }
  (void)total_pieces;
  if (!overlap_possible) return {exact, 0.0};

  // Proposal: pieces clipped to their disk bounding boxes, area-weighted.
  struct Prop {
    size_t slot;
    std::vector<Vec2> poly;
    double area;
  };
  std::vector<Prop> props;
  std::vector<double> cum;
  double total = 0;
  for (size_t slot = 0; slot < sb.faces.size(); ++slot) {
    if (sb.piece[slot].size() < 2) continue;  // no overlap on this face
    for (const auto& p : sb.piece[slot]) {
      std::vector<Vec2> poly = p.poly;
      poly = clip_halfplane(poly, {p.src.x - r, 0}, {1, 0});
      poly = clip_halfplane(poly, {p.src.x + r, 0}, {-1, 0});
      poly = clip_halfplane(poly, {0, p.src.y - r}, {0, 1});
      poly = clip_halfplane(poly, {0, p.src.y + r}, {0, -1});
      double a = polygon_area(poly);
      if (a <= 0) continue;
      props.push_back({slot, std::move(poly), a});
      total += a;
      cum.push_back(total);
    }
  }
  if (props.empty() || total <= 0) return {exact, 0.0};

  RunningStat stat;
  double r2 = r * r;
  for (int i = 0; i < n_mc; ++i) {
    double u = rng.uniform(0, total);
    size_t pi = size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (pi >= props.size()) pi = props.size() - 1;
    const Prop& pr = props[pi];
    Vec2 y = sample_polygon(pr.poly, pr.area, rng);
    int mult = 0, found = 0;
    double wy = w[size_t(sb.faces[pr.slot])];
    for (size_t q = 0; q < props.size(); ++q) {
      if (props[q].slot != pr.slot) continue;
      if (point_in_convex_polygon(y, props[q].poly, 1e-12 * (r + 1))) ++mult;
    }
    for (const auto& p : sb.piece[pr.slot]) {
      if (norm2(y - p.src) < r2 && point_in_convex_polygon(y, p.poly)) ++found;
    }
    double overcount = found > 1 ? double(found - 1) : 0.0;
    stat.add(overcount * wy * total / std::max(1, mult));
  }
  double corr = stat.mean;
  double se = stat.std_error_of_mean();
  return {exact - corr, se};
}

}  // namespace

// === Config =================================================================

void EstimatorConfig::validate() const {
  if (outer < 1 || inner < 1 || count < 1)
    throw ConfigError("estimator counts must be >= 1");
  if (!(ratio > 0 && ratio < 1))
    throw ConfigError("schedule ratio must satisfy 0 < ratio < 1");
  if (r0 < 0 || !std::isfinite(r0)) throw ConfigError("schedule r0 must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (quad_tol <= 0) throw ConfigError("quad_tol must be positive");
}

std::vector<double> EstimatorConfig::schedule(const Surface& s) const {
  validate();
  double start = r0 > 0 ? r0 : feature_scale(s) / 10.0;
  if (start <= 0) throw ConfigError("schedule start radius must be positive");
  std::vector<double> rs(static_cast<size_t>(count));
  double r = start;
  for (int j = 0; j < count; ++j, r *= ratio) rs[size_t(j)] = r;
  return rs;
}

// === ball_volume ============================================================

namespace {

// Sweep source for a canonical mesh point; corner hits get the dedicated
// vertex source so no wrap-around window is lost.
SweepSource point_source(const PolyhedralMesh& m, const SurfacePoint& x) {
  int ci = corner_index_near(m, MeshPoint{x.face, x.p}, kMemEps);
  if (ci >= 0) return SweepSource::at_vertex(m.vertex_at(x.face, ci));
  return SweepSource::at(MeshPoint{x.face, x.p});
}

}  // namespace

MeasureEstimate ball_volume(const Surface& s, SurfacePoint x, double r,
                            const EstimatorConfig& cfg) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("ball_volume: r must be positive");
  x = canonical_point(s, x);
  if (s.backend != Backend::polyhedral) return analytic_ball(s, x, r, cfg.quad_tol);

  const PolyhedralMesh& m = s.require_mesh();
  SupersetBall sb = build_superset(m, point_source(m, x), r, cfg.max_states);
  Rng rng = Rng::substream(derive_seed(cfg.seed, kInnerLabel), 0);
  return superset_mc(sb, cfg.inner, rng);
}

// === deviation ==============================================================

namespace {

// Deviation via closed forms / 1-D quadrature where the backend admits one.
std::optional<MeasureEstimate> analytic_deviation(const Surface& s,
                                                  const RegionSpec& region,
                                                  double r, double quad_tol) {
  double disk = kPi * r * r;
  switch (s.backend) {
    case Backend::plane:
      return analytic_estimate(0.0);
    case Backend::flat_torus: {
      double v = 1.0 - torus_ball_area(s.a, s.b, r) / disk;
      MeasureEstimate A = area(s, region);
      return finish(A.value * v, A.std_error * std::abs(v), A.n_samples,
                    A.method);
    }
    case Backend::sphere: {
      double v = 1.0 - sphere_cap_area(s.R, r) / disk;
      MeasureEstimate A = area(s, region);
      return finish(A.value * v, A.std_error * std::abs(v), A.n_samples,
                    A.method);
    }
    case Backend::half_plane: {
      if (region.kind == RegionSpec::Kind::boundary_strip) {
        double V = halfplane_segment_integral(r, region.offset) / disk;
        return analytic_estimate(V);
      }
      if (region.kind == RegionSpec::Kind::ball) {
        double cy = region.center.p.y, R = region.radius;
        double lo = std::max(0.0, cy - R), hi = std::min(cy + R, r);
        if (hi <= lo) return analytic_estimate(0.0);
        auto f = [&](double y) {
          double dy = y - cy;
          double chord = 2.0 * std::sqrt(std::max(0.0, R * R - dy * dy));
          double seg = r * r * std::acos(std::clamp(y / r, -1.0, 1.0)) -
                       y * std::sqrt(std::max(0.0, r * r - y * y));
          return chord * seg / disk;
        };
        QuadResult q = integrate_adaptive(f, lo, hi, quad_tol);
        return finish(q.value, std::max(q.error, tiny_floor(q.value)),
                      uint64_t(q.evals), Method::quadrature);
      }
      return std::nullopt;
    }
    case Backend::cone: {
      bool apex_ball =
          (region.kind == RegionSpec::Kind::vertex_ball) ||
          (region.kind == RegionSpec::Kind::ball && region.center.p.x == 0);
      if (!apex_ball) return std::nullopt;
      double R = region.radius;
      double support = r * cone_support_factor(s.rho);
      double hi = std::min(R, support * (1 + 1e-12));
      if (hi <= 0) return analytic_estimate(0.0);
      auto f = [&](double u) {
        double b = u == 0 ? 0.5 * s.rho * r * r
                          : cone_ball_area(s.rho, u, r, quad_tol * 1e-2).value;
        return u * (1.0 - b / disk);
      };
      std::vector<double> breaks = {0.0, hi};
      if (r < hi) breaks.insert(breaks.begin() + 1, r);
      QuadResult q = integrate_piecewise(f, breaks, quad_tol);
      double V = s.rho * q.value;
      return finish(V, std::max(s.rho * q.error, tiny_floor(V)),
                    uint64_t(q.evals), Method::quadrature);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

MeasureEstimate deviation(const Surface& s, const RegionSpec& region, double r,
                          const EstimatorConfig& cfg) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("deviation: r must be positive");

  if (!cfg.force_monte_carlo) {
    auto shortcut = analytic_deviation(s, region, r, cfg.quad_tol);
    if (shortcut) return *shortcut;
  }

  // Nested Monte Carlo. Outer points and inner chains use per-index
  // substreams, so results are identical for any worker count.
  uint64_t n = uint64_t(cfg.outer);
  std::vector<SurfacePoint> xs =
      sample_uniform(s, region, n, derive_seed(cfg.seed, kOuterLabel));
  MeasureEstimate A = area(s, region, uint64_t(cfg.outer) * 4,
                           derive_seed(cfg.seed, kAreaLabel));

  std::vector<double> vals(n, 0.0);
  uint64_t inner_seed = derive_seed(cfg.seed, kInnerLabel);
  double disk = kPi * r * r;
  const PolyhedralMesh* m =
      s.backend == Backend::polyhedral ? s.mesh.get() : nullptr;
  parallel_for_index(n, cfg.workers, [&](uint64_t i) {
    double b;
    if (m) {
      SupersetBall sb =
          build_superset(*m, point_source(*m, xs[i]), r, cfg.max_states);
      Rng rng = Rng::substream(inner_seed, i);
      b = superset_mc(sb, cfg.inner, rng).value;
    } else {
      b = analytic_ball(s, xs[i], r, cfg.quad_tol).value;
    }
    vals[i] = 1.0 - b / disk;
  });

  RunningStat stat;
  for (double v : vals) stat.add(v);
  double mean = stat.mean;
  double sem = stat.std_error_of_mean();
  double value = A.value * mean;
  double se = std::sqrt(A.value * A.value * sem * sem +
                        mean * mean * A.std_error * A.std_error);
  return finish(value, se, n, Method::monte_carlo);
}

// === profile ================================================================

DeviationProfile profile(const Surface& s, const RegionSpec& region,
                         const EstimatorConfig& cfg) {
  cfg.validate();
  if (cfg.count < 2)
    throw ConfigError("profile: schedule needs at least 2 radii for the fit");
  std::vector<double> rs = cfg.schedule(s);

  DeviationProfile out;
  out.region = region;
  out.rows.reserve(rs.size());
  for (size_t j = 0; j < rs.size(); ++j) {
    EstimatorConfig row_cfg = cfg;
    row_cfg.seed = derive_seed(cfg.seed, uint64_t(j));
    MeasureEstimate vr = deviation(s, region, rs[j], row_cfg);
    out.rows.push_back({rs[j], vr, vr.value / rs[j],
                        vr.value / (rs[j] * rs[j]), row_cfg.seed});
  }

  // Weighted least squares of V against c1*r + c2*r^2.
  double max_v = 0;
  for (const auto& row : out.rows) max_v = std::max(max_v, std::abs(row.vr.value));
  double floor = 1e-12 * (1.0 + max_v);
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (const auto& row : out.rows) {
    double sigma = std::max(row.vr.std_error, floor);
    double w = 1.0 / (sigma * sigma);
    double r1 = row.r, r2 = row.r * row.r;
    s11 += w * r1 * r1;
    s12 += w * r1 * r2;
    s22 += w * r2 * r2;
    b1 += w * r1 * row.vr.value;
    b2 += w * r2 * row.vr.value;
  }
  double det = s11 * s22 - s12 * s12;
  if (!(det > 0)) throw ConfigError("profile: degenerate fit design");
  ProfileFit& fit = out.fit;
  fit.c1 = (s22 * b1 - s12 * b2) / det;
  fit.c2 = (s11 * b2 - s12 * b1) / det;
  fit.c1_se = std::sqrt(s22 / det);
  fit.c2_se = std::sqrt(s11 / det);
  fit.cov = -s12 / det;
  fit.c1_ci95 = 1.959963984540054 * fit.c1_se;
  fit.c2_ci95 = 1.959963984540054 * fit.c2_se;
  for (const auto& row : out.rows) {
    double sigma = std::max(row.vr.std_error, floor);
    double resid = row.vr.value - fit.c1 * row.r - fit.c2 * row.r * row.r;
    fit.chi2 += (resid / sigma) * (resid / sigma);
  }
  fit.dof = int(out.rows.size()) - 2;
  fit.chi2_threshold = fit.dof > 0 ? chi2_quantile(0.99, fit.dof) : 0.0;
  fit.unreliable = fit.dof > 0 && fit.chi2 > fit.chi2_threshold;
  return out;
}

// === cone_mass ==============================================================

MeasureEstimate cone_mass(double alpha, double quad_tol) {
  if (!(alpha >= 0) || alpha >= 2 * kPi)
    throw ConfigError("cone_mass: defect must satisfy 0 <= alpha < 2*pi");
  if (alpha == 0) return analytic_estimate(0.0);
  double rho = 2 * kPi - alpha;
  if (rho < 0.01)
    throw ConfigError("cone_mass: defect within 0.01 of 2*pi (needle cone)");
  double support = cone_support_factor(rho);
  double inner_tol = std::max(quad_tol * 1e-2, 1e-13);
  auto f = [&](double u) {
    double b = u == 0 ? 0.5 * rho : cone_ball_area(rho, u, 1.0, inner_tol).value;
    return u * (1.0 - b / kPi);
  };
  std::vector<double> breaks = {0.0, support};
  if (support > 1.0) breaks.insert(breaks.begin() + 1, 1.0);
  QuadResult q = integrate_piecewise(f, breaks, quad_tol);
  double m = rho * q.value;
  double se = rho * q.error + support * support * inner_tol;
  return finish(m, std::max(se, tiny_floor(m)), uint64_t(q.evals),
                Method::quadrature);
}

// === halfspace_boundary_constant ============================================

MeasureEstimate halfspace_boundary_constant(int n) {
  if (n < 1 || n > 8)
    throw ConfigError("halfspace_boundary_constant: n must be in [1, 8]");
  if (n == 1) return analytic_estimate(0.25);
  if (n == 2) return analytic_estimate(2.0 / (3.0 * kPi));
  if (n == 3) return analytic_estimate(3.0 / 16.0);
  double omega_n = unit_ball_volume(n);
  double omega_prev = unit_ball_volume(n - 1);
  double ex = (double(n) - 1.0) / 2.0;
  auto cap = [&](double u) {
    QuadResult inner = integrate_adaptive(
        [&](double t) { return std::pow(std::max(0.0, 1.0 - t * t), ex); }, u,
        1.0, 1e-12);
    return omega_prev * inner.value;
  };
  QuadResult q = integrate_adaptive([&](double u) { return cap(u); }, 0.0, 1.0,
                                    1e-11);
  double c = q.value / omega_n;
  double se = (q.error + 2e-12 * omega_prev) / omega_n;
  return finish(c, std::max(se, tiny_floor(c)), uint64_t(q.evals),
                Method::quadrature);
}

// === exchange_check =========================================================

MeasureSpec MeasureSpec::dirac(SurfacePoint p) {
  MeasureSpec spec;
  spec.kind = Kind::dirac;
  spec.point = p;
  return spec;
}

MeasureSpec MeasureSpec::weighted(std::vector<double> density) {
  MeasureSpec spec;
  spec.kind = Kind::weighted;
  spec.face_density = std::move(density);
  return spec;
}

bool point_in_region(const Surface& s, const SurfacePoint& p,
                     const RegionSpec& region, uint64_t max_states) {
  switch (region.kind) {
    case RegionSpec::Kind::whole:
      return true;
    case RegionSpec::Kind::faces: {
      SurfacePoint c = canonical_point(s, p);
      for (int f : region.face_ids)
        if (f == c.face) return true;
      return false;
    }
    case RegionSpec::Kind::ball:
    case RegionSpec::Kind::vertex_ball: {
      SurfacePoint c = region_center(s, region);
      DistanceAnswer d =
          distance(s, p, c, region.radius + 1e-12, max_states);
      if (!d.value) return false;
      // Radius 0 means the singleton {center} (closed); positive radii are
      // open balls.
      if (region.radius == 0) return *d.value == 0;
      return *d.value < region.radius;
    }
    default:
      throw ConfigError("exchange: unsupported region kind for membership");
  }
}

namespace {

void validate_measure(const Surface& s, const MeasureSpec& spec) {
  if (spec.kind == MeasureSpec::Kind::weighted) {
    const PolyhedralMesh& m = s.require_mesh();
    if (spec.face_density.size() != m.faces.size())
      throw ConfigError("weighted measure needs one density per face");
    for (double w : spec.face_density)
      if (!(w > 0) || !std::isfinite(w))
        throw ConfigError("weighted measure densities must be positive");
  }
}

// Total mass of the measure restricted to the region.
MeasureEstimate measure_mass(const Surface& s, const MeasureSpec& spec,
                             const RegionSpec& region, uint64_t seed);

// Distance from x to the region (0 if inside), capped at `upper`; returns
// kInf when the region is farther than `upper`.
double region_distance(const Surface& s, const SurfacePoint& x,
                       const RegionSpec& region, double upper,
                       uint64_t max_states) {
  switch (region.kind) {
    case RegionSpec::Kind::whole:
      return 0.0;
    case RegionSpec::Kind::ball:
    case RegionSpec::Kind::vertex_ball: {
      SurfacePoint c = region_center(s, region);
      DistanceAnswer d =
          distance(s, x, c, upper + region.radius + 1e-12, max_states);
      if (!d.value) return kInf;
      return std::max(0.0, *d.value - region.radius);
    }
    case RegionSpec::Kind::faces: {
      const PolyhedralMesh& m = s.require_mesh();
      SurfacePoint c = canonical_point(s, x);
      for (int f : region.face_ids)
        if (f == c.face) return 0.0;
      SweepOptions opt;
      opt.radius = upper;
      opt.collect_pieces = true;
      opt.max_states = max_states;
      SweepResult res = sweep(m, SweepSource::at({c.face, c.p}), opt);
      double best = kInf;
      for (const auto& piece : res.pieces) {
        bool in_region = false;
        for (int f : region.face_ids)
          if (f == piece.face) in_region = true;
        if (!in_region) continue;
        best = std::min(best, point_polygon_dist(piece.src, piece.poly));
      }
      return best;
    }
    default:
      throw ConfigError("exchange: unsupported region kind for distance");
  }
}

// Measure of the ball B(x, r) under the given measure spec.
MeasureEstimate measure_ball(const Surface& s, const MeasureSpec& spec,
                             const SurfacePoint& x, double r,
                             const EstimatorConfig& cfg, uint64_t seed) {
  switch (spec.kind) {
    case MeasureSpec::Kind::hausdorff: {
      if (s.backend != Backend::polyhedral)
        return analytic_ball(s, x, r, cfg.quad_tol);
      const PolyhedralMesh& m = s.require_mesh();
      BallArea ba = mesh_ball_area(m, point_source(m, x), r,
                                   uint64_t(cfg.inner), seed, cfg.max_states);
      return finish(ba.value, ba.std_error, uint64_t(cfg.inner),
                    Method::monte_carlo);
    }
    case MeasureSpec::Kind::weighted: {
      const PolyhedralMesh& m = s.require_mesh();
      Rng rng(seed);
      WeightedBall wb = weighted_ball(m, point_source(m, x), r,
                                      spec.face_density, cfg.inner, rng,
                                      cfg.max_states);
      return finish(wb.value, wb.std_error, uint64_t(cfg.inner),
                    Method::monte_carlo);
    }
    case MeasureSpec::Kind::dirac: {
      if (s.backend != Backend::polyhedral) {
        double d = analytic_distance(s, x, spec.point);
        return analytic_estimate(d < r ? 1.0 : 0.0);
      }
      DistanceAnswer d = distance(s, x, spec.point, r, cfg.max_states);
      return analytic_estimate(d.value && *d.value < r ? 1.0 : 0.0);
    }
  }
  throw ConfigError("exchange: unknown measure kind");
}

MeasureEstimate measure_mass(const Surface& s, const MeasureSpec& spec,
                             const RegionSpec& region, uint64_t seed) {
  switch (spec.kind) {
    case MeasureSpec::Kind::hausdorff:
      return area(s, region, 1 << 14, seed);
    case MeasureSpec::Kind::weighted: {
      const PolyhedralMesh& m = s.require_mesh();
      if (region.kind == RegionSpec::Kind::whole) {
        double total = 0;
        for (size_t f = 0; f < m.faces.size(); ++f)
          total += spec.face_density[f] * m.face_area[f];
        return analytic_estimate(total);
      }
      if (region.kind == RegionSpec::Kind::faces) {
        double total = 0;
        for (int f : region.face_ids)
          total += spec.face_density[size_t(f)] * m.face_area[size_t(f)];
        return analytic_estimate(total);
      }
      throw ConfigError(
          "weighted measures support whole-surface and face-set regions");
    }
    case MeasureSpec::Kind::dirac:
      return analytic_estimate(
          point_in_region(s, spec.point, region, 100000) ? 1.0 : 0.0);
  }
  throw ConfigError("exchange: unknown measure kind");
}

// Uniformly distributed sample from the normalized measure on the region.
// Only the kinds accepted by measure_mass appear here.
std::vector<SurfacePoint> sample_measure(const Surface& s,
                                         const MeasureSpec& spec,
                                         const RegionSpec& region, uint64_t n,
                                         uint64_t seed) {
  if (spec.kind == MeasureSpec::Kind::hausdorff)
    return sample_uniform(s, region, n, seed);
  const PolyhedralMesh& m = s.require_mesh();
  std::vector<int> faces;
  if (region.kind == RegionSpec::Kind::whole) {
    faces.resize(m.faces.size());
    for (size_t f = 0; f < faces.size(); ++f) faces[f] = int(f);
  } else if (region.kind == RegionSpec::Kind::faces) {
    faces = region.face_ids;
  } else {
    throw ConfigError(
        "weighted measures support whole-surface and face-set regions");
  }
  std::vector<double> cum(faces.size());
  double acc = 0;
  for (size_t i = 0; i < faces.size(); ++i) {
    acc += spec.face_density[size_t(faces[i])] * m.face_area[size_t(faces[i])];
    cum[i] = acc;
  }
  if (!(acc > 0)) throw ConfigError("weighted measure: empty region");
  std::vector<SurfacePoint> out(n);
  for (uint64_t i = 0; i < n; ++i) {
    Rng rng = Rng::substream(seed, i);
    double u = rng.uniform(0, acc);
    size_t slot =
        size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (slot >= faces.size()) slot = faces.size() - 1;
    int f = faces[slot];
    Vec2 p = sample_polygon(m.face_polygon(f), m.face_area[size_t(f)], rng);
    out[i] = {f, p};
  }
  return out;
}

// Covering region for B(A, r) plus the exact membership indicator; sampling
// runs over the covering region, the indicator keeps the integral honest.
struct RhsDomain {
  RegionSpec cover;
  bool indicator_needed = false;
};

RhsDomain rhs_domain(const RegionSpec& A, double r) {
  RhsDomain d{RegionSpec::whole(), false};
  switch (A.kind) {
    case RegionSpec::Kind::whole:
      d.cover = RegionSpec::whole();
      break;
    case RegionSpec::Kind::ball:
      d.cover = RegionSpec::ball(A.center, A.radius + r);
      break;
    case RegionSpec::Kind::vertex_ball:
      d.cover = RegionSpec::vertex_ball(A.vertex, A.radius + r);
      break;
    case RegionSpec::Kind::faces:
      d.cover = RegionSpec::whole();
      d.indicator_needed = true;
      break;
    default:
      throw ConfigError("exchange: unsupported region kind for B(A, r)");
  }
  return d;
}

}  // namespace

ExchangeRecord exchange_check(const Surface& s, const MeasureSpec& mu,
                              const MeasureSpec& nu, const RegionSpec& A,
                              double r, const EstimatorConfig& cfg) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("exchange: r must be positive");
  validate_measure(s, mu);
  validate_measure(s, nu);

  MeasureSpec nu_c = nu, mu_c = mu;
  if (nu_c.kind == MeasureSpec::Kind::dirac)
    nu_c.point = canonical_point(s, nu_c.point);
  if (mu_c.kind == MeasureSpec::Kind::dirac)
    mu_c.point = canonical_point(s, mu_c.point);

  ExchangeRecord rec;
  uint64_t n = uint64_t(cfg.outer);

  // lhs = integral over A of mu(B(x, r)) dnu(x).
  if (nu_c.kind == MeasureSpec::Kind::dirac) {
    if (point_in_region(s, nu_c.point, A, cfg.max_states)) {
      MeasureEstimate b = measure_ball(s, mu_c, nu_c.point, r, cfg,
                                       derive_seed(cfg.seed, 11));
      rec.lhs = b.value;
      rec.sigma_lhs = b.std_error;
    }
  } else {
    MeasureEstimate massA =
        measure_mass(s, nu_c, A, derive_seed(cfg.seed, 12));
    if (massA.value > 0) {  // nu(A) = 0 leaves lhs at 0 exactly
      std::vector<SurfacePoint> xs =
          sample_measure(s, nu_c, A, n, derive_seed(cfg.seed, 13));
      std::vector<double> vals(n, 0.0);
      uint64_t inner = derive_seed(cfg.seed, 14);
      parallel_for_index(n, cfg.workers, [&](uint64_t i) {
        vals[i] =
            measure_ball(s, mu_c, xs[i], r, cfg, derive_seed(inner, i)).value;
      });
      RunningStat stat;
      for (double v : vals) stat.add(v);
      rec.lhs = massA.value * stat.mean;
      double sem = stat.std_error_of_mean();
      rec.sigma_lhs = std::sqrt(massA.value * massA.value * sem * sem +
                                stat.mean * stat.mean * massA.std_error *
                                    massA.std_error);
    }
  }

  // rhs = integral over B(A, r) of nu(B(x, r)) dmu(x).
  RhsDomain dom = rhs_domain(A, r);
  if (mu_c.kind == MeasureSpec::Kind::dirac) {
    double d = region_distance(s, mu_c.point, A, r, cfg.max_states);
    if (d < r) {
      MeasureEstimate b = measure_ball(s, nu_c, mu_c.point, r, cfg,
                                       derive_seed(cfg.seed, 15));
      rec.rhs = b.value;
      rec.sigma_rhs = b.std_error;
    }
  } else {
    MeasureEstimate massC =
        measure_mass(s, mu_c, dom.cover, derive_seed(cfg.seed, 16));
    // Same sample/inner labels as the lhs: with mu = nu and A the whole
    // surface the two sides then agree bitwise instead of within noise.
    std::vector<SurfacePoint> xs =
        sample_measure(s, mu_c, dom.cover, n, derive_seed(cfg.seed, 13));
    std::vector<double> vals(n, 0.0);
    uint64_t inner = derive_seed(cfg.seed, 14);
    parallel_for_index(n, cfg.workers, [&](uint64_t i) {
      if (dom.indicator_needed &&
          region_distance(s, xs[i], A, r, cfg.max_states) >= r) {
        vals[i] = 0.0;
        return;
      }
      vals[i] =
          measure_ball(s, nu_c, xs[i], r, cfg, derive_seed(inner, i)).value;
    });
    RunningStat stat;
    for (double v : vals) stat.add(v);
    rec.rhs = massC.value * stat.mean;
    double sem = stat.std_error_of_mean();
    rec.sigma_rhs = std::sqrt(massC.value * massC.value * sem * sem +
                              stat.mean * stat.mean * massC.std_error *
                                  massC.std_error);
  }

  double sigma =
      std::sqrt(rec.sigma_lhs * rec.sigma_lhs + rec.sigma_rhs * rec.sigma_rhs);
  rec.holds = rec.lhs <= rec.rhs + 3.0 * sigma;
  return rec;
}

// === bonk_lang_check ========================================================

BonkLangRecord bonk_lang_check(const Surface& s, SurfacePoint x, double r,
                               const EstimatorConfig& cfg, double delta0) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("bonk_lang: r must be positive");
  if (s.backend != Backend::polyhedral && s.backend != Backend::cone)
    throw UnsupportedError("bonk_lang needs a polyhedral or cone surface");
  x = canonical_point(s, x);

  BonkLangRecord rec;

  // Precondition: total |defect| away from one allowed heavy point < delta0,
  // and the ball clear of the mesh boundary where one exists.
  if (s.backend == Backend::cone) {
    rec.precondition_ok = true;  // single cone point, no further defects
  } else {
    const PolyhedralMesh& m = s.require_mesh();
    double total = 0, heaviest = 0;
    for (int v = 0; v < m.n_vertices; ++v) {
      if (m.vertex_boundary[size_t(v)]) continue;
      double d = std::abs(m.defect(v));
      total += d;
      heaviest = std::max(heaviest, d);
    }
    rec.precondition_ok = (total - heaviest) < delta0;
    if (m.has_boundary) {
      SweepOptions opt;
      opt.radius = r;
      opt.collect_boundary_dist = true;
      opt.max_states = cfg.max_states;
      SweepResult res = sweep(m, point_source(m, x), opt);
      if (res.boundary_dist <= r) rec.precondition_ok = false;
    }
  }
  if (!rec.precondition_ok) return rec;

  double disk = kPi * r * r;
  if (s.backend == Backend::cone) {
    MeasureEstimate b = analytic_ball(s, x, r, cfg.quad_tol);
    rec.lhs = std::abs(1.0 - b.value / disk);
    rec.sigma = b.std_error / disk;
    rec.omega_ball = x.p.x < r ? std::abs(2 * kPi - s.rho) : 0.0;
  } else {
    const PolyhedralMesh& m = s.require_mesh();
    BallArea ba =
        mesh_ball_area(m, point_source(m, x), r, uint64_t(cfg.inner),
                       derive_seed(cfg.seed, 21), cfg.max_states);
    rec.lhs = std::abs(1.0 - ba.value / disk);
    rec.sigma = ba.std_error / disk;
    rec.omega_ball =
        curvature_measure(s, RegionSpec::ball(x, r), /*absolute=*/true).value;
  }
  rec.rhs = 3.0 * rec.omega_ball;
  // The 1e-12 floor keeps exact-arithmetic paths (sigma = 0 on flat balls)
  // from failing on last-bit rounding when rhs is exactly zero.
  rec.holds = rec.lhs <= rec.rhs + 3.0 * rec.sigma + 1e-12;
  return rec;
}

// === mean_curvature_check ===================================================

MeanCurvRecord mean_curvature_check(const Surface& s, SurfacePoint x, double r,
                                    const EstimatorConfig& cfg) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("mean_curvature: r must be positive");
  const PolyhedralMesh& m = s.require_mesh();
  if (!m.convex_embedded)
    throw UnsupportedError("mean_curvature_check needs a convex embedded surface");
  x = canonical_point(s, x);

  MeanCurvRecord rec;
  double disk = kPi * r * r;
  BallArea ba = mesh_ball_area(m, point_source(m, x), r, uint64_t(cfg.inner),
                               derive_seed(cfg.seed, 31), cfg.max_states);
  rec.lhs = std::abs(1.0 - ba.value / disk);
  rec.sigma = ba.std_error / disk;
  rec.delta = mean_curvature_measure(s, RegionSpec::ball(x, 6 * r)).value / r;
  return rec;
}

}  // namespace devlab::measures
