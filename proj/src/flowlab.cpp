#include "devlab/flowlab.hpp"

#include <algorithm>
#include <cmath>

namespace devlab::flow {

namespace {

constexpr uint64_t kBaseLabel = 1;
constexpr uint64_t kFiberLabel = 2;

double wrap_delta(double d, double period) {
  return d - period * std::round(d / period);
}

// === Residuals between tangent vectors =====================================

Vec3 sphere_embed(double R, Vec2 p) {
  double st = std::sin(p.x), ct = std::cos(p.x);
  double sp = std::sin(p.y), cp = std::cos(p.y);
  return Vec3{R * st * cp, R * st * sp, R * ct};
}

Vec3 sphere_velocity(Vec2 p, Vec2 dir) {
  double st = std::sin(p.x), ct = std::cos(p.x);
  double sp = std::sin(p.y), cp = std::cos(p.y);
  Vec3 e_th{ct * cp, ct * sp, -st};
  Vec3 e_ph{-sp, cp, 0};
  return e_th * dir.x + e_ph * dir.y;
}

// Base displacement plus direction difference, both in v's chart; negative
// when the return chart cannot be reconciled with the starting chart.
double reversal_residual(const Surface& s, const TangentVector& v,
                         const TangentVector& u) {
  switch (s.backend) {
    case Backend::plane:
    case Backend::half_plane:
      return dist(u.base.p, v.base.p) + dist(u.dir, v.dir);
    case Backend::flat_torus: {
      double dx = wrap_delta(u.base.p.x - v.base.p.x, s.a);
      double dy = wrap_delta(u.base.p.y - v.base.p.y, s.b);
      return std::hypot(dx, dy) + dist(u.dir, v.dir);
    }
    case Backend::sphere: {
      double base = norm(sphere_embed(s.R, u.base.p) - sphere_embed(s.R, v.base.p));
      double dir =
          norm(sphere_velocity(u.base.p, u.dir) - sphere_velocity(v.base.p, v.dir));
      return base + dir;
    }
    case Backend::cone: {
      double base = analytic_distance(s, u.base, v.base);
      return base + dist(u.dir, v.dir);
    }
    case Backend::polyhedral: {
      const PolyhedralMesh& m = s.require_mesh();
      if (u.base.face == v.base.face)
        return dist(u.base.p, v.base.p) + dist(u.dir, v.dir);
      double best = -1;
      for (int k = 0; k < 3; ++k) {
        if (m.nbr[size_t(v.base.face)][size_t(k)] != u.base.face) continue;
        int kr = m.nbr_edge[size_t(v.base.face)][size_t(k)];
        const Xform& X = m.trans[size_t(u.base.face)][size_t(kr)];
        double cand = dist(X.apply(u.base.p), v.base.p) +
                      dist(X.linear(u.dir), v.dir);
        if (best < 0 || cand < best) best = cand;
      }
      return best;  // -1 when not adjacent
    }
  }
  return -1;
}

// === Jacobian helpers =======================================================

struct PhaseEnd {
  std::array<double, 4> q{};       // (p1, p2, w1, w2) in the end chart
  std::vector<int> signature;      // edge/face ids crossed, then end face
};

std::optional<PhaseEnd> flow_phase(const Surface& s, int face, Vec2 p, Vec2 w,
                                   double t) {
  FlowResult res =
      geodesic_flow(s, TangentVector{{face, p}, w}, t, /*record_events=*/true);
  if (res.status != FlowStatus::completed || !res.end) return std::nullopt;
  PhaseEnd out;
  out.q = {res.end->base.p.x, res.end->base.p.y, res.end->dir.x,
           res.end->dir.y};
  out.signature.reserve(2 * res.events.size() + 1);
  for (const auto& e : res.events) {
    out.signature.push_back(e.edge);
    out.signature.push_back(e.face);
  }
  out.signature.push_back(res.end->base.face);
  return out;
}

double det4(const std::array<std::array<double, 4>, 4>& a) {
  auto det3 = [](double a00, double a01, double a02, double a10, double a11,
                 double a12, double a20, double a21, double a22) {
    return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
           a02 * (a10 * a21 - a11 * a20);
  };
  double d = 0;
  for (int j = 0; j < 4; ++j) {
    int c[3], ci = 0;
    for (int k = 0; k < 4; ++k)
      if (k != j) c[ci++] = k;
    double minor = det3(a[1][size_t(c[0])], a[1][size_t(c[1])], a[1][size_t(c[2])],
                        a[2][size_t(c[0])], a[2][size_t(c[1])], a[2][size_t(c[2])],
                        a[3][size_t(c[0])], a[3][size_t(c[1])], a[3][size_t(c[2])]);
    d += ((j % 2 == 0) ? 1.0 : -1.0) * a[0][size_t(j)] * minor;
  }
  return d;
}

// === Region membership ======================================================

bool base_in_region(const Surface& s, const SurfacePoint& x,
                    const RegionSpec& K, uint64_t max_states) {
  switch (K.kind) {
    case RegionSpec::Kind::whole:
      return true;
    case RegionSpec::Kind::faces:
      for (int f : K.face_ids)
        if (f == x.face) return true;
      return false;
    case RegionSpec::Kind::ball:
    case RegionSpec::Kind::vertex_ball: {
      SurfacePoint c = region_center(s, K);
      if (s.backend != Backend::polyhedral)
        return analytic_distance(s, x, c) < K.radius;
      DistanceAnswer d = distance(s, x, c, K.radius, max_states);
      return d.value.has_value() && *d.value < K.radius;
    }
    default:
      throw ConfigError("phase check: unsupported base region kind");
  }
}

// Base superset covering everything reachable from K in arclength below d:
// metric balls enlarge exactly to balls of radius R + d; face sets and the
// whole surface fall back to the whole surface.
RegionSpec enlarged_base(const RegionSpec& K, double d) {
  switch (K.kind) {
    case RegionSpec::Kind::whole:
    case RegionSpec::Kind::faces:
    case RegionSpec::Kind::boundary_strip:
      return RegionSpec::whole();
    case RegionSpec::Kind::ball:
      return RegionSpec::ball(K.center, K.radius + d);
    case RegionSpec::Kind::vertex_ball:
      return RegionSpec::vertex_ball(K.vertex, K.radius + d);
  }
  return RegionSpec::whole();
}

}  // namespace

// === liouville_sample =======================================================

std::vector<TangentVector> liouville_sample(const Surface& s,
                                            const RegionSpec& K, double r,
                                            uint64_t count, uint64_t seed) {
  if (!(r > 0)) throw ConfigError("liouville_sample: r must be positive");
  if (count == 0) return {};
  std::vector<SurfacePoint> bases =
      sample_uniform(s, K, count, derive_seed(seed, kBaseLabel));
  uint64_t fiber_seed = derive_seed(seed, kFiberLabel);
  std::vector<TangentVector> out(count);
  for (uint64_t i = 0; i < count; ++i) {
    Rng rng = Rng::substream(fiber_seed, i);
    double ang = rng.uniform(0, 2 * kPi);
    double nrm = r * std::sqrt(rng.next_double());
    out[i] = {bases[i], {nrm * std::cos(ang), nrm * std::sin(ang)}};
  }
  return out;
}

// === total_exponential ======================================================

TotalExpResult total_exponential(const Surface& s, const TangentVector& v,
                                 uint64_t max_events) {
  if (!(norm(v.dir) > 0))
    throw ConfigError("total_exponential: |v| must be positive");
  FlowResult res = exp_map(s, v, max_events);
  TotalExpResult out;
  out.source = v.base;
  out.status = res.status;
  if (res.end) out.target = res.end->base;
  return out;
}

// === compare_measures =======================================================

ComparisonRecord compare_measures(const Surface& s, const RegionSpec& K,
                                  double r,
                                  const measures::EstimatorConfig& cfg) {
  cfg.validate();
  if (!(r > 0)) throw ConfigError("compare_measures: r must be positive");
  double disk = kPi * r * r;

  ComparisonRecord rec;
  rec.r = r;
  rec.area_K = area(s, K, 1 << 16, derive_seed(cfg.seed, 40));
  rec.M_TrK = disk * rec.area_K.value;

  bool homogeneous = !cfg.force_monte_carlo &&
                     (s.backend == Backend::plane ||
                      s.backend == Backend::flat_torus ||
                      s.backend == Backend::sphere);
  if (homogeneous) {
    double b = s.backend == Backend::plane ? disk
               : s.backend == Backend::flat_torus
                   ? torus_ball_area(s.a, s.b, r)
                   : sphere_cap_area(s.R, r);
    double se = rec.area_K.std_error * b;
    rec.H2n_UrK = {rec.area_K.value * b, se, rec.area_K.n_samples,
                   se == 0 ? Method::analytic : rec.area_K.method};
    rec.Vr_identity_se = rec.area_K.std_error * std::abs(1.0 - b / disk);
  } else {
    uint64_t n = uint64_t(cfg.outer);
    std::vector<SurfacePoint> xs =
        sample_uniform(s, K, n, derive_seed(cfg.seed, 41));
    uint64_t inner = derive_seed(cfg.seed, 42);
    std::vector<double> vals(n, 0.0);
    parallel_for_index(n, cfg.workers, [&](uint64_t i) {
      measures::EstimatorConfig inner_cfg = cfg;
      inner_cfg.seed = derive_seed(inner, i);
      vals[i] = measures::ball_volume(s, xs[i], r, inner_cfg).value;
    });
    RunningStat stat;
    for (double b : vals) stat.add(b);
    double mean = stat.mean, sem = stat.std_error_of_mean();
    double A = rec.area_K.value, sA = rec.area_K.std_error;
    double se = std::sqrt(A * A * sem * sem + mean * mean * sA * sA);
    rec.H2n_UrK = {A * mean, se, n,
                   se == 0 ? Method::analytic : Method::monte_carlo};
    rec.Vr_identity_se =
        std::sqrt(A * A * sem * sem +
                  (disk - mean) * (disk - mean) * sA * sA) /
        disk;
  }
  rec.Vr_from_identity = (rec.M_TrK - rec.H2n_UrK.value) / disk;

  measures::EstimatorConfig direct_cfg = cfg;
  direct_cfg.seed = derive_seed(cfg.seed, 44);
  rec.Vr_direct = measures::deviation(s, K, r, direct_cfg);

  double sigma = std::sqrt(rec.Vr_identity_se * rec.Vr_identity_se +
                           rec.Vr_direct.std_error * rec.Vr_direct.std_error);
  rec.agree =
      std::abs(rec.Vr_from_identity - rec.Vr_direct.value) <= 3.0 * sigma;
  return rec;
}

// === reversibility_check ====================================================

ReversibilityRecord reversibility_check(const Surface& s, const RegionSpec& K,
                                        double r, double t, uint64_t count,
                                        uint64_t seed, int workers) {
  if (count < 1) throw ConfigError("reversibility_check: count must be >= 1");
  if (!(t > 0)) throw ConfigError("reversibility_check: t must be positive");
  std::vector<TangentVector> vs =
      liouville_sample(s, K, r, count, derive_seed(seed, 51));

  // Residual per sample; -1 = flow interrupted, -2 = chart mismatch.
  std::vector<double> residual(count, -1.0);
  parallel_for_index(count, workers, [&](uint64_t i) {
    const TangentVector& v = vs[i];
    FlowResult fwd = geodesic_flow(s, v, t);
    if (fwd.status != FlowStatus::completed || !fwd.end) return;
    FlowResult bwd = geodesic_flow(s, negate(*fwd.end), t);
    if (bwd.status != FlowStatus::completed || !bwd.end) return;
    TangentVector u = negate(*bwd.end);
    double res = reversal_residual(s, v, u);
    residual[i] = res < 0 ? -2.0 : res;
  });

  ReversibilityRecord rec;
  rec.count = count;
  for (double res : residual) {
    if (res == -2.0) {
      ++rec.chart_mismatches;
    } else if (res >= 0) {
      ++rec.completed;
      rec.max_residual = std::max(rec.max_residual, res);
    }
  }
  rec.vertex_hit_fraction =
      double(count - rec.completed - rec.chart_mismatches) / double(count);
  return rec;
}

// === jacobian_check =========================================================

JacobianRecord jacobian_check(const Surface& s, const TangentVector& v,
                              double t, double h0) {
  if (!(t > 0)) throw ConfigError("jacobian_check: t must be positive");
  if (s.backend == Backend::sphere || s.backend == Backend::cone)
    throw UnsupportedError("jacobian_check needs isometric charts");
  double scale = s.backend == Backend::polyhedral ? s.require_mesh().min_edge
                                                  : feature_scale(s);
  double h = h0 > 0 ? h0 : 1e-5 * scale;

  SurfacePoint base = canonical_point(s, v.base);
  int face = base.face;
  std::array<double, 4> c = {base.p.x, base.p.y, v.dir.x, v.dir.y};

  JacobianRecord rec;
  for (int halv = 0; halv <= 20; ++halv, h *= 0.5) {
    rec.halvings = halv;
    rec.h = h;
    auto center = flow_phase(s, face, {c[0], c[1]}, {c[2], c[3]}, t);
    if (!center) return rec;  // interrupted at the center: report not-ok
    std::array<std::optional<PhaseEnd>, 8> st;
    bool consistent = true;
    for (int k = 0; k < 4 && consistent; ++k) {
      for (int dsign = 0; dsign < 2 && consistent; ++dsign) {
        std::array<double, 4> q = c;
        q[size_t(k)] += (dsign == 0 ? h : -h);
        auto end = flow_phase(s, face, {q[0], q[1]}, {q[2], q[3]}, t);
        if (!end || end->signature != center->signature) {
          consistent = false;
          break;
        }
        st[size_t(2 * k + dsign)] = std::move(end);
      }
    }
    if (!consistent) continue;

    std::array<std::array<double, 4>, 4> J{};
    for (int k = 0; k < 4; ++k) {
      const auto& plus = *st[size_t(2 * k)];
      const auto& minus = *st[size_t(2 * k + 1)];
      for (int i = 0; i < 4; ++i) {
        double d = plus.q[size_t(i)] - minus.q[size_t(i)];
        if (s.backend == Backend::flat_torus && i < 2)
          d = wrap_delta(d, i == 0 ? s.a : s.b);
        J[size_t(i)][size_t(k)] = d / (2 * h);
      }
    }
    rec.ok = true;
    rec.det = std::abs(det4(J));
    return rec;
  }
  return rec;  // stencil-inconsistent at minimal h
}

// === liouville_preservation_check ===========================================

PreservationRecord liouville_preservation_check(
    const Surface& s, const RegionSpec& K, double r, double t,
    const measures::EstimatorConfig& cfg, uint64_t count) {
  cfg.validate();
  if (!(r > 0) || !(t > 0))
    throw ConfigError("preservation check: r and t must be positive");
  if (count < 1) throw ConfigError("preservation check: count must be >= 1");
  double disk = kPi * r * r;

  PreservationRecord rec;
  rec.count = count;
  MeasureEstimate A_K = area(s, K, 1 << 16, derive_seed(cfg.seed, 60));
  rec.M_A = disk * A_K.value;

  // Superset: arclength in time t is below t*r for |v| < r, so the flowed
  // phase region stays over B(K, t*r) (whole surface for face regions).
  RegionSpec S = enlarged_base(K, t * r);
  MeasureEstimate A_S = area(s, S, 1 << 16, derive_seed(cfg.seed, 61));
  double M_S = disk * A_S.value;

  // Forward vertex loss: mass of A interrupted by cone points in time t.
  uint64_t nf = std::max<uint64_t>(1000, count / 8);
  std::vector<TangentVector> fw =
      liouville_sample(s, K, r, nf, derive_seed(cfg.seed, 62));
  std::vector<uint8_t> f_ok(nf, 0);
  parallel_for_index(nf, cfg.workers, [&](uint64_t i) {
    f_ok[i] = geodesic_flow(s, fw[i], t).status == FlowStatus::completed;
  });
  uint64_t fwd_fail = 0;
  for (uint8_t ok : f_ok) fwd_fail += ok ? 0 : 1;

  // Backward transport: sample the superset, flow -t, count membership in A.
  std::vector<TangentVector> ws =
      liouville_sample(s, S, r, count, derive_seed(cfg.seed, 63));
  std::vector<int8_t> verdict(count, 0);  // 1 hit, 0 miss, -1 interrupted
  parallel_for_index(count, cfg.workers, [&](uint64_t i) {
    FlowResult res = geodesic_flow(s, ws[i], -t);
    if (res.status != FlowStatus::completed || !res.end) {
      verdict[i] = -1;
      return;
    }
    const TangentVector& u = *res.end;
    verdict[i] =
        (norm(u.dir) < r && base_in_region(s, u.base, K, cfg.max_states)) ? 1
                                                                          : 0;
  });
  uint64_t hits = 0, bwd_fail = 0;
  for (int8_t vd : verdict) {
    if (vd == 1) ++hits;
    if (vd == -1) ++bwd_fail;
  }

  double frac = double(hits) / double(count);
  double smooth = (double(hits) + 0.5) / (double(count) + 1.0);
  double se_frac = std::sqrt(smooth * (1.0 - smooth) / double(count));
  rec.M_phi_A = M_S * frac;
  rec.M_phi_A_se =
      std::sqrt(M_S * M_S * se_frac * se_frac +
                disk * disk * A_S.std_error * A_S.std_error * frac * frac);
  rec.discrepancy = std::abs(rec.M_A - rec.M_phi_A);
  double se_MA = disk * A_K.std_error;
  rec.sigma = std::sqrt(rec.M_phi_A_se * rec.M_phi_A_se + se_MA * se_MA);
  double lost_mass = (double(bwd_fail) / double(count)) * M_S +
                     (double(fwd_fail) / double(nf)) * rec.M_A;
  rec.vertex_loss = rec.M_A > 0 ? lost_mass / rec.M_A : 0.0;
  rec.holds = rec.discrepancy <= 3.0 * rec.sigma + rec.vertex_loss * rec.M_A;
  return rec;
}

}  // namespace devlab::flow
