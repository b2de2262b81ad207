#pragma once

// Ball volumes, deviation measures V_r, boundary/curvature coefficient
// profiles, and the measure inequalities as executable checks.
//
// Estimator notes.
//   ball_volume, polyhedral: one unfolding sweep of radius r collects the
//   covering window pieces; the candidate superset is the union of the faces
//   carrying pieces (it contains the metric ball). Uniform samples on the
//   superset are classified by piece membership (distance < r); the estimate
//   is hit fraction x superset area, which is unbiased.
//   deviation: nested Monte Carlo. Outer points are sampled uniformly on the
//   region; each contributes the plug-in value 1 - b_hat/(pi r^2) with b_hat
//   an unbiased inner estimate. The plug-in enters linearly, so the outer
//   mean is unbiased; its sample variance already contains the inner noise
//   (law of total variance), so the reported std_error covers both stages.

#include <cstdint>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/surface.hpp"

namespace devlab::measures {

struct EstimatorConfig {
  int outer = 4096;        // outer sample points x
  int inner = 4096;        // inner samples per b_r(x)
  uint64_t seed = 0;
  double r0 = 0;           // schedule start; 0 = feature_scale(surface)/10
  double ratio = 0.5;      // geometric schedule factor, 0 < ratio < 1
  int count = 7;           // schedule length
  int workers = 1;
  uint64_t max_states = 100000;  // sweep budget per ball/distance query
  bool force_monte_carlo = false;  // skip analytic deviation shortcuts
  double quad_tol = 1e-10;         // quadrature absolute tolerance

  void validate() const;
  // r_j = r0 * ratio^j, j = 0..count-1 (decreasing), r0 defaulted off the
  // surface's feature scale.
  std::vector<double> schedule(const Surface& s) const;
};

// H^2(B(x,r)). Closed form or quadrature on analytic backends; superset
// Monte Carlo on polyhedral surfaces (see header note).
MeasureEstimate ball_volume(const Surface& s, SurfacePoint x, double r,
                            const EstimatorConfig& cfg);

// V_r(region) = integral over the region of 1 - b_r(x)/(pi r^2). Closed
// form or 1-D quadrature on analytic backends (unless force_monte_carlo);
// nested Monte Carlo on polyhedral surfaces.
MeasureEstimate deviation(const Surface& s, const RegionSpec& region, double r,
                          const EstimatorConfig& cfg);

struct ProfileRow {
  double r = 0;
  MeasureEstimate vr;
  double v_over_r = 0;
  double v_over_r2 = 0;
  uint64_t row_seed = 0;  // deviation(region, r) with this seed reproduces vr
};

// Weighted least squares of V_r against c1*r + c2*r^2 (no constant term),
// weights 1/se^2 (exact rows get a tiny se floor). ci95 are half-widths.
struct ProfileFit {
  double c1 = 0, c2 = 0;
  double c1_se = 0, c2_se = 0;
  double c1_ci95 = 0, c2_ci95 = 0;
  double cov = 0;  // off-diagonal of the coefficient covariance
  double chi2 = 0;
  int dof = 0;
  double chi2_threshold = 0;  // 99th percentile of chi2(dof)
  bool unreliable = false;    // chi2 > chi2_threshold
};

struct DeviationProfile {
  RegionSpec region;
  std::vector<ProfileRow> rows;  // sorted by decreasing r
  ProfileFit fit;
  std::array<double, 3> omega{2.0, kPi, 4.0 * kPi / 3.0};  // unit ball volumes
};

// Rows over the geometric schedule; row j runs deviation with seed
// derive_seed(cfg.seed, j), bit-for-bit reproducible. Needs count >= 2.
DeviationProfile profile(const Surface& s, const RegionSpec& region,
                         const EstimatorConfig& cfg);

// Curvature coefficient of the cone with angle defect alpha: the Dirac mass
// m(alpha) of the r^2 term at the apex, via m = rho * integral of u*v_1(u)
// over the compact support (rho = 2*pi - alpha). alpha = 0 gives 0; defects
// within 0.01 of 2*pi are rejected (degenerate needle cones).
MeasureEstimate cone_mass(double alpha, double quad_tol = 1e-10);

// Boundary coefficient of the half-space in R^n: c_n = (1/omega_n) *
// integral over u in [0,1] of capvol_n(u), the unit-ball volume beyond
// height u. Closed form for n <= 3 (1/4, 2/(3*pi), 3/16); nested 1-D
// quadrature for 4 <= n <= 8.
MeasureEstimate halfspace_boundary_constant(int n);

// Radon measure for the exchange inequality: the area measure, a per-face
// density times area (polyhedral only), or a Dirac point mass.
struct MeasureSpec {
  enum class Kind { hausdorff, weighted, dirac };
  Kind kind = Kind::hausdorff;
  SurfacePoint point{};               // dirac
  std::vector<double> face_density;   // weighted: one weight per face, > 0

  static MeasureSpec hausdorff() { return {}; }
  static MeasureSpec dirac(SurfacePoint p);
  static MeasureSpec weighted(std::vector<double> density);
};

// lhs = integral over A of mu(B(x,r)) dnu, rhs = integral over B(A,r) of
// nu(B(x,r)) dmu; holds = lhs <= rhs + 3*sigma, sigma combining both sides.
// Membership test shared by the integral checks. Positive-radius balls are
// open; a radius-0 ball denotes the closed singleton {center}.
bool point_in_region(const Surface& s, const SurfacePoint& p,
                     const RegionSpec& region, uint64_t max_states = 100000);

struct ExchangeRecord {
  double lhs = 0, rhs = 0;
  double sigma_lhs = 0, sigma_rhs = 0;
  bool holds = false;
};

ExchangeRecord exchange_check(const Surface& s, const MeasureSpec& mu,
                              const MeasureSpec& nu, const RegionSpec& A,
                              double r, const EstimatorConfig& cfg);

// Deficit-vs-curvature comparison: lhs = |1 - b_r(x)/(pi r^2)|, rhs = 3 *
// total |defect| over cone points at distance < r. The precondition bounds
// the total |defect| away from one allowed heavy point by delta0 and, on
// surfaces with boundary, requires the ball to clear the boundary.
struct BonkLangRecord {
  bool precondition_ok = false;
  double lhs = 0;
  double rhs = 0;          // 3 * omega_ball
  double omega_ball = 0;   // sum of |defect| at distance < r, exact
  double sigma = 0;        // std error of lhs
  bool holds = false;      // lhs <= rhs + 3*sigma
};

BonkLangRecord bonk_lang_check(const Surface& s, SurfacePoint x, double r,
                               const EstimatorConfig& cfg, double delta0 = 0.5);

// Deficit against the squared scale-free mean curvature: lhs as above,
// delta = K(B(x,6r))/r with K the edge-supported mean curvature measure.
// Requires a convex embedded surface.
struct MeanCurvRecord {
  double lhs = 0;
  double delta = 0;
  double sigma = 0;  // std error of lhs
};

MeanCurvRecord mean_curvature_check(const Surface& s, SurfacePoint x, double r,
                                    const EstimatorConfig& cfg);

inline bool holds_with(const MeanCurvRecord& rec, double C) {
  return rec.lhs <= C * rec.delta * rec.delta;
}

}  // namespace devlab::measures
