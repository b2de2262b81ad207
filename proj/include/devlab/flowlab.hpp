#pragma once

// Phase-space sampling, the total exponential map, and numerical checks that
// the geodesic flow preserves the phase volume.
//
// Phase points are TangentVector values; the carrier measure is the local
// product of the surface area and Lebesgue measure on the fiber disk of
// radius r, so the region {(x, v): x in K, |v| < r} has mass pi r^2 area(K).

#include <cstdint>
#include <optional>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/measures.hpp"
#include "devlab/surface.hpp"

namespace devlab::flow {

// Phase region over a base region: vectors of norm < r.
struct PhaseRegion {
  RegionSpec base;
  double r = 0;
};

// i.i.d. samples from the normalized phase volume on {x in K, |v| < r}:
// base uniform on K, angle uniform in the base chart frame, norm r*sqrt(U).
// Element i depends only on (seed, i). count = 0 gives an empty list.
std::vector<TangentVector> liouville_sample(const Surface& s,
                                            const RegionSpec& K, double r,
                                            uint64_t count, uint64_t seed);

// E(v) = (base of v, endpoint of the arclength-|v| geodesic). target is
// present iff the flow completed; vertex/boundary terminations surface in
// status.
struct TotalExpResult {
  SurfacePoint source{};
  std::optional<SurfacePoint> target;
  FlowStatus status = FlowStatus::completed;
};

TotalExpResult total_exponential(const Surface& s, const TangentVector& v,
                                 uint64_t max_events = 1000000);

// Two routes to the deviation V_r(K):
//   M_TrK      = pi r^2 * area(K), the phase mass over K (bookkeeping value);
//   H2n_UrK    = mass of {(x, y): x in K, d(x, y) < r} under the product
//                area measure, i.e. area(K) * E_x[b_r(x)], nested MC;
//   Vr_from_identity = (M_TrK - H2n_UrK) / (pi r^2), exact wiring;
//   Vr_direct  = measures::deviation with an independent seed.
struct ComparisonRecord {
  double r = 0;
  MeasureEstimate area_K;
  double M_TrK = 0;
  MeasureEstimate H2n_UrK;
  double Vr_from_identity = 0;
  double Vr_identity_se = 0;  // propagated from area and inner noise
  MeasureEstimate Vr_direct;
  bool agree = false;  // |identity - direct| <= 3 sigma combined
};

ComparisonRecord compare_measures(const Surface& s, const RegionSpec& K,
                                  double r,
                                  const measures::EstimatorConfig& cfg);

// Flow t, negate, flow t, negate; residual against the starting vector
// (base displacement plus direction difference, both in the starting chart).
// Trajectories interrupted by a cone point or boundary are counted into
// vertex_hit_fraction and excluded from the residual.
struct ReversibilityRecord {
  double max_residual = 0;
  double vertex_hit_fraction = 0;
  uint64_t completed = 0;
  uint64_t count = 0;
  uint64_t chart_mismatches = 0;  // return base not in or adjacent to the
                                  // starting face (counted as failures)
};

ReversibilityRecord reversibility_check(const Surface& s, const RegionSpec& K,
                                        double r, double t, uint64_t count,
                                        uint64_t seed, int workers = 1);

// |det| of the 4x4 central finite-difference Jacobian of the time-t phase
// map in the start/end charts (positions and velocities). The step starts at
// 1e-5 * edge scale and halves until all 8 stencil trajectories reproduce
// the center's face-crossing sequence; after 20 halvings the sample is
// reported as stencil-inconsistent (ok = false), never as a wrong number.
// Charts must be isometric, so this supports polyhedral and flat analytic
// backends only.
struct JacobianRecord {
  bool ok = false;
  double det = 0;
  double h = 0;       // step actually used
  int halvings = 0;
};

JacobianRecord jacobian_check(const Surface& s, const TangentVector& v,
                              double t, double h0 = 0);

// Phase-volume preservation for A = {x in K, |v| < r} under the time-t flow.
// M(phi_t(A)) is estimated by backward transport: sample the phase volume on
// an enlarged region that provably contains phi_t(A) (arclength in time t is
// below t*r, so the base superset is B(K, t*r), or the whole surface), flow
// -t, and count membership in A. Mass on trajectories interrupted by cone
// points is reported as vertex_loss (a fraction of M_A, both flow
// directions), never imputed to either side.
struct PreservationRecord {
  double M_A = 0;
  double M_phi_A = 0;
  double M_phi_A_se = 0;
  double discrepancy = 0;  // |M_A - M_phi_A|
  double vertex_loss = 0;  // lost mass / M_A, forward + backward
  double sigma = 0;        // std error of the discrepancy
  bool holds = false;      // discrepancy <= 3*sigma + vertex_loss*M_A
  uint64_t count = 0;
};

PreservationRecord liouville_preservation_check(
    const Surface& s, const RegionSpec& K, double r, double t,
    const measures::EstimatorConfig& cfg, uint64_t count = 400000);

}  // namespace devlab::flow
