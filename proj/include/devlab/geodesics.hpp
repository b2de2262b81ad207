#pragma once

// Geodesic distance and geodesic flow on model surfaces. Distances on
// polyhedral surfaces come from exact window unfolding (see unfold.hpp),
// optionally augmented by relay search through cone points of angle > 2*pi;
// analytic backends use closed forms. The flow traces straight lines in
// face charts with rigid transitions at edges; it terminates at vertices
// and boundary edges (no continuation rule is invented).

#include <cstdint>
#include <optional>
#include <vector>

#include "devlab/surface.hpp"

namespace devlab {

// Tangent vector: dir lives in the base face chart (polyhedral) or in the
// backend's orthonormal frame at the point:
//   plane/half_plane/flat_torus: cartesian components;
//   sphere: (colatitude, longitude) orthonormal frame (e_theta, e_phi);
//   cone: (radial, transverse) orthonormal frame at (u, psi), u > 0.
// |dir| is the speed; flow for time t covers arclength t*|dir|.
struct TangentVector {
  SurfacePoint base{};
  Vec2 dir{};
};

inline TangentVector negate(const TangentVector& v) {
  return {v.base, v.dir * -1.0};
}

struct DistanceAnswer {
  std::optional<double> value;     // none means distance > r_max
  std::vector<int> face_sequence;  // witness on polyhedral surfaces
  std::vector<int> relay_vertices; // nonempty only for paths through
                                   // cone points of angle > 2*pi
  uint64_t states = 0;
};

// Exact geodesic distance if <= r_max, none otherwise. Symmetric
// bit-for-bit: the sweep always runs from the canonically smaller endpoint.
DistanceAnswer distance(const Surface& s, SurfacePoint x, SurfacePoint y,
                        double r_max = kInf, uint64_t max_states = 100000);

enum class FlowStatus { completed, vertex_hit, boundary_hit, budget_exceeded };

const char* flow_status_name(FlowStatus st);

// Edge crossing: param is the position along the edge's canonical va -> vb
// orientation, in [0,1]; time is flow time (arclength / speed). face/pos/dir
// describe the state just after the transition.
struct FlowEvent {
  int index = 0;
  double time = 0;
  int edge = -1;
  double param = 0;
  int face = -1;
  Vec2 pos{};
  Vec2 dir{};
};

struct FlowResult {
  FlowStatus status = FlowStatus::completed;
  std::optional<TangentVector> end;  // present iff completed
  TangentVector last{};              // state at termination (any status)
  double time_elapsed = 0;
  std::vector<FlowEvent> events;     // filled when record_events is set
  uint64_t n_events = 0;
};

// Geodesic flow for time t (t < 0 flows -v forward and negates back).
FlowResult geodesic_flow(const Surface& s, const TangentVector& v, double t,
                         bool record_events = false,
                         uint64_t max_events = 1000000);

// exp_x(v) = endpoint of the arclength-|v| geodesic from x (flow to t = 1).
FlowResult exp_map(const Surface& s, const TangentVector& v,
                   uint64_t max_events = 1000000);

}  // namespace devlab
