#pragma once

// Exact unfolding of geodesic segments on a triangle mesh. A source window
// is a (face, unfolded source, direction wedge) triple; windows propagate
// across interior edges by clipping the crossed edge ("gate") to the wedge
// and mapping through the edge transition. Best-first expansion ordered by
// the distance from the unfolded source to the clipped gate gives:
//   - point-to-point distances with witness face sequences,
//   - covering pieces for ball-area estimation,
//   - geodesic distances to all vertices within a radius,
//   - distance to the mesh boundary,
//   - per-edge intervals lying inside a metric ball.
//
// Pieces cover exactly the points reachable by a straight unfolded segment
// from the source; on meshes without interior cone angles above 2*pi this
// is the whole metric ball. A point covered F times has F distinct
// geodesics; the ball area equals (sum of piece/disk intersections) minus
// the integral of (F - 1) over the multiply covered set.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/mesh.hpp"

namespace devlab {

// Closed direction cone from dl to dr (counterclockwise); full = all
// directions. Invariant when not full: cross(dl, dr) >= 0.
struct Wedge {
  bool full = true;
  Vec2 dl{}, dr{};

  bool contains(Vec2 d, double eps = 0.0) const {
    if (full) return true;
    return cross(dl, d) >= -eps && cross(d, dr) >= -eps;
  }
};

// One maximal family of geodesics sharing a face sequence, restricted to its
// last face. Every y in poly is reached by the segment src -> y of length
// |y - src| (coordinates in face's chart).
struct WindowPiece {
  int face = -1;
  Vec2 src{};
  Wedge wedge{};
  std::vector<Vec2> poly;
  double area = 0;
  int depth = 0;
};

// Arclength interval [lo, hi] along a global edge, oriented va -> vb.
struct EdgeInterval {
  int edge = -1;
  double lo = 0, hi = 0;
};

struct SweepSource {
  bool is_vertex = false;
  MeshPoint point{};
  int vertex = -1;

  static SweepSource at(MeshPoint p) { return {false, p, -1}; }
  static SweepSource at_vertex(int v) { return {true, {}, v}; }
};

struct SweepOptions {
  double radius = kInf;  // propagation limit (geodesic length)
  std::optional<MeshPoint> target;
  bool collect_pieces = false;
  bool collect_vertex_dists = false;
  bool collect_edge_intervals = false;
  bool collect_boundary_dist = false;
  uint64_t max_states = 100000;
};

struct SweepResult {
  double target_dist = kInf;
  std::vector<int> target_faces;  // face sequence of the best witness
  std::vector<WindowPiece> pieces;
  std::vector<double> vertex_dist;  // per vertex; kInf beyond the radius
  std::vector<EdgeInterval> edge_intervals;
  double boundary_dist = kInf;
  uint64_t states = 0;
};

SweepResult sweep(const PolyhedralMesh& m, const SweepSource& src,
                  const SweepOptions& opt);

// Area of the metric ball of radius r around the source: exact piece/disk
// areas plus an unbiased Monte Carlo correction for multiply covered points
// (std_error = 0 when no piece overlaps occur). Requires all interior cone
// angles <= 2*pi.
struct BallArea {
  double value = 0;
  double std_error = 0;
  double exact_sum = 0;    // sum over pieces of |piece ∩ disk|
  double overlap = 0;      // estimate of ∫ (F - 1)_+
  uint64_t n_pieces = 0;
  uint64_t states = 0;
};

BallArea mesh_ball_area(const PolyhedralMesh& m, const SweepSource& center,
                        double r, uint64_t mc_samples, uint64_t seed,
                        uint64_t max_states = 100000);

// Merge intervals of the same edge; returns (edge, union length) pairs
// sorted by edge id.
std::vector<std::pair<int, double>> merge_edge_intervals(
    std::vector<EdgeInterval> intervals);

}  // namespace devlab
