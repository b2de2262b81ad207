#pragma once

// Grid-discretized 2-D Riemannian charts: a rectangle sampled at spacing h
// with a symmetric positive-definite metric tensor per node. Distances come
// from shortest paths on a 16-direction lattice graph, which overestimates
// lengths by a small direction-dependent factor: the largest angular gap in
// the direction set {axis, diagonal, knight} is atan(1/2) = 26.57 degrees,
// so the worst-case flat-metric factor is sec(13.28 deg) ~= 1.02746 (random
// node pairs measure up to ~1.026). The deviation pipeline subtracts the
// flat-lattice bias (computed on an identity-metric lattice with the same h
// and r) instead of attempting exact geodesic integration. All tolerances in
// this module are an order looser than in the exact-surface modules, and
// reports say so.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "devlab/common.hpp"

namespace devlab::chart {

struct ChartRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

// (g11, g12, g22) at a point.
using TensorField = std::function<std::array<double, 3>(Vec2)>;

struct GridChart {
  double x0 = 0, y0 = 0;  // lower-left node
  double h = 0;           // spacing
  int nx = 0, ny = 0;     // nodes per axis
  std::vector<double> g11, g12, g22;  // row-major, node (i, j) at j*nx + i
  // Bi-Lipschitz bound vs the identity: every tensor eigenvalue lies in
  // [(1+delta_g)^-2, (1+delta_g)^2]; identity gives exactly 0, a conformal
  // factor 1 + a gives a.
  double delta_g = 0;

  int idx(int i, int j) const { return j * nx + i; }
  Vec2 node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  bool in_grid(int i, int j) const {
    return i >= 0 && i < nx && j >= 0 && j < ny;
  }
  double sqrt_det(int n) const {
    double d = g11[size_t(n)] * g22[size_t(n)] - g12[size_t(n)] * g12[size_t(n)];
    return std::sqrt(d);
  }
  std::vector<int> nodes_in(const ChartRect& rect) const;
};

// Samples the field at the nodes and validates: every tensor must be
// positive definite and the bi-Lipschitz bound must satisfy
// delta_g <= 1/c_control.
GridChart build_chart(const ChartRect& domain, double h,
                      const TensorField& field, double c_control = 20.0);

// Shortest path between the nodes nearest to x and y on the 16-direction
// lattice graph; edge weight = g-length of the straight step with the
// endpoint-averaged tensor. Overestimates the length metric by <= ~2%.
double chart_distance(const GridChart& c, Vec2 x, Vec2 y);

// Sum over nodes in the region of sum_{i,j,k} |d_k g_ij| * h^2, by central
// differences (one-sided at the grid boundary); the off-diagonal entry
// counts twice, matching the full index range of a symmetric tensor.
double metric_derivative_mass(const GridChart& c, const ChartRect& region);

struct SmoothCheckConfig {
  int workers = 1;
};

// V_r(A) <= C * r * mass(B(A, 2r)) as an executable check. Vr_A sums the
// flat-calibrated deviation over A's nodes with g-area weights; bound =
// r * metric_derivative_mass over the lattice ball B(A, 2r); ratio is their
// quotient (the empirical constant; boundedness, not a value, is asserted).
struct SmoothCheckRecord {
  double r = 0;
  double Vr_A = 0;
  double bound = 0;
  double ratio = 0;       // Vr_A / bound; 0 when bound = 0
  double flat_bias = 0;   // per-node v_r bias of the flat lattice, subtracted
  double area_A = 0;      // g-area of A's node cells
  double mean_v = 0;      // Vr_A / area_A, scale-invariant form
  int n_nodes_A = 0;
  int n_nodes_B = 0;      // nodes of B(A, 2r)
};

// Preconditions: r >= 5h (resolution guard) and the Euclidean 2r + 2h
// neighborhood of A inside the domain rectangle.
SmoothCheckRecord prop_smooth_check(const GridChart& c, const ChartRect& A,
                                    double r, const SmoothCheckConfig& cfg);

}  // namespace devlab::chart
