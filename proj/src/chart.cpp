#include "devlab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace devlab::chart {

namespace {

constexpr std::array<std::array<int, 2>, 16> kOffsets = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1},
    {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
    {1, 2}, {1, -2}, {-1, 2}, {-1, -2},
    {2, 1}, {2, -1}, {-2, 1}, {-2, -1},
}};

double edge_weight(const GridChart& c, int na, int nb, int di, int dj) {
  double dx = di * c.h, dy = dj * c.h;
  double g11 = 0.5 * (c.g11[size_t(na)] + c.g11[size_t(nb)]);
  double g12 = 0.5 * (c.g12[size_t(na)] + c.g12[size_t(nb)]);
  double g22 = 0.5 * (c.g22[size_t(na)] + c.g22[size_t(nb)]);
  return std::sqrt(g11 * dx * dx + 2 * g12 * dx * dy + g22 * dy * dy);
}

// Dijkstra from the source set, pruned at `limit`; kInf beyond.
std::vector<double> dijkstra_limited(const GridChart& c,
                                     const std::vector<int>& sources,
                                     double limit) {
  std::vector<double> dist(size_t(c.nx) * size_t(c.ny), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int s : sources) {
    dist[size_t(s)] = 0;
    heap.push({0.0, s});
  }
  while (!heap.empty()) {
    auto [d, n] = heap.top();
    heap.pop();
    if (d > dist[size_t(n)]) continue;
    int i = n % c.nx, j = n / c.nx;
    for (const auto& off : kOffsets) {
      int i2 = i + off[0], j2 = j + off[1];
      if (!c.in_grid(i2, j2)) continue;
      int n2 = c.idx(i2, j2);
      double d2 = d + edge_weight(c, n, n2, off[0], off[1]);
      if (d2 > limit || d2 >= dist[size_t(n2)]) continue;
      dist[size_t(n2)] = d2;
      heap.push({d2, n2});
    }
  }
  return dist;
}

// Flat-lattice calibration: the per-node deviation of the identity metric,
// 1 - (lattice ball area)/(pi r^2), on an unbounded grid (translation
// invariant, so one center suffices). This is the metrication bias the
// pipeline subtracts.
double flat_lattice_bias(double h, double r) {
  int m = int(std::ceil(r / h)) + 3;
  GridChart flat;
  flat.h = h;
  flat.nx = flat.ny = 2 * m + 1;
  size_t n = size_t(flat.nx) * size_t(flat.ny);
  flat.g11.assign(n, 1.0);
  flat.g12.assign(n, 0.0);
  flat.g22.assign(n, 1.0);
  std::vector<double> dist = dijkstra_limited(flat, {flat.idx(m, m)}, r);
  // Accumulate the ball area with the same iterated sum the measurement loop
  // uses, so on an identity-metric chart the per-node deviation cancels this
  // bias exactly (bitwise), not merely to rounding error.
  double ball = 0;
  for (double d : dist)
    if (d < r) ball += h * h;
  return 1.0 - ball / (kPi * r * r);
}

double node_derivative_mass(const GridChart& c, int i, int j) {
  auto deriv = [&](const std::vector<double>& g, int di, int dj) {
    int ia = i - di, ja = j - dj, ib = i + di, jb = j + dj;
    bool lo = c.in_grid(ia, ja), hi = c.in_grid(ib, jb);
    double span = c.h * ((lo ? 1 : 0) + (hi ? 1 : 0));
    if (!lo) { ia = i; ja = j; }
    if (!hi) { ib = i; jb = j; }
    return (g[size_t(c.idx(ib, jb))] - g[size_t(c.idx(ia, ja))]) / span;
  };
  double mass = 0;
  for (int k = 0; k < 2; ++k) {
    int di = k == 0 ? 1 : 0, dj = 1 - di;
    mass += std::abs(deriv(c.g11, di, dj)) + 2 * std::abs(deriv(c.g12, di, dj)) +
            std::abs(deriv(c.g22, di, dj));
  }
  return mass;
}

}  // namespace

std::vector<int> GridChart::nodes_in(const ChartRect& rect) const {
  double eps = 1e-9 * (1 + h);
  std::vector<int> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Vec2 p = node(i, j);
      if (p.x >= rect.x0 - eps && p.x <= rect.x1 + eps &&
          p.y >= rect.y0 - eps && p.y <= rect.y1 + eps)
        out.push_back(idx(i, j));
    }
  return out;
}

GridChart build_chart(const ChartRect& domain, double h,
                      const TensorField& field, double c_control) {
  if (!(h > 0)) throw ConfigError("build_chart: h must be positive");
  if (!(c_control > 0)) throw ConfigError("build_chart: c_control must be positive");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
    throw ConfigError("build_chart: empty domain rectangle");

  GridChart c;
  c.x0 = domain.x0;
  c.y0 = domain.y0;
  c.h = h;
  c.nx = int(std::round((domain.x1 - domain.x0) / h)) + 1;
  c.ny = int(std::round((domain.y1 - domain.y0) / h)) + 1;
  if (c.nx < 2 || c.ny < 2)
    throw ConfigError("build_chart: domain needs at least 2 nodes per axis");

  size_t n = size_t(c.nx) * size_t(c.ny);
  c.g11.resize(n);
  c.g12.resize(n);
  c.g22.resize(n);
  double delta = 0;
  for (int j = 0; j < c.ny; ++j)
    for (int i = 0; i < c.nx; ++i) {
      std::array<double, 3> g = field(c.node(i, j));
      size_t k = size_t(c.idx(i, j));
      c.g11[k] = g[0];
      c.g12[k] = g[1];
      c.g22[k] = g[2];
      double tr = g[0] + g[2];
      double det = g[0] * g[2] - g[1] * g[1];
      double disc = tr * tr - 4 * det;
      double root = std::sqrt(std::max(0.0, disc));
      double lmin = 0.5 * (tr - root), lmax = 0.5 * (tr + root);
      if (!(lmin > 0) || !std::isfinite(lmax))
        throw ConfigError("build_chart: tensor not positive definite at a node");
      delta = std::max({delta, lmax - 1.0, 1.0 / lmin - 1.0});
    }
  c.delta_g = std::max(delta, 0.0);
  if (c.delta_g > 1.0 / c_control)
    throw ConfigError("build_chart: bi-Lipschitz bound exceeds 1/c_control");
  return c;
}

double chart_distance(const GridChart& c, Vec2 x, Vec2 y) {
  auto snap = [&](Vec2 p) {
    int i = int(std::round((p.x - c.x0) / c.h));
    int j = int(std::round((p.y - c.y0) / c.h));
    if (!c.in_grid(i, j))
      throw ConfigError("chart_distance: point outside the domain");
    return c.idx(i, j);
  };
  int a = snap(x), b = snap(y);
  if (a == b) return 0.0;

  std::vector<double> dist(size_t(c.nx) * size_t(c.ny), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[size_t(a)] = 0;
  heap.push({0.0, a});
  while (!heap.empty()) {
    auto [d, node] = heap.top();
    heap.pop();
    if (node == b) return d;
    if (d > dist[size_t(node)]) continue;
    int i = node % c.nx, j = node / c.nx;
    for (const auto& off : kOffsets) {
      int i2 = i + off[0], j2 = j + off[1];
      if (!c.in_grid(i2, j2)) continue;
      int n2 = c.idx(i2, j2);
      double d2 = d + edge_weight(c, node, n2, off[0], off[1]);
      if (d2 >= dist[size_t(n2)]) continue;
      dist[size_t(n2)] = d2;
      heap.push({d2, n2});
    }
  }
  throw ConfigError("chart_distance: target unreachable");
}

double metric_derivative_mass(const GridChart& c, const ChartRect& region) {
  double mass = 0;
  for (int node : c.nodes_in(region))
    mass += node_derivative_mass(c, node % c.nx, node / c.nx) * c.h * c.h;
  return mass;
}

SmoothCheckRecord prop_smooth_check(const GridChart& c, const ChartRect& A,
                                    double r, const SmoothCheckConfig& cfg) {
  if (cfg.workers < 1) throw ConfigError("prop_smooth: workers must be >= 1");
  if (!(r > 0)) throw ConfigError("prop_smooth: r must be positive");
  if (r < 5 * c.h - 1e-12 * (1 + c.h))
    throw ConfigError("prop_smooth: resolution guard requires r >= 5h");
  std::vector<int> nodes_A = c.nodes_in(A);
  if (nodes_A.empty()) throw ConfigError("prop_smooth: empty region");

  // Margin guard: the Euclidean 2r + 2h neighborhood of A must stay inside
  // the domain, so lattice balls never clip against the grid edge.
  double margin = 2 * r + 2 * c.h - 1e-12;
  double dx1 = c.x0 + (c.nx - 1) * c.h, dy1 = c.y0 + (c.ny - 1) * c.h;
  for (int node : nodes_A) {
    Vec2 p = c.node(node % c.nx, node / c.nx);
    if (p.x - c.x0 < margin || dx1 - p.x < margin || p.y - c.y0 < margin ||
        dy1 - p.y < margin)
      throw ConfigError("prop_smooth: B(A, 2r) margin leaves the domain");
  }

  SmoothCheckRecord rec;
  rec.r = r;
  rec.n_nodes_A = int(nodes_A.size());
  rec.flat_bias = flat_lattice_bias(c.h, r);

  double disk = kPi * r * r;
  std::vector<double> v_adj(nodes_A.size(), 0.0);
  parallel_for_index(nodes_A.size(), cfg.workers, [&](uint64_t k) {
    int node = nodes_A[k];
    std::vector<double> dist = dijkstra_limited(c, {node}, r);
    double ball = 0;
    for (size_t m = 0; m < dist.size(); ++m)
      if (dist[m] < r) ball += c.h * c.h * c.sqrt_det(int(m));
    v_adj[k] = (1.0 - ball / disk) - rec.flat_bias;
  });
  for (size_t k = 0; k < nodes_A.size(); ++k) {
    double w = c.h * c.h * c.sqrt_det(nodes_A[k]);
    rec.Vr_A += v_adj[k] * w;
    rec.area_A += w;
  }
  rec.mean_v = rec.Vr_A / rec.area_A;

  // B(A, 2r) in the lattice metric (an under-estimate of the true 2r ball,
  // so the resulting bound is conservative).
  std::vector<double> distB = dijkstra_limited(c, nodes_A, 2 * r);
  double mass = 0;
  for (size_t m = 0; m < distB.size(); ++m) {
    if (distB[m] >= 2 * r) continue;
    ++rec.n_nodes_B;
    mass += node_derivative_mass(c, int(m) % c.nx, int(m) / c.nx) * c.h * c.h;
  }
  rec.bound = r * mass;
  rec.ratio = rec.bound > 0 ? rec.Vr_A / rec.bound : 0.0;
  return rec;
}

}  // namespace devlab::chart
