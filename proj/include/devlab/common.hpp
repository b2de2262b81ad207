#pragma once

// Shared numeric primitives: small vectors, counter-based RNG substreams,
// estimate records, adaptive quadrature, and a deterministic parallel map.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace devlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Thrown on invalid construction parameters, malformed inputs, bad configs.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an exploration budget (face sequences, flow events, sweep
// states) is exhausted. Callers must treat this as a hard failure.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an operation is not defined for the given backend.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
};
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return n > 0 ? Vec2{a.x / n, a.y / n} : Vec2{0, 0};
}
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) {
  double n = norm(a);
  return n > 0 ? a * (1.0 / n) : a;
}

// --- RNG -------------------------------------------------------------------
// Counter-based substreams: the stream for (seed, index) is independent of
// every other index, so sample loops may be split across workers in any order
// and still produce identical results. Core generator is splitmix64.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Rng {
  uint64_t state = 0;

  explicit Rng(uint64_t seed = 0) : state(seed) {}

  // Independent substream for a sample index (or any nested label).
  static Rng substream(uint64_t seed, uint64_t index) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    uint64_t b = splitmix64(s);
    return Rng(b);
  }

  uint64_t next_u64() { return splitmix64(state); }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  uint64_t next_below(uint64_t n) { return next_u64() % n; }
};

// Derived seed for a labelled sub-computation (profile rows, inner loops).
inline uint64_t derive_seed(uint64_t seed, uint64_t label) {
  uint64_t s = seed ^ (label * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL);
  return splitmix64(s);
}

// --- Estimates --------------------------------------------------------------

enum class Method { analytic, monte_carlo, quadrature };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::monte_carlo: return "monte_carlo";
    case Method::quadrature: return "quadrature";
  }
  return "?";
}

// A scalar value with its uncertainty. std_error is 0 only for analytic
// evaluations; Monte Carlo and quadrature report honest error scales.
struct MeasureEstimate {
  double value = 0;
  double std_error = 0;
  uint64_t n_samples = 0;
  Method method = Method::analytic;
};

inline MeasureEstimate analytic_estimate(double v) {
  return {v, 0.0, 0, Method::analytic};
}

// Streaming mean/variance accumulator (Welford).
struct RunningStat {
  uint64_t n = 0;
  double mean = 0, m2 = 0;
  void add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
  }
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double std_error_of_mean() const {
    return n > 1 ? std::sqrt(variance() / double(n)) : 0.0;
  }
};

// --- Quadrature -------------------------------------------------------------

struct QuadResult {
  double value = 0;
  double error = 0;  // accumulated local error bound
  long evals = 0;
};

// Adaptive Simpson on [a,b] with absolute tolerance. Smooth away from
// isolated kinks; pass interior break points via integrate_piecewise.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth = 48);

QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               std::vector<double> breaks, double abs_tol,
                               int max_depth = 48);

// --- Misc numerics ----------------------------------------------------------

// Upper quantile of the chi-square distribution (Wilson-Hilferty cube
// approximation); adequate for residual flagging.
double chi2_quantile(double p, int dof);

// Area of the intersection of a convex polygon with a disk of radius r
// centered at c. Exact up to floating point; polygon given CCW.
double polygon_disk_area(const std::vector<Vec2>& poly, Vec2 c, double r);

// Clip a convex polygon against the half-plane dot(n, p - q) >= 0.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 q, Vec2 n);

double polygon_area(const std::vector<Vec2>& poly);

// Uniform point in a convex polygon (fan decomposition from vertex 0).
Vec2 sample_polygon(const std::vector<Vec2>& poly, double area, Rng& rng);

// Distance from a point to a segment [a,b].
double point_segment_dist(Vec2 p, Vec2 a, Vec2 b);

// Distance from a point to a convex polygon (0 if inside).
double point_polygon_dist(Vec2 p, const std::vector<Vec2>& poly);

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly,
                             double eps = 0.0);

// --- Deterministic parallel map ---------------------------------------------
// Evaluates f(i) for i in [0,n) with `workers` threads, writing into a
// preallocated result vector; reductions over the vector are then performed
// serially by the caller, so results do not depend on the worker count.
void parallel_for_index(uint64_t n, int workers,
                        const std::function<void(uint64_t)>& f);

// Volume of the unit n-ball.
double unit_ball_volume(int n);

}  // namespace devlab
