#include "devlab/common.hpp"

#include <algorithm>
#include <thread>

namespace devlab {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double fa, double fm, double fb, double whole, double tol,
           int depth, QuadResult& out) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  out.evals += 2;
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    out.value += left + right + delta / 15.0;
    out.error += std::abs(delta) / 15.0;
    return;
  }
  adapt(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1, out);
  adapt(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  double fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  out.evals = 3;
  double whole = simpson(fa, fm, fb, b - a);
  adapt(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, out);
  return out;
}

QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               std::vector<double> breaks, double abs_tol,
                               int max_depth) {
  std::sort(breaks.begin(), breaks.end());
  QuadResult out;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] <= breaks[i]) continue;
    QuadResult part = integrate_adaptive(f, breaks[i], breaks[i + 1],
                                         abs_tol / double(breaks.size()),
                                         max_depth);
    out.value += part.value;
    out.error += part.error;
    out.evals += part.evals;
  }
  return out;
}

double chi2_quantile(double p, int dof) {
  if (dof <= 0) throw ConfigError("chi2_quantile: dof must be positive");
  // Inverse normal via Acklam-style rational approximation.
  auto inv_norm = [](double q) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    double plow = 0.02425;
    if (q < plow) {
      double u = std::sqrt(-2 * std::log(q));
      return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
              c[5]) /
             ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1);
    }
    if (q > 1 - plow) {
      double u = std::sqrt(-2 * std::log(1 - q));
      return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u +
               c[5]) /
             ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1);
    }
    double u = q - 0.5, t = u * u;
    return (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t +
            a[5]) *
           u /
           (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1);
  };
  double z = inv_norm(p);
  double k = double(dof);
  double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    s += cross(p, q);
  }
  return 0.5 * s;
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 q,
                                 Vec2 n) {
  std::vector<Vec2> out;
  size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 1);
  for (size_t i = 0; i < m; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % m];
    double da = dot(n, a - q), db = dot(n, b - q);
    if (da >= 0) out.push_back(a);
    if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
      double t = da / (da - db);
      out.push_back(a + (b - a) * t);
    }
  }
  // Collapse vertices that coincide to within rounding of the polygon
  // diameter. When the clip line passes through a vertex, the pass above
  // emits near-duplicate pairs whose connecting "edges" point in a noise
  // direction; any edge-orientation test downstream would then reject
  // interior points on the sign of that noise.
  if (out.size() >= 2) {
    double diam2 = 0;
    for (const Vec2& v : out) diam2 = std::max(diam2, norm2(v - out[0]));
    double tol2 = diam2 * 1e-26;
    std::vector<Vec2> clean;
    clean.reserve(out.size());
    for (const Vec2& v : out)
      if (clean.empty() || norm2(v - clean.back()) > tol2) clean.push_back(v);
    while (clean.size() >= 2 && norm2(clean.back() - clean.front()) <= tol2)
      clean.pop_back();
    return clean;
  }
  return out;
}

namespace {

// Signed contribution of the directed edge (p, q) to the area of
// {triangle(c, p, q)} intersected with disk(c, r), c translated to origin.
double disk_edge_term(Vec2 p, Vec2 q, double r) {
  double r2 = r * r;
  auto sector = [&](Vec2 a, Vec2 b) {
    double ang = std::atan2(cross(a, b), dot(a, b));
    return 0.5 * r2 * ang;
  };
  bool pin = norm2(p) <= r2, qin = norm2(q) <= r2;
  if (pin && qin) return 0.5 * cross(p, q);
  // Intersect segment p+t(q-p), t in [0,1], with the circle.
  Vec2 d = q - p;
  double A = norm2(d), B = 2.0 * dot(p, d), C = norm2(p) - r2;
  double disc = B * B - 4 * A * C;
  if (pin && !qin) {
    double t = (-B + std::sqrt(std::max(0.0, disc))) / (2 * A);
    Vec2 m = p + d * t;
    return 0.5 * cross(p, m) + sector(m, q);
  }
  if (!pin && qin) {
    double t = (-B - std::sqrt(std::max(0.0, disc))) / (2 * A);
    Vec2 m = p + d * t;
    return sector(p, m) + 0.5 * cross(m, q);
  }
  // Both outside: either the chord crosses the disk or it does not.
  if (disc > 0 && A > 0) {
    double sq = std::sqrt(disc);
    double t0 = (-B - sq) / (2 * A), t1 = (-B + sq) / (2 * A);
    if (t1 > 0 && t0 < 1) {
      double u0 = std::max(0.0, t0), u1 = std::min(1.0, t1);
      if (u1 > u0) {
        Vec2 m0 = p + d * u0, m1 = p + d * u1;
        return sector(p, m0) + 0.5 * cross(m0, m1) + sector(m1, q);
      }
    }
  }
  return sector(p, q);
}

}  // namespace

double polygon_disk_area(const std::vector<Vec2>& poly, Vec2 c, double r) {
  if (poly.size() < 3 || r <= 0) return 0;
  double s = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    Vec2 p = poly[i] - c;
    Vec2 q = poly[(i + 1) % poly.size()] - c;
    s += disk_edge_term(p, q, r);
  }
  return s;
}

Vec2 sample_polygon(const std::vector<Vec2>& poly, double area, Rng& rng) {
  // Fan triangles (v0, vi, vi+1); pick by area, then uniform barycentric.
  double target = rng.next_double() * area;
  double acc = 0;
  size_t last = poly.size() - 1;
  for (size_t i = 1; i + 1 <= last; ++i) {
    double a = 0.5 * cross(poly[i] - poly[0], poly[i + 1] - poly[0]);
    acc += a;
    if (target <= acc || i + 1 == last) {
      double u = rng.next_double(), v = rng.next_double();
      if (u + v > 1) {
        u = 1 - u;
        v = 1 - v;
      }
      return poly[0] + (poly[i] - poly[0]) * u + (poly[i + 1] - poly[0]) * v;
    }
  }
  return poly[0];
}

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double l2 = norm2(d);
  if (l2 == 0) return dist(p, a);
  double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
  return dist(p, a + d * t);
}

double point_polygon_dist(Vec2 p, const std::vector<Vec2>& poly) {
  if (poly.size() < 3) {
    if (poly.empty()) return std::numeric_limits<double>::infinity();
    if (poly.size() == 1) return dist(p, poly[0]);
    return point_segment_dist(p, poly[0], poly[1]);
  }
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < poly.size(); ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < 0) inside = false;
    best = std::min(best, point_segment_dist(p, a, b));
  }
  return inside ? 0.0 : best;
}

bool point_in_convex_polygon(Vec2 p, const std::vector<Vec2>& poly,
                             double eps) {
  if (poly.size() < 3) return false;
  for (size_t i = 0; i < poly.size(); ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if (b.x == a.x && b.y == a.y) continue;  // degenerate edge: no constraint
    if (cross(b - a, p - a) < -eps) return false;
  }
  return true;
}

void parallel_for_index(uint64_t n, int workers,
                        const std::function<void(uint64_t)>& f) {
  if (workers <= 1 || n < 64) {
    for (uint64_t i = 0; i < n; ++i) f(i);
    return;
  }
  int w = std::min<int>(workers, int(std::thread::hardware_concurrency()));
  if (w < 1) w = 1;
  std::vector<std::thread> pool;
  pool.reserve(size_t(w));
  uint64_t chunk = (n + uint64_t(w) - 1) / uint64_t(w);
  for (int k = 0; k < w; ++k) {
    uint64_t lo = uint64_t(k) * chunk;
    uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (uint64_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

double unit_ball_volume(int n) {
  if (n < 0) throw ConfigError("unit_ball_volume: negative dimension");
  // omega_n = pi^{n/2} / Gamma(n/2 + 1)
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

}  // namespace devlab
