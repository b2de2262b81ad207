#include "devlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "devlab/unfold.hpp"

namespace devlab {
namespace {

double wrap_mod(double x, double m) {
  double r = std::fmod(x, m);
  return r < 0 ? r + m : r;
}

Vec3 sphere_embed(double R, Vec2 p) {
  // p = (colatitude, longitude)
  double st = std::sin(p.x), ct = std::cos(p.x);
  return Vec3{R * st * std::cos(p.y), R * st * std::sin(p.y), R * ct};
}

// Rotation taking the north pole to the unit direction c (Rodrigues).
Vec3 rotate_axis(const Vec3& v, const Vec3& axis, double ang) {
  double c = std::cos(ang), s = std::sin(ang);
  return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1 - c));
}

double torus_point_dist(double a, double b, Vec2 x, Vec2 y) {
  double dx = std::abs(x.x - y.x), dy = std::abs(x.y - y.y);
  dx = std::min(dx, a - dx);
  dy = std::min(dy, b - dy);
  return std::hypot(dx, dy);
}

SweepSource region_sweep_source(const Surface& s, const RegionSpec& region) {
  if (region.kind == RegionSpec::Kind::vertex_ball)
    return SweepSource::at_vertex(region.vertex);
  SurfacePoint c = canonical_point(s, region.center);
  // Centers sitting on a mesh corner get the dedicated vertex source: a
  // sweep seeded strictly inside one face would miss the wrap-around.
  const PolyhedralMesh& m = s.require_mesh();
  int ci = corner_index_near(m, MeshPoint{c.face, c.p}, kMemEps);
  if (ci >= 0) return SweepSource::at_vertex(m.vertex_at(c.face, ci));
  return SweepSource::at(MeshPoint{c.face, c.p});
}

// Cached rejection sampler for ball regions on a mesh: superset = faces
// reachable by the unfolding sweep, acceptance = covered by a window piece
// within the radius.
struct MeshBallSampler {
  const PolyhedralMesh& m;
  double r = 0;
  std::vector<int> faces;          // superset face ids, ascending
  std::vector<double> cum_area;    // prefix sums over `faces`
  double total = 0;
  std::unordered_map<int, std::vector<int>> pieces_by_face;
  std::vector<WindowPiece> pieces;

  MeshBallSampler(const Surface& s, const RegionSpec& region)
      : m(s.require_mesh()), r(region.radius) {
    SweepOptions opt;
    opt.radius = r;
    opt.collect_pieces = true;
    SweepResult sw = sweep(m, region_sweep_source(s, region), opt);
    pieces = std::move(sw.pieces);
    std::set<int> fs;
    for (size_t i = 0; i < pieces.size(); ++i) {
      fs.insert(pieces[i].face);
      pieces_by_face[pieces[i].face].push_back(int(i));
    }
    faces.assign(fs.begin(), fs.end());
    if (faces.empty()) throw ConfigError("ball region has empty coverage");
    cum_area.reserve(faces.size());
    for (int f : faces) {
      total += m.face_area[f];
      cum_area.push_back(total);
    }
  }

  bool covered(int face, Vec2 y) const {
    auto it = pieces_by_face.find(face);
    if (it == pieces_by_face.end()) return false;
    for (int i : it->second) {
      const auto& p = pieces[i];
      if (dist(y, p.src) < r && point_in_convex_polygon(y, p.poly, 1e-12))
        return true;
    }
    return false;
  }

  SurfacePoint draw(Rng& rng) const {
    for (int iter = 0; iter < 100000; ++iter) {
      double u = rng.next_double() * total;
      size_t j = std::lower_bound(cum_area.begin(), cum_area.end(), u) -
                 cum_area.begin();
      if (j >= faces.size()) j = faces.size() - 1;
      int f = faces[j];
      double b1 = rng.next_double(), b2 = rng.next_double();
      if (b1 + b2 > 1) {
        b1 = 1 - b1;
        b2 = 1 - b2;
      }
      Vec2 y = m.chart[f][0] + (m.chart[f][1] - m.chart[f][0]) * b1 +
               (m.chart[f][2] - m.chart[f][0]) * b2;
      if (covered(f, y)) return {f, y};
    }
    throw BudgetError("ball-region rejection sampling failed to accept");
  }
};

Vec2 sample_face(const PolyhedralMesh& m, int f, Rng& rng) {
  double b1 = rng.next_double(), b2 = rng.next_double();
  if (b1 + b2 > 1) {
    b1 = 1 - b1;
    b2 = 1 - b2;
  }
  return m.chart[f][0] + (m.chart[f][1] - m.chart[f][0]) * b1 +
         (m.chart[f][2] - m.chart[f][0]) * b2;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::plane: return "plane";
    case Backend::half_plane: return "half_plane";
    case Backend::flat_torus: return "flat_torus";
    case Backend::sphere: return "sphere";
    case Backend::cone: return "cone";
    case Backend::polyhedral: return "polyhedral";
  }
  return "?";
}

Surface make_plane() {
  Surface s;
  s.backend = Backend::plane;
  return s;
}

Surface make_half_plane() {
  Surface s;
  s.backend = Backend::half_plane;
  return s;
}

Surface make_flat_torus(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw ConfigError("torus sides must be positive");
  Surface s;
  s.backend = Backend::flat_torus;
  s.a = a;
  s.b = b;
  return s;
}

Surface make_sphere(double R) {
  if (!(R > 0)) throw ConfigError("sphere radius must be positive");
  Surface s;
  s.backend = Backend::sphere;
  s.R = R;
  return s;
}

Surface make_cone(double rho) {
  if (!(rho > 0) || rho > 2 * kPi + 1e-15)
    throw ConfigError("cone angle must lie in (0, 2*pi]");
  Surface s;
  s.backend = Backend::cone;
  s.rho = std::min(rho, 2 * kPi);
  return s;
}

Surface make_polyhedral(PolyhedralMesh mesh) {
  Surface s;
  s.backend = Backend::polyhedral;
  s.mesh = std::make_shared<const PolyhedralMesh>(std::move(mesh));
  return s;
}

RegionSpec RegionSpec::ball(SurfacePoint c, double r) {
  // Radius 0 is allowed and denotes the closed singleton {c}; positive radii
  // are open balls.
  if (!(r >= 0)) throw ConfigError("ball radius must be nonnegative");
  RegionSpec rs;
  rs.kind = Kind::ball;
  rs.center = c;
  rs.radius = r;
  return rs;
}

RegionSpec RegionSpec::vertex_ball(int v, double r) {
  if (!(r > 0)) throw ConfigError("ball radius must be positive");
  RegionSpec rs;
  rs.kind = Kind::vertex_ball;
  rs.vertex = v;
  rs.radius = r;
  return rs;
}

RegionSpec RegionSpec::boundary_strip(double offset) {
  if (!(offset > 0)) throw ConfigError("strip offset must be positive");
  RegionSpec rs;
  rs.kind = Kind::boundary_strip;
  rs.offset = offset;
  return rs;
}

RegionSpec RegionSpec::faces(std::vector<int> ids) {
  if (ids.empty()) throw ConfigError("face region must be nonempty");
  RegionSpec rs;
  rs.kind = Kind::faces;
  rs.face_ids = std::move(ids);
  return rs;
}

SurfacePoint canonical_point(const Surface& s, SurfacePoint q) {
  switch (s.backend) {
    case Backend::plane:
      return {-1, q.p};
    case Backend::half_plane:
      if (q.p.y < -1e-9) throw ConfigError("point below the boundary line");
      return {-1, {q.p.x, std::max(q.p.y, 0.0)}};
    case Backend::flat_torus:
      return {-1, {wrap_mod(q.p.x, s.a), wrap_mod(q.p.y, s.b)}};
    case Backend::sphere:
      if (q.p.x < -1e-9 || q.p.x > kPi + 1e-9)
        throw ConfigError("colatitude outside [0, pi]");
      return {-1, {std::clamp(q.p.x, 0.0, kPi), wrap_mod(q.p.y, 2 * kPi)}};
    case Backend::cone:
      if (q.p.x < 0) throw ConfigError("cone radius must be >= 0");
      return {-1, {q.p.x, wrap_mod(q.p.y, s.rho)}};
    case Backend::polyhedral: {
      const auto& m = s.require_mesh();
      if (q.face < 0 || q.face >= int(m.faces.size()))
        throw ConfigError("face id out of range");
      if (!in_face(m, q.face, q.p, 1e-7 * std::max(1.0, m.max_edge)))
        throw ConfigError("point not on its face");
      MeshPoint mp = canonicalize(m, {q.face, q.p});
      return {mp.face, mp.p};
    }
  }
  throw ConfigError("bad backend");
}

SurfacePoint region_center(const Surface& s, const RegionSpec& region) {
  if (region.kind == RegionSpec::Kind::ball)
    return canonical_point(s, region.center);
  if (region.kind == RegionSpec::Kind::vertex_ball) {
    if (s.backend == Backend::cone) return {-1, {0, 0}};
    const auto& m = s.require_mesh();
    if (region.vertex < 0 || region.vertex >= m.n_vertices)
      throw ConfigError("vertex id out of range");
    auto corners = m.vertex_corners[region.vertex];
    auto best = *std::min_element(corners.begin(), corners.end());
    return {best.first, m.chart[best.first][best.second]};
  }
  throw ConfigError("region has no center");
}

double analytic_distance(const Surface& s, SurfacePoint x, SurfacePoint y) {
  x = canonical_point(s, x);
  y = canonical_point(s, y);
  switch (s.backend) {
    case Backend::plane:
    case Backend::half_plane:
      return dist(x.p, y.p);
    case Backend::flat_torus:
      return torus_point_dist(s.a, s.b, x.p, y.p);
    case Backend::sphere: {
      Vec3 u = sphere_embed(1.0, x.p), v = sphere_embed(1.0, y.p);
      return s.R * std::atan2(norm(cross(u, v)), dot(u, v));
    }
    case Backend::cone:
      return cone_distance(s.rho, x.p.x, x.p.y, y.p.x, y.p.y);
    case Backend::polyhedral:
      throw UnsupportedError("polyhedral distance requires the geodesic API");
  }
  throw ConfigError("bad backend");
}

double cone_distance(double rho, double u1, double psi1, double u2,
                     double psi2) {
  double d = std::abs(wrap_mod(psi1, rho) - wrap_mod(psi2, rho));
  double star = std::min(d, rho - d);
  if (star < kPi)
    return std::sqrt(std::max(
        0.0, u1 * u1 + u2 * u2 - 2 * u1 * u2 * std::cos(star)));
  return u1 + u2;
}

// === analytic ball areas ===

double sphere_cap_area(double R, double r) {
  double ang = std::min(r / R, kPi);
  return 2 * kPi * R * R * (1 - std::cos(ang));
}

double torus_ball_area(double a, double b, double r) {
  // The centered a-by-b rectangle is the Voronoi cell of the lattice, so the
  // nearest-representative distance equals plain distance inside it; the
  // ball area is exactly |disk(0,r) ∩ rect| for every r.
  std::vector<Vec2> rect{{-a / 2, -b / 2}, {a / 2, -b / 2},
                         {a / 2, b / 2},  {-a / 2, b / 2}};
  return polygon_disk_area(rect, {0, 0}, r);
}

double halfplane_ball_area(double d, double r) {
  if (d >= r) return kPi * r * r;
  double seg = r * r * std::acos(std::clamp(d / r, -1.0, 1.0)) -
               d * std::sqrt(std::max(0.0, r * r - d * d));
  return kPi * r * r - seg;
}

QuadResult cone_ball_area(double rho, double u, double r, double tol) {
  if (!(r > 0)) throw ConfigError("ball radius must be positive");
  if (u == 0) return {rho * r * r / 2, 0.0, 0};
  // b = 2 ∫_0^{rho/2} K(psi) dpsi, K = radial mass of the ball slice along
  // the ray at angular separation psi.
  auto slice = [&](double psi) {
    double sp = u * std::sin(psi);
    if (psi >= kPi / 2 && u >= r) return 0.0;
    double disc = r * r - sp * sp;
    if (disc <= 0) return 0.0;
    double root = std::sqrt(disc);
    double c = u * std::cos(psi);
    double hi = c + root, lo = std::max(c - root, 0.0);
    if (hi <= 0) return 0.0;
    return (hi * hi - lo * lo) / 2;
  };
  std::vector<double> breaks{0.0, rho / 2};
  if (u > r) {
    double psi1 = std::asin(r / u);
    if (psi1 < rho / 2) breaks.insert(breaks.begin() + 1, psi1);
  }
  QuadResult q = integrate_piecewise(slice, breaks, tol / 2);
  q.value *= 2;
  q.error *= 2;
  return q;
}

// === area ===

MeasureEstimate area(const Surface& s, const RegionSpec& region,
                     uint64_t mc_samples, uint64_t seed) {
  using K = RegionSpec::Kind;
  switch (region.kind) {
    case K::whole:
      switch (s.backend) {
        case Backend::flat_torus: return analytic_estimate(s.a * s.b);
        case Backend::sphere: return analytic_estimate(4 * kPi * s.R * s.R);
        case Backend::polyhedral:
          return analytic_estimate(s.require_mesh().total_area);
        default:
          throw ConfigError("whole-surface area is unbounded on this backend");
      }
    case K::ball: {
      SurfacePoint c = canonical_point(s, region.center);
      double r = region.radius;
      switch (s.backend) {
        case Backend::plane: return analytic_estimate(kPi * r * r);
        case Backend::half_plane:
          return analytic_estimate(halfplane_ball_area(c.p.y, r));
        case Backend::flat_torus:
          return analytic_estimate(torus_ball_area(s.a, s.b, r));
        case Backend::sphere:
          return analytic_estimate(sphere_cap_area(s.R, r));
        case Backend::cone: {
          QuadResult q = cone_ball_area(s.rho, c.p.x, r);
          if (q.evals == 0) return analytic_estimate(q.value);
          return {q.value, q.error, uint64_t(q.evals), Method::quadrature};
        }
        case Backend::polyhedral: {
          BallArea ba = mesh_ball_area(s.require_mesh(),
                                       region_sweep_source(s, region), r,
                                       mc_samples, seed);
          Method m = ba.std_error == 0 ? Method::analytic : Method::monte_carlo;
          return {ba.value, ba.std_error, mc_samples, m};
        }
      }
      throw ConfigError("bad backend");
    }
    case K::vertex_ball: {
      double r = region.radius;
      if (s.backend == Backend::cone)
        return analytic_estimate(s.rho * r * r / 2);
      if (s.backend != Backend::polyhedral)
        throw UnsupportedError("vertex_ball requires a polyhedral surface");
      BallArea ba = mesh_ball_area(s.require_mesh(),
                                   SweepSource::at_vertex(region.vertex), r,
                                   mc_samples, seed);
      Method m = ba.std_error == 0 ? Method::analytic : Method::monte_carlo;
      return {ba.value, ba.std_error, mc_samples, m};
    }
    case K::boundary_strip: {
      if (s.backend == Backend::half_plane)
        return analytic_estimate(region.offset);  // per unit boundary length
      if (s.backend != Backend::polyhedral)
        throw UnsupportedError("boundary_strip requires boundary");
      const auto& m = s.require_mesh();
      if (!m.has_boundary) throw ConfigError("surface has no boundary");
      uint64_t hits = 0;
      for (uint64_t i = 0; i < mc_samples; ++i) {
        Rng rng = Rng::substream(seed, i);
        double u = rng.next_double() * m.total_area;
        size_t f = 0;
        double acc = 0;
        for (; f + 1 < m.faces.size(); ++f) {
          acc += m.face_area[f];
          if (u <= acc) break;
        }
        Vec2 y = sample_face(m, int(f), rng);
        SweepOptions opt;
        opt.radius = region.offset;
        opt.collect_boundary_dist = true;
        SweepResult sw = sweep(m, SweepSource::at({int(f), y}), opt);
        if (sw.boundary_dist < region.offset) ++hits;
      }
      double p = double(hits) / double(mc_samples);
      double se = m.total_area *
                  std::sqrt(std::max(p * (1 - p), 0.0) / double(mc_samples));
      return {m.total_area * p, se, mc_samples, Method::monte_carlo};
    }
    case K::faces: {
      const auto& m = s.require_mesh();
      double sum = 0;
      for (int f : region.face_ids) {
        if (f < 0 || f >= int(m.faces.size()))
          throw ConfigError("face id out of range");
        sum += m.face_area[f];
      }
      return analytic_estimate(sum);
    }
  }
  throw ConfigError("bad region");
}

// === sampling ===

std::vector<SurfacePoint> sample_uniform(const Surface& s,
                                         const RegionSpec& region, uint64_t n,
                                         uint64_t seed) {
  using K = RegionSpec::Kind;
  std::vector<SurfacePoint> out;
  out.reserve(n);

  auto unsupported = [&]() -> std::vector<SurfacePoint> {
    throw UnsupportedError(std::string("cannot sample this region on ") +
                           backend_name(s.backend));
  };

  switch (s.backend) {
    case Backend::flat_torus: {
      if (region.kind == K::whole) {
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          out.push_back({-1, {s.a * rng.next_double(), s.b * rng.next_double()}});
        }
        return out;
      }
      if (region.kind == K::ball) {
        SurfacePoint c = canonical_point(s, region.center);
        double r = region.radius;
        bool small = r <= std::min(s.a, s.b) / 2;
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          Vec2 p;
          if (small) {
            double rad = r * std::sqrt(rng.next_double());
            double ang = 2 * kPi * rng.next_double();
            p = {c.p.x + rad * std::cos(ang), c.p.y + rad * std::sin(ang)};
          } else {
            do {
              p = {s.a * rng.next_double(), s.b * rng.next_double()};
            } while (torus_point_dist(s.a, s.b, p, c.p) >= r);
          }
          out.push_back(canonical_point(s, {-1, p}));
        }
        return out;
      }
      return unsupported();
    }
    case Backend::plane: {
      if (region.kind != K::ball) return unsupported();
      SurfacePoint c = canonical_point(s, region.center);
      for (uint64_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, i);
        double rad = region.radius * std::sqrt(rng.next_double());
        double ang = 2 * kPi * rng.next_double();
        out.push_back({-1, {c.p.x + rad * std::cos(ang),
                            c.p.y + rad * std::sin(ang)}});
      }
      return out;
    }
    case Backend::half_plane: {
      if (region.kind == K::boundary_strip) {
        // Unit boundary cell [0,1) x [0, offset): the convention matching the
        // per-unit-length strip area.
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          out.push_back(
              {-1, {rng.next_double(), region.offset * rng.next_double()}});
        }
        return out;
      }
      if (region.kind != K::ball) return unsupported();
      SurfacePoint c = canonical_point(s, region.center);
      for (uint64_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, i);
        Vec2 p;
        do {
          double rad = region.radius * std::sqrt(rng.next_double());
          double ang = 2 * kPi * rng.next_double();
          p = {c.p.x + rad * std::cos(ang), c.p.y + rad * std::sin(ang)};
        } while (p.y < 0);
        out.push_back({-1, p});
      }
      return out;
    }
    case Backend::sphere: {
      if (region.kind == K::whole) {
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          double z = rng.uniform(-1.0, 1.0);
          double lon = 2 * kPi * rng.next_double();
          out.push_back({-1, {std::acos(std::clamp(z, -1.0, 1.0)), lon}});
        }
        return out;
      }
      if (region.kind == K::ball) {
        SurfacePoint c = canonical_point(s, region.center);
        double zmin = std::cos(std::min(region.radius / s.R, kPi));
        Vec3 cdir = normalized(sphere_embed(1.0, c.p));
        Vec3 north{0, 0, 1};
        Vec3 axis = cross(north, cdir);
        double an = norm(axis);
        double ang = std::atan2(an, dot(north, cdir));
        axis = an > 1e-15 ? axis * (1.0 / an) : Vec3{1, 0, 0};
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          double z = rng.uniform(zmin, 1.0);
          double lon = 2 * kPi * rng.next_double();
          double st = std::sqrt(std::max(0.0, 1 - z * z));
          Vec3 v{st * std::cos(lon), st * std::sin(lon), z};
          Vec3 w = rotate_axis(v, axis, ang);
          double colat = std::acos(std::clamp(w.z, -1.0, 1.0));
          out.push_back({-1, {colat, std::atan2(w.y, w.x)}});
        }
        return out;
      }
      return unsupported();
    }
    case Backend::cone: {
      if (region.kind != K::ball && region.kind != K::vertex_ball)
        return unsupported();
      double r = region.radius;
      SurfacePoint c = region.kind == K::vertex_ball
                           ? SurfacePoint{-1, {0, 0}}
                           : canonical_point(s, region.center);
      double u0 = c.p.x;
      if (u0 <= r) {
        // Apex inside: reject from the sector u < u0 + r.
        double lim = u0 + r;
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          Vec2 p;
          do {
            p = {lim * std::sqrt(rng.next_double()),
                 s.rho * rng.next_double()};
          } while (cone_distance(s.rho, p.x, p.y, u0, c.p.y) >= r);
          out.push_back(canonical_point(s, {-1, p}));
        }
        return out;
      }
      // Apex outside: reject from an annular sector around the center ray.
      double dpsi = std::asin(std::min(1.0, r / (u0 - r))) * 1.0000001;
      dpsi = std::min(dpsi, s.rho / 2);
      double ulo = u0 - r, uhi = u0 + r;
      double ulo2 = ulo * ulo, uhi2 = uhi * uhi;
      for (uint64_t i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed, i);
        Vec2 p;
        do {
          double uu = std::sqrt(ulo2 + (uhi2 - ulo2) * rng.next_double());
          double psi = c.p.y + rng.uniform(-dpsi, dpsi);
          p = {uu, wrap_mod(psi, s.rho)};
        } while (cone_distance(s.rho, p.x, p.y, u0, c.p.y) >= r);
        out.push_back({-1, p});
      }
      return out;
    }
    case Backend::polyhedral: {
      const auto& m = s.require_mesh();
      if (region.kind == K::whole || region.kind == K::faces) {
        std::vector<int> ids;
        if (region.kind == K::whole) {
          ids.resize(m.faces.size());
          for (size_t i = 0; i < ids.size(); ++i) ids[i] = int(i);
        } else {
          ids = region.face_ids;
        }
        std::vector<double> cum;
        double total = 0;
        for (int f : ids) {
          if (f < 0 || f >= int(m.faces.size()))
            throw ConfigError("face id out of range");
          total += m.face_area[f];
          cum.push_back(total);
        }
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          double u = rng.next_double() * total;
          size_t j = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
          if (j >= ids.size()) j = ids.size() - 1;
          out.push_back({ids[j], sample_face(m, ids[j], rng)});
        }
        return out;
      }
      if (region.kind == K::ball || region.kind == K::vertex_ball) {
        MeshBallSampler sampler(s, region);
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          out.push_back(sampler.draw(rng));
        }
        return out;
      }
      if (region.kind == K::boundary_strip) {
        if (!m.has_boundary) throw ConfigError("surface has no boundary");
        for (uint64_t i = 0; i < n; ++i) {
          Rng rng = Rng::substream(seed, i);
          for (int iter = 0;; ++iter) {
            if (iter >= 100000)
              throw BudgetError("strip rejection sampling failed to accept");
            double u = rng.next_double() * m.total_area;
            size_t f = 0;
            double acc = 0;
            for (; f + 1 < m.faces.size(); ++f) {
              acc += m.face_area[f];
              if (u <= acc) break;
            }
            Vec2 y = sample_face(m, int(f), rng);
            SweepOptions opt;
            opt.radius = region.offset;
            opt.collect_boundary_dist = true;
            SweepResult sw = sweep(m, SweepSource::at({int(f), y}), opt);
            if (sw.boundary_dist < region.offset) {
              out.push_back({int(f), y});
              break;
            }
          }
        }
        return out;
      }
      return unsupported();
    }
  }
  throw ConfigError("bad backend");
}

// === curvature measures ===

MeasureEstimate curvature_measure(const Surface& s, const RegionSpec& region,
                                  bool absolute) {
  using K = RegionSpec::Kind;
  switch (s.backend) {
    case Backend::plane:
    case Backend::half_plane:
    case Backend::flat_torus:
      return analytic_estimate(0.0);
    case Backend::sphere:
      throw UnsupportedError(
          "curvature is not atomic on the sphere backend");
    case Backend::cone: {
      double alpha = 2 * kPi - s.rho;
      bool inside = false;
      if (region.kind == K::whole) {
        inside = true;
      } else if (region.kind == K::ball) {
        SurfacePoint c = canonical_point(s, region.center);
        inside = c.p.x < region.radius;
      } else if (region.kind == K::vertex_ball) {
        inside = true;  // the apex is the only vertex
      } else {
        throw UnsupportedError("region not supported for curvature on cone");
      }
      return analytic_estimate(inside ? (absolute ? std::abs(alpha) : alpha)
                                      : 0.0);
    }
    case Backend::polyhedral: {
      const auto& m = s.require_mesh();
      auto add = [&](double acc, int v) {
        if (m.vertex_boundary[v]) return acc;
        double d = m.defect(v);
        return acc + (absolute ? std::abs(d) : d);
      };
      double sum = 0;
      if (region.kind == K::whole) {
        for (int v = 0; v < m.n_vertices; ++v) sum = add(sum, v);
      } else if (region.kind == K::faces) {
        std::set<int> fs(region.face_ids.begin(), region.face_ids.end());
        for (int v = 0; v < m.n_vertices; ++v) {
          auto corners = m.vertex_corners[v];
          int owner = std::min_element(corners.begin(), corners.end())->first;
          if (fs.count(owner)) sum = add(sum, v);
        }
      } else if (region.kind == K::ball || region.kind == K::vertex_ball) {
        SweepOptions opt;
        opt.radius = region.radius;
        opt.collect_vertex_dists = true;
        SweepResult sw = sweep(m, region_sweep_source(s, region), opt);
        for (int v = 0; v < m.n_vertices; ++v)
          if (sw.vertex_dist[v] < region.radius) sum = add(sum, v);
      } else {
        throw UnsupportedError("region not supported for curvature measure");
      }
      return analytic_estimate(sum);
    }
  }
  throw ConfigError("bad backend");
}

MeasureEstimate mean_curvature_measure(const Surface& s,
                                       const RegionSpec& region) {
  using K = RegionSpec::Kind;
  const auto& m = s.require_mesh();
  if (m.edge_exterior_angle.empty())
    throw UnsupportedError(
        "edge-supported curvature requires embedded positions");
  double sum = 0;
  if (region.kind == K::whole) {
    for (size_t i = 0; i < m.edges.size(); ++i)
      if (!m.edges[i].boundary)
        sum += m.edges[i].len * m.edge_exterior_angle[i];
  } else if (region.kind == K::faces) {
    std::set<int> fs(region.face_ids.begin(), region.face_ids.end());
    for (size_t i = 0; i < m.edges.size(); ++i) {
      const auto& e = m.edges[i];
      if (!e.boundary && fs.count(e.f0))
        sum += e.len * m.edge_exterior_angle[i];
    }
  } else if (region.kind == K::ball || region.kind == K::vertex_ball) {
    SweepOptions opt;
    opt.radius = region.radius;
    opt.collect_edge_intervals = true;
    SweepResult sw = sweep(m, region_sweep_source(s, region), opt);
    for (auto [e, len] : merge_edge_intervals(std::move(sw.edge_intervals)))
      if (!m.edges[e].boundary) sum += len * m.edge_exterior_angle[e];
  } else {
    throw UnsupportedError("region not supported for edge curvature");
  }
  return analytic_estimate(sum);
}

double feature_scale(const Surface& s) {
  switch (s.backend) {
    case Backend::plane:
    case Backend::half_plane:
    case Backend::cone:
      return 1.0;
    case Backend::flat_torus:
      return std::min(s.a, s.b) / 2;
    case Backend::sphere:
      return s.R;
    case Backend::polyhedral:
      return s.require_mesh().min_edge;
  }
  return 1.0;
}

}  // namespace devlab
