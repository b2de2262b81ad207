#include "devlab/hull.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace devlab {

namespace {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

// Exact rational from a double (finite values only).
Rat exact_rat(double x) {
  if (!std::isfinite(x)) throw ConfigError("non-finite coordinate");
  if (x == 0) return Rat(0);
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
  long long mi = llround(std::ldexp(m, 53));
  e -= 53;
  Rat r(mi);
  if (e >= 0)
    r *= Rat(Int(1) << e);
  else
    r /= Rat(Int(1) << -e);
  return r;
}

int sign_of(const Rat& r) { return r == 0 ? 0 : (r > 0 ? 1 : -1); }

// Exact collinearity of three points: all 2x2 minors of [b-a; c-a] vanish.
bool collinear_exact(const Vec3& a, const Vec3& b, const Vec3& c) {
  Rat bx = exact_rat(b.x) - exact_rat(a.x), by = exact_rat(b.y) - exact_rat(a.y),
      bz = exact_rat(b.z) - exact_rat(a.z);
  Rat cx = exact_rat(c.x) - exact_rat(a.x), cy = exact_rat(c.y) - exact_rat(a.y),
      cz = exact_rat(c.z) - exact_rat(a.z);
  return bx * cy - by * cx == 0 && by * cz - bz * cy == 0 &&
         bx * cz - bz * cx == 0;
}

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c,
                   const Vec3& d) {
  Rat bx = exact_rat(b.x) - exact_rat(a.x), by = exact_rat(b.y) - exact_rat(a.y),
      bz = exact_rat(b.z) - exact_rat(a.z);
  Rat cx = exact_rat(c.x) - exact_rat(a.x), cy = exact_rat(c.y) - exact_rat(a.y),
      cz = exact_rat(c.z) - exact_rat(a.z);
  Rat dx = exact_rat(d.x) - exact_rat(a.x), dy = exact_rat(d.y) - exact_rat(a.y),
      dz = exact_rat(d.z) - exact_rat(a.z);
  Rat det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) +
            bz * (cx * dy - cy * dx);
  return sign_of(det);
}

}  // namespace

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  double bx = b.x - a.x, by = b.y - a.y, bz = b.z - a.z;
  double cx = c.x - a.x, cy = c.y - a.y, cz = c.z - a.z;
  double dx = d.x - a.x, dy = d.y - a.y, dz = d.z - a.z;
  double det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) +
               bz * (cx * dy - cy * dx);
  double perm = std::abs(bx) * (std::abs(cy) * std::abs(dz) +
                                std::abs(cz) * std::abs(dy)) +
                std::abs(by) * (std::abs(cx) * std::abs(dz) +
                                std::abs(cz) * std::abs(dx)) +
                std::abs(bz) * (std::abs(cx) * std::abs(dy) +
                                std::abs(cy) * std::abs(dx));
  double bound = 1e-14 * perm;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  return orient3d_exact(a, b, c, d);
}

namespace {

struct HullFace {
  std::array<int, 3> v;
  bool alive = true;
};

std::vector<std::array<int, 3>> raw_hull(const std::vector<Vec3>& pts,
                                         const std::vector<int>& order) {
  // Initial simplex: first point, first distinct, first non-collinear,
  // first non-coplanar.
  int n = int(order.size());
  int i0 = order[0], i1 = -1, i2 = -1, i3 = -1;
  for (int k = 1; k < n && i1 < 0; ++k) {
    const Vec3& p = pts[size_t(order[size_t(k)])];
    const Vec3& q = pts[size_t(i0)];
    if (p.x != q.x || p.y != q.y || p.z != q.z) i1 = order[size_t(k)];
  }
  if (i1 < 0) throw ConfigError("hull: all points identical");
  for (int k = 1; k < n && i2 < 0; ++k) {
    int c = order[size_t(k)];
    if (c == i1) continue;
    if (!collinear_exact(pts[size_t(i0)], pts[size_t(i1)], pts[size_t(c)]))
      i2 = c;
  }
  if (i2 < 0) throw ConfigError("hull: points are collinear");
  for (int k = 1; k < n && i3 < 0; ++k) {
    int c = order[size_t(k)];
    if (c == i1 || c == i2) continue;
    if (orient3d(pts[size_t(i0)], pts[size_t(i1)], pts[size_t(i2)],
                 pts[size_t(c)]) != 0)
      i3 = c;
  }
  if (i3 < 0) throw ConfigError("hull: points are coplanar");
  if (orient3d(pts[size_t(i0)], pts[size_t(i1)], pts[size_t(i2)],
               pts[size_t(i3)]) < 0)
    std::swap(i1, i2);

  std::vector<HullFace> faces;
  faces.push_back({{i0, i2, i1}, true});
  faces.push_back({{i0, i1, i3}, true});
  faces.push_back({{i1, i2, i3}, true});
  faces.push_back({{i2, i0, i3}, true});

  std::set<int> in_simplex{i0, i1, i2, i3};
  for (int k = 0; k < n; ++k) {
    int pi = order[size_t(k)];
    if (in_simplex.count(pi)) continue;
    const Vec3& p = pts[size_t(pi)];
    // Strictly visible faces.
    std::vector<int> visible;
    for (size_t fi = 0; fi < faces.size(); ++fi) {
      if (!faces[fi].alive) continue;
      const auto& f = faces[fi].v;
      if (orient3d(pts[size_t(f[0])], pts[size_t(f[1])], pts[size_t(f[2])],
                   p) > 0)
        visible.push_back(int(fi));
    }
    if (visible.empty()) continue;  // inside or on the hull
    std::set<int> vis(visible.begin(), visible.end());
    // Horizon: directed edges of visible faces whose twin face is hidden.
    std::map<std::pair<int, int>, int> owner;  // directed edge -> face
    for (size_t fi = 0; fi < faces.size(); ++fi) {
      if (!faces[fi].alive) continue;
      const auto& f = faces[fi].v;
      for (int e = 0; e < 3; ++e)
        owner[{f[size_t(e)], f[size_t((e + 1) % 3)]}] = int(fi);
    }
    std::map<int, int> nxt;  // horizon chain
    for (int fi : visible) {
      const auto& f = faces[size_t(fi)].v;
      for (int e = 0; e < 3; ++e) {
        int u = f[size_t(e)], w = f[size_t((e + 1) % 3)];
        auto tw = owner.find({w, u});
        if (tw == owner.end())
          throw ConfigError("hull: open surface during construction");
        if (!vis.count(tw->second)) nxt[u] = w;
      }
    }
    if (nxt.empty()) throw ConfigError("hull: empty horizon");
    for (int fi : visible) faces[size_t(fi)].alive = false;
    int start = nxt.begin()->first;
    int u = start;
    size_t steps = 0;
    do {
      auto it = nxt.find(u);
      if (it == nxt.end()) throw ConfigError("hull: broken horizon");
      int w = it->second;
      faces.push_back({{u, w, pi}, true});
      u = w;
      if (++steps > nxt.size()) throw ConfigError("hull: horizon not a cycle");
    } while (u != start);
    if (steps != nxt.size()) throw ConfigError("hull: split horizon");
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& f : faces)
    if (f.alive) out.push_back(f.v);
  return out;
}

}  // namespace

std::vector<std::array<int, 3>> convex_hull_faces(const std::vector<Vec3>& pts) {
  if (pts.size() < 4) throw ConfigError("hull needs at least 4 points");
  // Deduplicate exact coordinate triples, keeping the lowest index.
  std::map<std::array<double, 3>, int> seen;
  std::vector<int> order;
  for (int i = 0; i < int(pts.size()); ++i) {
    std::array<double, 3> key{pts[size_t(i)].x, pts[size_t(i)].y,
                              pts[size_t(i)].z};
    if (seen.emplace(key, i).second) order.push_back(i);
  }
  auto tris = raw_hull(pts, order);

  // Merge exactly-coplanar adjacent triangles into patches.
  std::map<std::pair<int, int>, int> owner;
  for (size_t fi = 0; fi < tris.size(); ++fi)
    for (int e = 0; e < 3; ++e)
      owner[{tris[fi][size_t(e)], tris[fi][size_t((e + 1) % 3)]}] = int(fi);
  auto coplanar_across = [&](int fa, int fb) {
    const auto& A = tris[size_t(fa)];
    const auto& B = tris[size_t(fb)];
    for (int j = 0; j < 3; ++j) {
      int v = B[size_t(j)];
      if (v != A[0] && v != A[1] && v != A[2]) {
        return orient3d(pts[size_t(A[0])], pts[size_t(A[1])],
                        pts[size_t(A[2])], pts[size_t(v)]) == 0;
      }
    }
    return true;  // same vertex set
  };
  std::vector<int> patch(tris.size(), -1);
  int n_patches = 0;
  for (size_t fi = 0; fi < tris.size(); ++fi) {
    if (patch[fi] != -1) continue;
    int id = n_patches++;
    std::vector<int> stack{int(fi)};
    patch[fi] = id;
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      for (int e = 0; e < 3; ++e) {
        int u = tris[size_t(f)][size_t(e)];
        int w = tris[size_t(f)][size_t((e + 1) % 3)];
        int g = owner.at({w, u});
        if (patch[size_t(g)] == -1 && coplanar_across(f, g)) {
          patch[size_t(g)] = id;
          stack.push_back(g);
        }
      }
    }
  }

  // Retriangulate each patch: boundary cycle, fan from lowest-index vertex.
  std::vector<std::array<int, 3>> out;
  for (int pid = 0; pid < n_patches; ++pid) {
    std::map<int, int> nxt;
    int count = 0;
    for (size_t fi = 0; fi < tris.size(); ++fi) {
      if (patch[fi] != pid) continue;
      ++count;
      for (int e = 0; e < 3; ++e) {
        int u = tris[fi][size_t(e)], w = tris[fi][size_t((e + 1) % 3)];
        if (patch[size_t(owner.at({w, u}))] != pid) nxt[u] = w;
      }
    }
    if (count == 1) {
      for (size_t fi = 0; fi < tris.size(); ++fi)
        if (patch[fi] == pid) out.push_back(tris[fi]);
      continue;
    }
    // Walk the cycle starting at the lowest vertex index.
    int v0 = nxt.begin()->first;
    for (const auto& [u, w] : nxt) {
      (void)w;
      v0 = std::min(v0, u);
    }
    std::vector<int> cycle{v0};
    int u = nxt.at(v0);
    while (u != v0) {
      cycle.push_back(u);
      u = nxt.at(u);
      if (cycle.size() > nxt.size())
        throw ConfigError("hull: patch boundary not a single cycle");
    }
    for (size_t i = 1; i + 1 < cycle.size(); ++i)
      out.push_back({cycle[0], cycle[i], cycle[i + 1]});
  }
  return out;
}

PolyhedralMesh build_convex_hull_surface(const std::vector<Vec3>& pts) {
  auto tris = convex_hull_faces(pts);
  // Reindex to the vertices actually used, preserving input order.
  std::set<int> used;
  for (const auto& t : tris) used.insert(t.begin(), t.end());
  std::map<int, int> remap;
  std::vector<Vec3> pos;
  for (int idx : used) {
    remap[idx] = int(pos.size());
    pos.push_back(pts[size_t(idx)]);
  }
  MeshSpec s;
  s.n_vertices = int(pos.size());
  s.positions = std::move(pos);
  for (const auto& t : tris)
    s.faces.push_back({remap.at(t[0]), remap.at(t[1]), remap.at(t[2])});
  PolyhedralMesh m = build_mesh(s);
  if (!m.convex_embedded)
    throw ConfigError("hull surface failed convexity validation");
  return m;
}

PolyhedralMesh delaunay_mesh(const std::vector<Vec2>& pts) {
  if (pts.size() < 3) throw ConfigError("triangulation needs >= 3 points");
  std::vector<Vec3> lift;
  lift.reserve(pts.size());
  for (const Vec2& p : pts)
    lift.push_back({p.x, p.y, p.x * p.x + p.y * p.y});
  auto tris = convex_hull_faces(lift);
  // Keep lower-hull faces (outward normal pointing down), re-wound CCW in xy.
  // The sign of the projected orientation is decided exactly: it equals
  // orient3d against a point shifted straight up.
  std::vector<std::array<int, 3>> lower;
  for (const auto& t : tris) {
    const Vec3 &a = lift[size_t(t[0])], &b = lift[size_t(t[1])],
               &c = lift[size_t(t[2])];
    Vec3 up{a.x, a.y, a.z + 1.0};
    if (orient3d(a, b, c, up) < 0) lower.push_back({t[0], t[2], t[1]});
  }
  if (lower.empty()) throw ConfigError("triangulation: no lower hull faces");
  std::set<int> used;
  for (const auto& t : lower) used.insert(t.begin(), t.end());
  if (int(used.size()) != int(pts.size()))
    throw ConfigError("triangulation: duplicate or degenerate input points");
  std::map<int, int> remap;
  std::vector<Vec3> pos;
  for (int idx : used) {
    remap[idx] = int(pos.size());
    pos.push_back({pts[size_t(idx)].x, pts[size_t(idx)].y, 0.0});
  }
  MeshSpec s;
  s.n_vertices = int(pos.size());
  s.positions = std::move(pos);
  for (const auto& t : lower)
    s.faces.push_back({remap.at(t[0]), remap.at(t[1]), remap.at(t[2])});
  return build_mesh(s);
}

}  // namespace devlab
