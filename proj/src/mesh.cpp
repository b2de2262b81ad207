#include "devlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace devlab {

Xform Xform::then(const Xform& o) const {
  Xform r;
  r.m00 = o.m00 * m00 + o.m01 * m10;
  r.m01 = o.m00 * m01 + o.m01 * m11;
  r.m10 = o.m10 * m00 + o.m11 * m10;
  r.m11 = o.m10 * m01 + o.m11 * m11;
  r.t = o.linear(t) + o.t;
  return r;
}

Xform Xform::inverse() const {
  Xform r;
  double det = m00 * m11 - m01 * m10;  // +-1 for isometries
  r.m00 = m11 / det;
  r.m01 = -m01 / det;
  r.m10 = -m10 / det;
  r.m11 = m00 / det;
  Vec2 it = r.linear(t);
  r.t = {-it.x, -it.y};
  return r;
}

namespace {

double corner_angle(double adj1, double adj2, double opp) {
  double c = (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2 * adj1 * adj2);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// CCW chart layout of a triangle from its edge lengths.
std::array<Vec2, 3> layout(double l0, double l1, double l2) {
  // corners 0,1,2; edge k joins corners k,(k+1): |01|=l0, |12|=l1, |20|=l2.
  double x = (l0 * l0 + l2 * l2 - l1 * l1) / (2 * l0);
  double y2 = l2 * l2 - x * x;
  if (y2 <= 0)
    throw ConfigError("degenerate triangle: lengths " + std::to_string(l0) +
                      "," + std::to_string(l1) + "," + std::to_string(l2));
  return {Vec2{0, 0}, Vec2{l0, 0}, Vec2{x, std::sqrt(y2)}};
}

}  // namespace

PolyhedralMesh build_mesh(const MeshSpec& spec) {
  PolyhedralMesh m;
  m.n_vertices = spec.n_vertices;
  m.faces = spec.faces;
  size_t nf = m.faces.size();
  if (nf == 0) throw ConfigError("mesh has no faces");
  for (auto& f : m.faces) {
    for (int i = 0; i < 3; ++i) {
      if (f[size_t(i)] < 0 || f[size_t(i)] >= m.n_vertices)
        throw ConfigError("face vertex id out of range");
    }
    if (f[0] == f[1] || f[1] == f[2] || f[2] == f[0])
      throw ConfigError("face repeats a vertex");
  }

  // Edge lengths.
  m.len.resize(nf);
  if (spec.positions) {
    if (int(spec.positions->size()) != m.n_vertices)
      throw ConfigError("positions size mismatch");
    m.positions = spec.positions;
    for (size_t f = 0; f < nf; ++f) {
      for (int k = 0; k < 3; ++k) {
        Vec3 a = (*m.positions)[size_t(m.faces[f][size_t(k)])];
        Vec3 b = (*m.positions)[size_t(m.faces[f][size_t((k + 1) % 3)])];
        m.len[f][size_t(k)] = norm(b - a);
      }
    }
  } else if (spec.lengths) {
    if (spec.lengths->size() != nf) throw ConfigError("lengths size mismatch");
    m.len = *spec.lengths;
  } else {
    throw ConfigError("mesh spec needs positions or lengths");
  }

  // Charts and areas.
  m.chart.resize(nf);
  m.face_area.resize(nf);
  m.min_edge = std::numeric_limits<double>::infinity();
  m.max_edge = 0;
  for (size_t f = 0; f < nf; ++f) {
    double l0 = m.len[f][0], l1 = m.len[f][1], l2 = m.len[f][2];
    if (!(l0 > 0 && l1 > 0 && l2 > 0))
      throw ConfigError("non-positive edge length");
    m.chart[f] = layout(l0, l1, l2);
    m.face_area[f] = 0.5 * cross(m.chart[f][1] - m.chart[f][0],
                                 m.chart[f][2] - m.chart[f][0]);
    m.total_area += m.face_area[f];
    for (int k = 0; k < 3; ++k) {
      m.min_edge = std::min(m.min_edge, m.len[f][size_t(k)]);
      m.max_edge = std::max(m.max_edge, m.len[f][size_t(k)]);
    }
  }

  // Adjacency: explicit glue records first, then vertex-pair matching.
  m.nbr.assign(nf, {-1, -1, -1});
  m.nbr_edge.assign(nf, {-1, -1, -1});
  auto set_glue = [&](int f0, int k0, int f1, int k1) {
    if (f0 < 0 || size_t(f0) >= nf || f1 < 0 || size_t(f1) >= nf || k0 < 0 ||
        k0 > 2 || k1 < 0 || k1 > 2)
      throw ConfigError("glue record out of range");
    if (f0 == f1 && k0 == k1) throw ConfigError("edge glued to itself");
    if (m.nbr[size_t(f0)][size_t(k0)] != -1 ||
        m.nbr[size_t(f1)][size_t(k1)] != -1)
      throw ConfigError("edge glued twice");
    double la = m.len[size_t(f0)][size_t(k0)];
    double lb = m.len[size_t(f1)][size_t(k1)];
    if (std::abs(la - lb) > 1e-9 * std::max(1.0, std::max(la, lb)))
      throw ConfigError("glued edges have different lengths");
    int a0 = m.faces[size_t(f0)][size_t(k0)];
    int b0 = m.faces[size_t(f0)][size_t((k0 + 1) % 3)];
    int a1 = m.faces[size_t(f1)][size_t(k1)];
    int b1 = m.faces[size_t(f1)][size_t((k1 + 1) % 3)];
    if (!((a0 == a1 && b0 == b1) || (a0 == b1 && b0 == a1)))
      throw ConfigError("glued edges join different vertices");
    m.nbr[size_t(f0)][size_t(k0)] = f1;
    m.nbr_edge[size_t(f0)][size_t(k0)] = k1;
    m.nbr[size_t(f1)][size_t(k1)] = f0;
    m.nbr_edge[size_t(f1)][size_t(k1)] = k0;
  };
  for (const GlueSpec& g : spec.glue) set_glue(g.f0, g.k0, g.f1, g.k1);

  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_pair;
  for (size_t f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      if (m.nbr[f][size_t(k)] != -1) continue;
      int a = m.faces[f][size_t(k)], b = m.faces[f][size_t((k + 1) % 3)];
      by_pair[{std::min(a, b), std::max(a, b)}].push_back({int(f), k});
    }
  }
  for (auto& [pair, sides] : by_pair) {
    (void)pair;
    if (sides.size() == 1) continue;  // boundary
    if (sides.size() != 2)
      throw ConfigError(
          "ambiguous adjacency (vertex pair shared by >2 half-edges); "
          "provide explicit gluing");
    set_glue(sides[0].first, sides[0].second, sides[1].first,
             sides[1].second);
  }

  // Global edge table.
  m.edge_id.assign(nf, {-1, -1, -1});
  for (size_t f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      if (m.edge_id[f][size_t(k)] != -1) continue;
      MeshEdge e;
      int a = m.faces[f][size_t(k)], b = m.faces[f][size_t((k + 1) % 3)];
      e.va = std::min(a, b);
      e.vb = std::max(a, b);
      e.len = m.len[f][size_t(k)];
      int g = m.nbr[f][size_t(k)], gk = m.nbr_edge[f][size_t(k)];
      if (g == -1) {
        e.f0 = int(f);
        e.k0 = k;
        e.boundary = true;
        m.has_boundary = true;
      } else if (g > int(f) || (g == int(f) && gk > k)) {
        e.f0 = int(f);
        e.k0 = k;
        e.f1 = g;
        e.k1 = gk;
      } else {
        e.f0 = g;
        e.k0 = gk;
        e.f1 = int(f);
        e.k1 = k;
      }
      int id = int(m.edges.size());
      m.edges.push_back(e);
      m.edge_id[f][size_t(k)] = id;
      if (g != -1) m.edge_id[size_t(g)][size_t(gk)] = id;
    }
  }

  // Transitions across interior edges.
  m.trans.resize(nf);
  for (size_t f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      int g = m.nbr[f][size_t(k)];
      if (g == -1) continue;
      int gk = m.nbr_edge[f][size_t(k)];
      Vec2 A = m.chart[f][size_t(k)];
      Vec2 B = m.chart[f][size_t((k + 1) % 3)];
      int va = m.faces[f][size_t(k)];
      int vga = m.faces[size_t(g)][size_t(gk)];
      bool consistent = (vga != va);  // shared edge traversed oppositely
      Vec2 Ai, Bi;                    // images of A, B in g's chart
      if (consistent) {
        Ai = m.chart[size_t(g)][size_t((gk + 1) % 3)];
        Bi = m.chart[size_t(g)][size_t(gk)];
      } else {
        Ai = m.chart[size_t(g)][size_t(gk)];
        Bi = m.chart[size_t(g)][size_t((gk + 1) % 3)];
      }
      Vec2 u = normalized(B - A), up = normalized(Bi - Ai);
      Vec2 v = perp(u), vp = perp(up);
      if (!consistent) vp = -vp;  // reflect so interiors land on opposite sides
      Xform x;
      x.m00 = up.x * u.x + vp.x * v.x;
      x.m01 = up.x * u.y + vp.x * v.y;
      x.m10 = up.y * u.x + vp.y * v.x;
      x.m11 = up.y * u.y + vp.y * v.y;
      x.t = Ai - x.linear(A);
      m.trans[f][size_t(k)] = x;
    }
  }

  // Vertex incidence, cone angles, boundary flags.
  m.vertex_corners.assign(size_t(m.n_vertices), {});
  m.cone_angle.assign(size_t(m.n_vertices), 0.0);
  m.vertex_boundary.assign(size_t(m.n_vertices), false);
  for (size_t f = 0; f < nf; ++f) {
    for (int i = 0; i < 3; ++i) {
      int v = m.faces[f][size_t(i)];
      m.vertex_corners[size_t(v)].push_back({int(f), i});
      double a = corner_angle(m.len[f][size_t(i)], m.len[f][size_t((i + 2) % 3)],
                              m.len[f][size_t((i + 1) % 3)]);
      m.cone_angle[size_t(v)] += a;
    }
  }
  for (const MeshEdge& e : m.edges) {
    if (e.boundary) {
      m.vertex_boundary[size_t(e.va)] = true;
      m.vertex_boundary[size_t(e.vb)] = true;
    }
  }
  for (int v = 0; v < m.n_vertices; ++v) {
    if (m.vertex_corners[size_t(v)].empty())
      throw ConfigError("isolated vertex " + std::to_string(v));
    if (!m.vertex_boundary[size_t(v)] &&
        m.cone_angle[size_t(v)] > 2 * kPi + 1e-12)
      m.has_spike_vertex = true;
  }

  // Manifold vertex check: corners around each vertex form one fan.
  for (int v = 0; v < m.n_vertices; ++v) {
    const auto& corners = m.vertex_corners[size_t(v)];
    std::set<std::pair<int, int>> seen;
    // Walk from the first corner in both rotational directions.
    std::deque<std::pair<int, int>> todo{corners[0]};
    seen.insert(corners[0]);
    while (!todo.empty()) {
      auto [f, i] = todo.front();
      todo.pop_front();
      for (int which = 0; which < 2; ++which) {
        // Edges at corner i: local edge i (outgoing) and (i+2)%3 (incoming).
        int k = which == 0 ? i : (i + 2) % 3;
        int g = m.nbr[size_t(f)][size_t(k)];
        if (g == -1) continue;
        // Locate v's corner in g.
        for (int j = 0; j < 3; ++j) {
          if (m.faces[size_t(g)][size_t(j)] == v) {
            if (seen.insert({g, j}).second) todo.push_back({g, j});
            break;
          }
        }
      }
    }
    if (seen.size() != corners.size())
      throw ConfigError("non-manifold vertex " + std::to_string(v));
  }

  // Face connectivity.
  {
    std::vector<char> vis(nf, 0);
    std::deque<int> todo{0};
    vis[0] = 1;
    size_t count = 1;
    while (!todo.empty()) {
      int f = todo.front();
      todo.pop_front();
      for (int k = 0; k < 3; ++k) {
        int g = m.nbr[size_t(f)][size_t(k)];
        if (g != -1 && !vis[size_t(g)]) {
          vis[size_t(g)] = 1;
          ++count;
          todo.push_back(g);
        }
      }
    }
    if (count != nf) throw ConfigError("mesh is not connected");
  }

  // Embedded geometry: exterior dihedral angles and global convexity.
  if (m.positions && !m.has_boundary) {
    const auto& P = *m.positions;
    m.edge_exterior_angle.assign(m.edges.size(), 0.0);
    auto face_normal = [&](int f) {
      Vec3 a = P[size_t(m.faces[size_t(f)][0])];
      Vec3 b = P[size_t(m.faces[size_t(f)][1])];
      Vec3 c = P[size_t(m.faces[size_t(f)][2])];
      return normalized(cross(b - a, c - a));
    };
    for (size_t ei = 0; ei < m.edges.size(); ++ei) {
      const MeshEdge& e = m.edges[ei];
      if (e.boundary) continue;
      Vec3 n0 = face_normal(e.f0), n1 = face_normal(e.f1);
      double ang = std::acos(std::clamp(dot(n0, n1), -1.0, 1.0));
      // Sign: positive (convex hinge) when the opposite vertex of f1 lies
      // below the plane of f0.
      int c1 = -1;
      for (int j = 0; j < 3; ++j) {
        int v = m.faces[size_t(e.f1)][size_t(j)];
        if (v != e.va && v != e.vb) c1 = v;
      }
      Vec3 a = P[size_t(m.faces[size_t(e.f0)][0])];
      double side = dot(n0, P[size_t(c1)] - a);
      m.edge_exterior_angle[ei] = side <= 0 ? ang : -ang;
    }
    // Global convexity: every vertex on the inner side of every face plane.
    bool convex = true;
    for (size_t f = 0; f < nf && convex; ++f) {
      Vec3 n = face_normal(int(f));
      Vec3 a = P[size_t(m.faces[f][0])];
      double scale = std::max(1.0, m.max_edge);
      for (int v = 0; v < m.n_vertices; ++v) {
        if (dot(n, P[size_t(v)] - a) > 1e-9 * scale) {
          convex = false;
          break;
        }
      }
    }
    m.convex_embedded = convex;
  }

  return m;
}

bool in_face(const PolyhedralMesh& m, int face, Vec2 p, double eps) {
  const auto& ch = m.chart[size_t(face)];
  for (int k = 0; k < 3; ++k) {
    Vec2 a = ch[size_t(k)], b = ch[size_t((k + 1) % 3)];
    double d = cross(b - a, p - a) / m.len[size_t(face)][size_t(k)];
    if (d < -eps) return false;
  }
  return true;
}

int corner_index_near(const PolyhedralMesh& m, const MeshPoint& q, double eps) {
  for (int i = 0; i < 3; ++i) {
    if (dist(q.p, m.corner(q.face, i)) <= eps) return i;
  }
  return -1;
}

MeshPoint canonicalize(const PolyhedralMesh& m, MeshPoint q) {
  if (q.face < 0 || size_t(q.face) >= m.faces.size())
    throw ConfigError("point references invalid face");
  if (!in_face(m, q.face, q.p, kMemEps))
    throw ConfigError("point outside its face beyond tolerance");
  // Hop to lower-id faces while the point lies on a shared edge.
  for (int guard = 0; guard < 64; ++guard) {
    int best_nbr = q.face;
    int best_k = -1;
    for (int k = 0; k < 3; ++k) {
      Vec2 a = m.corner(q.face, k), b = m.corner(q.face, (k + 1) % 3);
      double elen = m.len[size_t(q.face)][size_t(k)];
      double d = std::abs(cross(b - a, q.p - a)) / elen;
      double along = dot(q.p - a, b - a) / elen;  // arclength along the edge
      if (d <= kMemEps && along >= -kMemEps && along <= elen + kMemEps) {
        int g = m.nbr[size_t(q.face)][size_t(k)];
        if (g != -1 && g < best_nbr) {
          best_nbr = g;
          best_k = k;
        }
      }
    }
    if (best_k == -1) break;
    q.p = m.trans[size_t(q.face)][size_t(best_k)].apply(q.p);
    q.face = best_nbr;
  }
  return q;
}

// --- builders ---------------------------------------------------------------

namespace {

PolyhedralMesh mesh_from_quads(std::vector<Vec3> pos,
                               const std::vector<std::array<int, 4>>& quads) {
  MeshSpec s;
  s.n_vertices = int(pos.size());
  s.positions = std::move(pos);
  for (const auto& q : quads) {
    s.faces.push_back({q[0], q[1], q[2]});
    s.faces.push_back({q[0], q[2], q[3]});
  }
  return build_mesh(s);
}

}  // namespace

PolyhedralMesh make_cube_mesh(double edge, int subdiv) {
  if (edge <= 0) throw ConfigError("cube edge must be positive");
  if (subdiv < 1 || subdiv > 64) throw ConfigError("cube subdiv must be in [1, 64]");
  int n = subdiv;
  // Integer lattice corners of the six sides, outward-oriented loops.
  using IV = std::array<int, 3>;
  const std::array<std::array<IV, 4>, 6> sides = {{
      {{{0, 0, 0}, {0, n, 0}, {n, n, 0}, {n, 0, 0}}},  // z=0, -z
      {{{0, 0, n}, {n, 0, n}, {n, n, n}, {0, n, n}}},  // z=e, +z
      {{{0, 0, 0}, {n, 0, 0}, {n, 0, n}, {0, 0, n}}},  // y=0, -y
      {{{0, n, 0}, {0, n, n}, {n, n, n}, {n, n, 0}}},  // y=e, +y
      {{{0, 0, 0}, {0, 0, n}, {0, n, n}, {0, n, 0}}},  // x=0, -x
      {{{n, 0, 0}, {n, n, 0}, {n, n, n}, {n, 0, n}}},  // x=e, +x
  }};
  std::map<IV, int> id;
  std::vector<Vec3> pos;
  auto vat = [&](IV k) {
    auto it = id.find(k);
    if (it != id.end()) return it->second;
    pos.push_back({edge * k[0] / n, edge * k[1] / n, edge * k[2] / n});
    id[k] = int(pos.size()) - 1;
    return int(pos.size()) - 1;
  };
  std::vector<std::array<int, 4>> quads;
  for (const auto& s : sides) {
    IV a = s[0];
    IV du{(s[1][0] - a[0]) / n, (s[1][1] - a[1]) / n, (s[1][2] - a[2]) / n};
    IV dv{(s[3][0] - a[0]) / n, (s[3][1] - a[1]) / n, (s[3][2] - a[2]) / n};
    auto at = [&](int u, int v) {
      return vat({a[0] + du[0] * u + dv[0] * v, a[1] + du[1] * u + dv[1] * v,
                  a[2] + du[2] * u + dv[2] * v});
    };
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u)
        quads.push_back({at(u, v), at(u + 1, v), at(u + 1, v + 1), at(u, v + 1)});
  }
  return mesh_from_quads(std::move(pos), quads);
}

PolyhedralMesh make_tetrahedron_mesh(double edge) {
  if (edge <= 0) throw ConfigError("tetrahedron edge must be positive");
  double e = edge;
  std::vector<Vec3> v = {
      {0, 0, 0},
      {e, 0, 0},
      {0.5 * e, std::sqrt(3.0) / 2 * e, 0},
      {0.5 * e, std::sqrt(3.0) / 6 * e, std::sqrt(2.0 / 3.0) * e}};
  MeshSpec s;
  s.n_vertices = 4;
  s.positions = v;
  s.faces = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}};
  return build_mesh(s);
}

PolyhedralMesh make_rect_grid_mesh(double w, double h, int nx, int ny) {
  if (w <= 0 || h <= 0 || nx < 1 || ny < 1)
    throw ConfigError("invalid grid parameters");
  MeshSpec s;
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Vec3> pos;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      pos.push_back({w * i / nx, h * j / ny, 0.0});
  s.n_vertices = int(pos.size());
  s.positions = std::move(pos);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      s.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      s.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return build_mesh(s);
}

PolyhedralMesh make_flat_torus_mesh(double a, double b, int n) {
  if (a <= 0 || b <= 0 || n < 3)
    throw ConfigError("torus mesh needs positive sides and n >= 3");
  MeshSpec s;
  s.n_vertices = n * n;
  auto vid = [&](int i, int j) { return (j % n) * n + (i % n); };
  double dx = a / n, dy = b / n, dg = std::hypot(dx, dy);
  std::vector<std::array<double, 3>> lens;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      s.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      lens.push_back({dx, dy, dg});
      s.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      lens.push_back({dg, dx, dy});
    }
  }
  s.lengths = std::move(lens);
  return build_mesh(s);
}

PolyhedralMesh make_icosphere_mesh(double R, int level) {
  if (R <= 0 || level < 0 || level > 6)
    throw ConfigError("icosphere: R > 0 and 0 <= level <= 6");
  double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0},
                         {1, -phi, 0}, {0, -1, phi},  {0, 1, phi},
                         {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1},
                         {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : v) p = normalized(p) * R;
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find({key.first, key.second});
      if (it != mid.end()) return it->second;
      Vec3 p = normalized(v[size_t(a)] + v[size_t(b)]) * R;
      v.push_back(p);
      int id = int(v.size()) - 1;
      mid[{key.first, key.second}] = id;
      return id;
    };
    std::vector<std::array<int, 3>> nf;
    nf.reserve(f.size() * 4);
    for (auto& t : f) {
      int a = midpoint(t[0], t[1]);
      int b = midpoint(t[1], t[2]);
      int c = midpoint(t[2], t[0]);
      nf.push_back({t[0], a, c});
      nf.push_back({t[1], b, a});
      nf.push_back({t[2], c, b});
      nf.push_back({a, b, c});
    }
    f = std::move(nf);
  }
  MeshSpec s;
  s.n_vertices = int(v.size());
  s.positions = std::move(v);
  s.faces = std::move(f);
  return build_mesh(s);
}

namespace {

// Ear-clipping triangulation of a simple polygon (input CCW).
std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& poly) {
  int n = int(poly.size());
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
  std::vector<std::array<int, 3>> tris;
  // Closed-triangle test: a vertex exactly on the candidate diagonal must
  // block the ear, or the clip would pinch the polygon through that vertex.
  auto inside_tri = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    double d0 = cross(b - a, p - a);
    double d1 = cross(c - b, p - b);
    double d2 = cross(a - c, p - c);
    return d0 >= 0 && d1 >= 0 && d2 >= 0;
  };
  int guard = 0;
  while (idx.size() > 3) {
    if (++guard > 4 * n * n)
      throw ConfigError("polygon triangulation failed (not simple?)");
    bool clipped = false;
    int mlen = int(idx.size());
    for (int i = 0; i < mlen; ++i) {
      int ia = idx[size_t((i + mlen - 1) % mlen)];
      int ib = idx[size_t(i)];
      int ic = idx[size_t((i + 1) % mlen)];
      Vec2 a = poly[size_t(ia)], b = poly[size_t(ib)], c = poly[size_t(ic)];
      if (cross(b - a, c - a) <= 0) continue;  // reflex corner
      bool ear = true;
      for (int j : idx) {
        if (j == ia || j == ib || j == ic) continue;
        if (inside_tri(a, b, c, poly[size_t(j)])) {
          ear = false;
          break;
        }
      }
      if (!ear) continue;
      tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw ConfigError("polygon triangulation failed");
  }
  tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

}  // namespace

PolyhedralMesh double_polygon(const std::vector<Vec2>& polygon_in) {
  if (polygon_in.size() < 3) throw ConfigError("polygon needs >= 3 vertices");
  std::vector<Vec2> poly = polygon_in;
  double A = polygon_area(poly);
  if (std::abs(A) < 1e-14) throw ConfigError("degenerate polygon");
  if (A < 0) std::reverse(poly.begin(), poly.end());
  auto tris = ear_clip(poly);
  int n = int(poly.size());
  int nt = int(tris.size());

  MeshSpec s;
  s.n_vertices = n;
  std::vector<std::array<double, 3>> lens;
  auto elen = [&](int a, int b) { return dist(poly[size_t(a)], poly[size_t(b)]); };
  // Copy A: faces 0..nt-1 as triangulated; copy B: mirror copies, reversed.
  for (auto& t : tris) {
    s.faces.push_back({t[0], t[1], t[2]});
    lens.push_back({elen(t[0], t[1]), elen(t[1], t[2]), elen(t[2], t[0])});
  }
  for (auto& t : tris) {
    s.faces.push_back({t[2], t[1], t[0]});
    lens.push_back({elen(t[2], t[1]), elen(t[1], t[0]), elen(t[0], t[2])});
  }
  s.lengths = std::move(lens);

  // Explicit gluing. Interior diagonals pair with their reversal inside the
  // same copy; polygon boundary edges pair with the mirror copy.
  auto half_map = [&](int f_begin, int f_end) {
    std::map<std::pair<int, int>, std::pair<int, int>> half;
    for (int f = f_begin; f < f_end; ++f) {
      for (int k = 0; k < 3; ++k) {
        int a = s.faces[size_t(f)][size_t(k)];
        int b = s.faces[size_t(f)][size_t((k + 1) % 3)];
        half[{a, b}] = {f, k};
      }
    }
    return half;
  };
  auto halfA = half_map(0, nt), halfB = half_map(nt, 2 * nt);
  for (const auto& [key, fk] : halfA) {
    auto rev = halfA.find({key.second, key.first});
    if (rev != halfA.end()) {
      if (key.first < key.second)  // glue each diagonal once
        s.glue.push_back({fk.first, fk.second, rev->second.first,
                          rev->second.second});
    } else {
      auto mirror = halfB.find({key.second, key.first});
      if (mirror == halfB.end())
        throw ConfigError("polygon doubling: unmatched half-edge");
      s.glue.push_back({fk.first, fk.second, mirror->second.first,
                        mirror->second.second});
    }
  }
  for (const auto& [key, fk] : halfB) {
    auto rev = halfB.find({key.second, key.first});
    if (rev != halfB.end() && key.first < key.second)
      s.glue.push_back({fk.first, fk.second, rev->second.first,
                        rev->second.second});
  }
  return build_mesh(s);
}

PolyhedralMesh make_doubled_square_mesh(double side, int n) {
  if (side <= 0) throw ConfigError("doubled square: side must be positive");
  if (n < 1 || n > 128) throw ConfigError("doubled square: n must be in [1, 128]");
  if (n == 1)
    return double_polygon({{0, 0}, {side, 0}, {side, side}, {0, side}});

  // Sheet 2 duplicates interior lattice vertices only; boundary vertices are
  // shared, so the two sheets glue along the square boundary by pair
  // matching. Cell diagonals are chosen to touch an interior vertex, keeping
  // every vertex pair on exactly two faces.
  double h = side / n;
  auto interior = [&](int i, int j) { return i > 0 && i < n && j > 0 && j < n; };
  int n1 = (n + 1) * (n + 1);
  std::vector<int> sheet2(size_t(n1), -1);
  int next = n1;
  auto v1 = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      sheet2[size_t(v1(i, j))] = interior(i, j) ? next++ : v1(i, j);

  MeshSpec s;
  s.n_vertices = next;
  std::vector<std::array<double, 3>> lens;
  auto coord = [&](int v) { return Vec2{h * (v % (n + 1)), h * (v / (n + 1))}; };
  auto add = [&](int a, int b, int c, bool mirror) {
    double lab = dist(coord(a), coord(b)), lbc = dist(coord(b), coord(c)),
           lca = dist(coord(c), coord(a));
    if (mirror) {
      s.faces.push_back({sheet2[size_t(a)], sheet2[size_t(c)], sheet2[size_t(b)]});
      lens.push_back({lca, lbc, lab});
    } else {
      s.faces.push_back({a, b, c});
      lens.push_back({lab, lbc, lca});
    }
  };
  for (int sheet = 0; sheet < 2; ++sheet) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        bool main_diag = interior(i, j) || interior(i + 1, j + 1);
        int a = v1(i, j), b = v1(i + 1, j), c = v1(i + 1, j + 1), d = v1(i, j + 1);
        if (main_diag) {
          add(a, b, c, sheet == 1);
          add(a, c, d, sheet == 1);
        } else {
          add(a, b, d, sheet == 1);
          add(b, c, d, sheet == 1);
        }
      }
    }
  }
  s.lengths = std::move(lens);
  return build_mesh(s);
}

}  // namespace devlab
