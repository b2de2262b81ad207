#include "devlab/geodesics.hpp"

#include <algorithm>
#include <cmath>

#include "devlab/unfold.hpp"

namespace devlab {
namespace {

double wrap_mod(double x, double m) {
  double r = std::fmod(x, m);
  return r < 0 ? r + m : r;
}

// Lexicographic order on canonical points: the sweep always runs from the
// smaller endpoint, making distance(x,y) == distance(y,x) bit-for-bit.
bool point_less(const SurfacePoint& a, const SurfacePoint& b) {
  if (a.face != b.face) return a.face < b.face;
  if (a.p.x != b.p.x) return a.p.x < b.p.x;
  return a.p.y < b.p.y;
}

DistanceAnswer polyhedral_distance(const PolyhedralMesh& m, SurfacePoint x,
                                   SurfacePoint y, double r_max,
                                   uint64_t max_states) {
  if (point_less(y, x)) std::swap(x, y);

  auto leg = [&](const SweepSource& from, MeshPoint to,
                 double cap) -> SweepResult {
    SweepOptions opt;
    opt.radius = cap;
    opt.target = to;
    opt.max_states = max_states;
    return sweep(m, from, opt);
  };

  DistanceAnswer out;
  SweepResult direct =
      leg(SweepSource::at({x.face, x.p}), MeshPoint{y.face, y.p}, r_max);
  out.states = direct.states;
  double best = direct.target_dist;
  std::vector<int> best_faces = std::move(direct.target_faces);
  std::vector<int> best_relays;

  if (m.has_spike_vertex) {
    // Shortest paths may relay through cone points of angle > 2*pi: run a
    // shortest-path search over {x} ∪ spikes ∪ {y} with vertex-free legs.
    std::vector<int> spikes;
    for (int v = 0; v < m.n_vertices; ++v)
      if (!m.vertex_boundary[v] && m.cone_angle[v] > 2 * kPi + 1e-12)
        spikes.push_back(v);
    const int S = int(spikes.size());
    const int N = S + 2;  // node 0 = x, 1..S = spikes, S+1 = y
    std::vector<std::vector<double>> w(N, std::vector<double>(N, kInf));
    std::vector<std::vector<std::vector<int>>> legs(
        N, std::vector<std::vector<int>>(N));
    auto corner_point = [&](int v) {
      auto corners = m.vertex_corners[v];
      auto c = *std::min_element(corners.begin(), corners.end());
      return MeshPoint{c.first, m.chart[c.first][c.second]};
    };
    auto set_edge = [&](int i, int j, SweepResult res) {
      // res was traced from node i toward node j
      out.states += res.states;
      w[i][j] = w[j][i] = res.target_dist;
      legs[j][i].assign(res.target_faces.rbegin(), res.target_faces.rend());
      legs[i][j] = std::move(res.target_faces);
    };
    for (int i = 0; i < S; ++i) {
      set_edge(i + 1, 0,
               leg(SweepSource::at_vertex(spikes[i]), MeshPoint{x.face, x.p},
                   std::min(r_max, best)));
      set_edge(i + 1, S + 1,
               leg(SweepSource::at_vertex(spikes[i]), MeshPoint{y.face, y.p},
                   std::min(r_max, best)));
      for (int j = i + 1; j < S; ++j)
        set_edge(i + 1, j + 1,
                 leg(SweepSource::at_vertex(spikes[i]),
                     corner_point(spikes[j]), std::min(r_max, best)));
    }
    w[0][S + 1] = w[S + 1][0] = best;

    // Dijkstra over the small complete graph.
    std::vector<double> d(N, kInf);
    std::vector<int> prev(N, -1);
    std::vector<bool> fixed(N, false);
    d[0] = 0;
    for (int it = 0; it < N; ++it) {
      int u = -1;
      for (int k = 0; k < N; ++k)
        if (!fixed[k] && (u < 0 || d[k] < d[u])) u = k;
      if (u < 0 || d[u] == kInf) break;
      fixed[u] = true;
      for (int k = 0; k < N; ++k) {
        if (fixed[k] || w[u][k] == kInf) continue;
        double nd = d[u] + w[u][k];
        if (nd < d[k]) {
          d[k] = nd;
          prev[k] = u;
        }
      }
    }
    if (d[S + 1] < best) {
      best = d[S + 1];
      std::vector<int> chain;
      for (int v = S + 1; v >= 0; v = prev[v]) {
        chain.push_back(v);
        if (prev[v] < 0) break;
      }
      std::reverse(chain.begin(), chain.end());
      best_faces.clear();
      best_relays.clear();
      for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto& seg = legs[chain[i]][chain[i + 1]];
        best_faces.insert(best_faces.end(), seg.begin(), seg.end());
        if (i + 2 < chain.size()) best_relays.push_back(spikes[chain[i + 1] - 1]);
      }
    }
  }

  if (best <= r_max) {
    out.value = best;
    out.face_sequence = std::move(best_faces);
    out.relay_vertices = std::move(best_relays);
  }
  return out;
}

// --- analytic flows ---------------------------------------------------------

FlowResult finish(TangentVector end, double t) {
  FlowResult out;
  out.status = FlowStatus::completed;
  out.end = end;
  out.last = end;
  out.time_elapsed = t;
  return out;
}

FlowResult flow_plane(const Surface& s, const TangentVector& v, double t) {
  if (s.backend == Backend::half_plane && v.dir.y < 0) {
    double hit = -v.base.p.y / v.dir.y;
    if (hit <= t) {
      FlowResult out;
      out.status = FlowStatus::boundary_hit;
      out.last = {{-1, {v.base.p.x + hit * v.dir.x, 0.0}}, v.dir};
      out.time_elapsed = hit;
      return out;
    }
  }
  return finish({{-1, v.base.p + v.dir * t}, v.dir}, t);
}

FlowResult flow_torus(const Surface& s, const TangentVector& v, double t) {
  Vec2 p = v.base.p + v.dir * t;
  return finish({{-1, {wrap_mod(p.x, s.a), wrap_mod(p.y, s.b)}}, v.dir}, t);
}

FlowResult flow_sphere(const Surface& s, const TangentVector& v, double t) {
  double speed = norm(v.dir);
  double th = v.base.p.x, ph = v.base.p.y;
  double st = std::sin(th), ct = std::cos(th);
  Vec3 P{st * std::cos(ph), st * std::sin(ph), ct};
  Vec3 e_th{ct * std::cos(ph), ct * std::sin(ph), -st};
  Vec3 e_ph{-std::sin(ph), std::cos(ph), 0};
  Vec3 T = normalized(e_th * v.dir.x + e_ph * v.dir.y);
  double ang = t * speed / s.R;
  Vec3 P2 = P * std::cos(ang) + T * std::sin(ang);
  Vec3 T2 = P * -std::sin(ang) + T * std::cos(ang);
  double th2 = std::acos(std::clamp(P2.z, -1.0, 1.0));
  double ph2 = std::atan2(P2.y, P2.x);
  double st2 = std::sin(th2), ct2 = std::cos(th2);
  Vec3 e_th2{ct2 * std::cos(ph2), ct2 * std::sin(ph2), -st2};
  Vec3 e_ph2{-std::sin(ph2), std::cos(ph2), 0};
  Vec2 dir2{speed * dot(T2, e_th2), speed * dot(T2, e_ph2)};
  return finish({{-1, {th2, wrap_mod(ph2, 2 * kPi)}}, dir2}, t);
}

FlowResult flow_cone(const Surface& s, const TangentVector& v, double t) {
  double speed = norm(v.dir);
  double u = v.base.p.x;
  if (u <= 0) {
    FlowResult out;
    out.status = FlowStatus::vertex_hit;
    out.last = v;
    out.time_elapsed = 0;
    return out;
  }
  // Develop: start at (u, 0), radial frame = axes. The geodesic is straight;
  // its angular swing is < pi, wrapped mod rho at the end.
  Vec2 P{u, 0};
  Vec2 w = normalized(v.dir);
  double L = t * speed;
  Vec2 Q = P + w * L;
  double apex_d = point_segment_dist({0, 0}, P, Q);
  if (apex_d <= 1e-12 * std::max(u, norm(Q))) {
    double tt = std::clamp(dot(Vec2{0, 0} - P, Q - P) / norm2(Q - P), 0.0, 1.0);
    FlowResult out;
    out.status = FlowStatus::vertex_hit;
    Vec2 hitp = P + (Q - P) * tt;
    out.last = {{-1, {norm(hitp), v.base.p.y}}, v.dir};
    out.time_elapsed = tt * t;
    return out;
  }
  double dphi = std::atan2(cross(P, Q), dot(P, Q));
  double u2 = norm(Q);
  Vec2 e_u = Q * (1.0 / u2);
  Vec2 e_psi = perp(e_u);
  Vec2 dir2{speed * dot(w, e_u), speed * dot(w, e_psi)};
  return finish(
      {{-1, {u2, wrap_mod(v.base.p.y + dphi, s.rho)}}, dir2}, t);
}

FlowResult flow_polyhedral(const Surface& s, const TangentVector& v, double t,
                           bool record_events, uint64_t max_events) {
  const auto& m = s.require_mesh();
  double speed = norm(v.dir);
  int face = v.base.face;
  if (face < 0 || face >= int(m.faces.size()))
    throw ConfigError("flow base face out of range");
  if (!in_face(m, face, v.base.p, 1e-7 * std::max(1.0, m.max_edge)))
    throw ConfigError("flow base point not on its face");

  Vec2 p = v.base.p;
  Vec2 w = v.dir * (1.0 / speed);
  int entry = -1;
  double remaining = speed * t;  // arclength
  double done = 0;
  FlowResult out;

  while (true) {
    // Earliest forward crossing among this face's edges (entry excluded).
    double best_s = kInf, best_tau = 0;
    int best_k = -1;
    for (int k = 0; k < 3; ++k) {
      if (k == entry) continue;
      Vec2 A = m.chart[face][k], B = m.chart[face][(k + 1) % 3];
      Vec2 e = B - A;
      // Interior lies left of A->B, so cross(w, e) > 0 means w points
      // outward through this edge; inward/parallel edges never host exits.
      double denom = cross(w, e);
      double elen = norm(e);
      if (denom <= 1e-15 * elen) continue;
      double sc = cross(A - p, e) / denom;
      double tau = cross(w, p - A) / denom;
      if (sc < -1e-12 * elen || tau < -1e-9 || tau > 1 + 1e-9) continue;
      if (sc < best_s) {
        best_s = sc;
        best_k = k;
        best_tau = tau;
      }
    }

    if (best_k < 0 || std::max(best_s, 0.0) >= remaining) {
      if (best_k < 0 && !in_face(m, face, p + w * remaining,
                                 1e-7 * std::max(1.0, m.max_edge))) {
        // Numeric corner: no usable exit, endpoint escapes the face.
        out.status = FlowStatus::vertex_hit;
        out.last = {{face, p}, w * speed};
        out.time_elapsed = done / speed;
        return out;
      }
      Vec2 q = p + w * remaining;
      out.status = FlowStatus::completed;
      out.end = TangentVector{{face, q}, w * speed};
      out.last = *out.end;
      out.time_elapsed = t;
      return out;
    }

    double sc = std::max(best_s, 0.0);
    Vec2 A = m.chart[face][best_k], B = m.chart[face][(best_k + 1) % 3];
    double elen = dist(A, B);
    Vec2 q = p + w * sc;
    done += sc;
    remaining -= sc;

    if (dist(q, A) <= 1e-10 * elen || dist(q, B) <= 1e-10 * elen) {
      out.status = FlowStatus::vertex_hit;
      out.last = {{face, q}, w * speed};
      out.time_elapsed = done / speed;
      return out;
    }
    if (m.nbr[face][best_k] < 0) {
      out.status = FlowStatus::boundary_hit;
      out.last = {{face, q}, w * speed};
      out.time_elapsed = done / speed;
      return out;
    }
    if (out.n_events >= max_events) {
      out.status = FlowStatus::budget_exceeded;
      out.last = {{face, q}, w * speed};
      out.time_elapsed = done / speed;
      return out;
    }

    const Xform& x = m.trans[face][best_k];
    int edge = m.edge_id[face][best_k];
    double param = std::clamp(best_tau, 0.0, 1.0);
    if (m.faces[face][best_k] != m.edges[edge].va) param = 1.0 - param;
    p = x.apply(q);
    w = normalized(x.linear(w));
    entry = m.nbr_edge[face][best_k];
    face = m.nbr[face][best_k];
    ++out.n_events;
    if (record_events)
      out.events.push_back({int(out.n_events) - 1, done / speed, edge, param,
                            face, p, w * speed});
  }
}

}  // namespace

const char* flow_status_name(FlowStatus st) {
  switch (st) {
    case FlowStatus::completed: return "completed";
    case FlowStatus::vertex_hit: return "vertex_hit";
    case FlowStatus::boundary_hit: return "boundary_hit";
    case FlowStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

DistanceAnswer distance(const Surface& s, SurfacePoint x, SurfacePoint y,
                        double r_max, uint64_t max_states) {
  if (!(r_max > 0)) throw ConfigError("r_max must be positive");
  x = canonical_point(s, x);
  y = canonical_point(s, y);
  if (s.backend != Backend::polyhedral) {
    double d = analytic_distance(s, x, y);
    DistanceAnswer out;
    if (d <= r_max) out.value = d;
    return out;
  }
  return polyhedral_distance(s.require_mesh(), x, y, r_max, max_states);
}

FlowResult geodesic_flow(const Surface& s, const TangentVector& v, double t,
                         bool record_events, uint64_t max_events) {
  double speed = norm(v.dir);
  if (t == 0 || speed == 0) {
    FlowResult out = finish(v, t);
    return out;
  }
  if (t < 0) {
    FlowResult fwd =
        geodesic_flow(s, negate(v), -t, record_events, max_events);
    FlowResult out = fwd;
    if (fwd.end) out.end = negate(*fwd.end);
    out.last = negate(fwd.last);
    out.time_elapsed = -fwd.time_elapsed;
    return out;
  }
  switch (s.backend) {
    case Backend::plane:
    case Backend::half_plane:
      return flow_plane(s, v, t);
    case Backend::flat_torus:
      return flow_torus(s, v, t);
    case Backend::sphere:
      return flow_sphere(s, v, t);
    case Backend::cone:
      return flow_cone(s, v, t);
    case Backend::polyhedral:
      return flow_polyhedral(s, v, t, record_events, max_events);
  }
  throw ConfigError("bad backend");
}

FlowResult exp_map(const Surface& s, const TangentVector& v,
                   uint64_t max_events) {
  return geodesic_flow(s, v, 1.0, false, max_events);
}

}  // namespace devlab
