#include "devlab/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace devlab {
namespace {

// === Sweep states ===

struct State {
  int face = -1;
  Vec2 src{};
  Wedge wedge{};
  int entry = -1;  // local edge crossed to enter, -1 for seeds
  double lb = 0;   // min geodesic length into this window
  int parent = -1;
  int depth = 0;
};

struct QEntry {
  double lb;
  int id;
  bool operator>(const QEntry& o) const {
    return lb > o.lb || (lb == o.lb && id > o.id);
  }
};

// Clip the gate A + t*(B-A), t in [0,1], to the wedge; both wedge
// constraints are linear in t. Degenerate (near point) gates are kept: they
// transport single grazing rays, e.g. geodesics through flat vertices.
bool clip_gate(const Vec2& s, const Wedge& w, const Vec2& A, const Vec2& B,
               double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  if (!w.full) {
    const Vec2 u = B - A;
    const double scale = dist(A, B) + dist(A, s);
    auto apply = [&](double f0, double f1) {
      if (f1 == 0.0) return f0 >= -1e-14 * scale;
      const double t = -f0 / f1;
      if (f1 > 0)
        t0 = std::max(t0, t);
      else
        t1 = std::min(t1, t);
      return true;
    };
    // cross(dl, q(t)-s) >= 0
    if (!apply(cross(w.dl, A - s), cross(w.dl, u))) return false;
    // cross(q(t)-s, dr) >= 0
    if (!apply(cross(A - s, w.dr), cross(u, w.dr))) return false;
  }
  t0 = std::max(0.0, t0 - 1e-12);
  t1 = std::min(1.0, t1 + 1e-12);
  if (t1 - t0 < -1e-12) return false;
  t1 = std::max(t1, t0);
  return true;
}

std::vector<Vec2> wedge_clip_triangle(const PolyhedralMesh& m, int face,
                                      const Vec2& src, const Wedge& w) {
  std::vector<Vec2> poly(m.chart[face].begin(), m.chart[face].end());
  if (!w.full) {
    poly = clip_halfplane(poly, src, perp(w.dl));
    poly = clip_halfplane(poly, src, perp(w.dr) * -1.0);
  }
  return poly;
}

struct TargetRep {
  int face;
  Vec2 p;
};

class Sweeper {
 public:
  Sweeper(const PolyhedralMesh& m, const SweepOptions& opt) : m_(m), opt_(opt) {
    if (opt_.collect_vertex_dists)
      res_.vertex_dist.assign(m_.n_vertices, kInf);
    if (opt_.target) {
      MeshPoint t = canonicalize(m_, *opt_.target);
      // All chart representatives of the target: its canonical face plus
      // every face whose closure contains it (edge or vertex incidences).
      int tci = corner_index_near(m_, t, kMemEps);
      if (tci >= 0) {
        int v = m_.faces[t.face][tci];
        for (auto [f, ci] : m_.vertex_corners[v])
          reps_.push_back({f, m_.chart[f][ci]});
      } else {
        reps_.push_back({t.face, t.p});
        for (int k = 0; k < 3; ++k) {
          if (m_.nbr[t.face][k] < 0) continue;
          Vec2 a = m_.chart[t.face][k], b = m_.chart[t.face][(k + 1) % 3];
          double len = dist(a, b);
          double d = std::abs(cross(b - a, t.p - a)) / len;
          if (d <= kMemEps * std::max(1.0, len))
            reps_.push_back(
                {m_.nbr[t.face][k], m_.trans[t.face][k].apply(t.p)});
        }
      }
    }
  }

  SweepResult run(const SweepSource& src) {
    seed(src);
    while (!heap_.empty()) {
      auto [lb, id] = heap_.top();
      heap_.pop();
      if (lb > limit() + 1e-12) break;
      expand(id);
    }
    res_.states = log_.size();
    if (best_id_ >= 0) {
      for (int id = best_id_; id >= 0; id = log_[id].parent)
        res_.target_faces.push_back(log_[id].face);
      std::reverse(res_.target_faces.begin(), res_.target_faces.end());
    }
    return std::move(res_);
  }

 private:
  double limit() const {
    // With only a target to answer, the best candidate so far tightens the
    // propagation bound; any collection pass must cover the full radius.
    bool collecting = opt_.collect_pieces || opt_.collect_vertex_dists ||
                      opt_.collect_edge_intervals || opt_.collect_boundary_dist;
    if (!collecting && opt_.target)
      return std::min(opt_.radius, res_.target_dist);
    return opt_.radius;
  }

  void seed(const SweepSource& src) {
    if (src.is_vertex) {
      if (src.vertex < 0 || src.vertex >= m_.n_vertices)
        throw ConfigError("sweep: vertex id out of range");
      seed_vertex(src.vertex);
      return;
    }
    MeshPoint q = canonicalize(m_, src.point);
    int ci = corner_index_near(m_, q, kMemEps);
    if (ci >= 0) {
      seed_vertex(m_.faces[q.face][ci]);
      return;
    }
    create(q.face, q.p, Wedge{}, -1, -1, 0);
    // A source on an edge also emits straight into the neighboring face;
    // gate cones across the source edge itself are degenerate.
    for (int k = 0; k < 3; ++k) {
      if (m_.nbr[q.face][k] < 0) continue;
      Vec2 a = m_.chart[q.face][k], b = m_.chart[q.face][(k + 1) % 3];
      double len = dist(a, b);
      double d = std::abs(cross(b - a, q.p - a)) / len;
      if (d <= kMemEps * std::max(1.0, len))
        create(m_.nbr[q.face][k], m_.trans[q.face][k].apply(q.p), Wedge{}, -1,
               -1, 0);
    }
  }

  void seed_vertex(int v) {
    for (auto [f, ci] : m_.vertex_corners[v]) {
      Vec2 c = m_.chart[f][ci];
      Vec2 dl = normalized(m_.chart[f][(ci + 1) % 3] - c);
      Vec2 dr = normalized(m_.chart[f][(ci + 2) % 3] - c);
      create(f, c, Wedge{false, dl, dr}, -1, -1, 0);
    }
  }

  // Registers a window; candidate answers are harvested at creation time,
  // expansion happens when it is popped.
  void create(int face, Vec2 src, Wedge w, int entry, int parent, int depth) {
    if (log_.size() >= opt_.max_states)
      throw BudgetError("geodesic sweep exceeded its state budget (" +
                        std::to_string(opt_.max_states) + " windows)");
    State st{face, src, w, entry, 0.0, parent, depth};
    st.lb = window_lb(st);
    const int id = static_cast<int>(log_.size());

    harvest(st, id);
    log_.push_back(st);
    if (st.lb <= limit() + 1e-12) heap_.push({st.lb, id});
  }

  double window_lb(const State& st) const {
    if (st.entry < 0) return 0.0;
    Vec2 a = m_.chart[st.face][st.entry];
    Vec2 b = m_.chart[st.face][(st.entry + 1) % 3];
    double t0, t1;
    if (!clip_gate(st.src, st.wedge, a, b, t0, t1)) return kInf;
    return point_segment_dist(st.src, a + (b - a) * t0, a + (b - a) * t1);
  }

  void harvest(const State& st, int id) {
    const double ceps = 1e-9;
    if (opt_.target) {
      for (const auto& rep : reps_) {
        if (rep.face != st.face) continue;
        Vec2 d = rep.p - st.src;
        if (!st.wedge.contains(d, ceps * (norm(d) + 1.0))) continue;
        double cand = norm(d);
        if (cand < res_.target_dist && cand <= opt_.radius) {
          res_.target_dist = cand;
          best_id_ = id;
        }
      }
    }
    if (opt_.collect_vertex_dists) {
      for (int j = 0; j < 3; ++j) {
        Vec2 c = m_.chart[st.face][j];
        Vec2 d = c - st.src;
        if (!st.wedge.contains(d, ceps * (norm(d) + 1.0))) continue;
        double cand = norm(d);
        if (cand <= opt_.radius) {
          double& slot = res_.vertex_dist[m_.faces[st.face][j]];
          slot = std::min(slot, cand);
        }
      }
    }
    if (opt_.collect_edge_intervals) harvest_intervals(st);
    if (opt_.collect_boundary_dist) {
      for (int j = 0; j < 3; ++j) {
        if (m_.nbr[st.face][j] >= 0) continue;
        Vec2 a = m_.chart[st.face][j], b = m_.chart[st.face][(j + 1) % 3];
        double t0, t1;
        if (!clip_gate(st.src, st.wedge, a, b, t0, t1)) continue;
        double cand =
            point_segment_dist(st.src, a + (b - a) * t0, a + (b - a) * t1);
        res_.boundary_dist = std::min(res_.boundary_dist, cand);
      }
    }
    if (opt_.collect_pieces && st.lb < opt_.radius) {
      WindowPiece piece{st.face, st.src, st.wedge,
                       wedge_clip_triangle(m_, st.face, st.src, st.wedge), 0.0,
                       st.depth};
      if (piece.poly.size() >= 3) {
        piece.area = polygon_area(piece.poly);
        if (piece.area > 0) res_.pieces.push_back(std::move(piece));
      }
    }
  }

  // Portions of the face's edges lying in this window within the sweep
  // radius, in arclength along the canonical va -> vb orientation.
  void harvest_intervals(const State& st) {
    const double R = opt_.radius;
    if (!std::isfinite(R)) return;
    for (int j = 0; j < 3; ++j) {
      Vec2 a = m_.chart[st.face][j], b = m_.chart[st.face][(j + 1) % 3];
      double t0, t1;
      if (!clip_gate(st.src, st.wedge, a, b, t0, t1)) continue;
      // |a - src + t (b - a)|^2 < R^2, quadratic in t.
      Vec2 u = b - a, w = a - st.src;
      double a2 = norm2(u), a1 = 2.0 * dot(w, u), a0 = norm2(w) - R * R;
      double disc = a1 * a1 - 4.0 * a2 * a0;
      if (disc <= 0 || a2 == 0) continue;
      double sq = std::sqrt(disc);
      double q0 = (-a1 - sq) / (2.0 * a2), q1 = (-a1 + sq) / (2.0 * a2);
      double lo = std::max(t0, q0), hi = std::min(t1, q1);
      if (hi - lo <= 1e-15) continue;
      int e = m_.edge_id[st.face][j];
      double len = m_.edges[e].len;
      if (m_.faces[st.face][j] == m_.edges[e].va)
        res_.edge_intervals.push_back({e, lo * len, hi * len});
      else
        res_.edge_intervals.push_back({e, (1.0 - hi) * len, (1.0 - lo) * len});
    }
  }

  void expand(int id) {
    const State st = log_[id];  // by value: log_ may reallocate
    for (int k = 0; k < 3; ++k) {
      if (k == st.entry) continue;
      int g = m_.nbr[st.face][k];
      if (g < 0) continue;
      Vec2 a = m_.chart[st.face][k], b = m_.chart[st.face][(k + 1) % 3];
      // Forward crossing requires the source strictly on the inner side.
      double len = dist(a, b);
      if (cross(b - a, st.src - a) <= 1e-14 * len) continue;
      double t0, t1;
      if (!clip_gate(st.src, st.wedge, a, b, t0, t1)) continue;
      Vec2 A = a + (b - a) * t0, B = a + (b - a) * t1;
      if (point_segment_dist(st.src, A, B) > limit() + 1e-12) continue;
      Wedge w{false, normalized(A - st.src), normalized(B - st.src)};
      const Xform& x = m_.trans[st.face][k];
      Vec2 src2 = x.apply(st.src);
      Vec2 dl = x.linear(w.dl), dr = x.linear(w.dr);
      if (x.m00 * x.m11 - x.m01 * x.m10 < 0) std::swap(dl, dr);
      create(g, src2, Wedge{false, dl, dr}, m_.nbr_edge[st.face][k], id,
             st.depth + 1);
    }
  }

  const PolyhedralMesh& m_;
  const SweepOptions& opt_;
  SweepResult res_;
  std::vector<TargetRep> reps_;
  std::vector<State> log_;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> heap_;
  int best_id_ = -1;
};

}  // namespace

SweepResult sweep(const PolyhedralMesh& m, const SweepSource& src,
                  const SweepOptions& opt) {
  return Sweeper(m, opt).run(src);
}

// === Ball area ===

BallArea mesh_ball_area(const PolyhedralMesh& m, const SweepSource& center,
                        double r, uint64_t mc_samples, uint64_t seed,
                        uint64_t max_states) {
  if (m.has_spike_vertex)
    throw UnsupportedError(
        "ball area estimator requires interior cone angles <= 2*pi");
  if (!(r > 0)) throw ConfigError("ball radius must be positive");

  SweepOptions opt;
  opt.radius = r;
  opt.collect_pieces = true;
  opt.max_states = max_states;
  SweepResult sw = sweep(m, center, opt);

  BallArea out;
  out.n_pieces = sw.pieces.size();
  out.states = sw.states;
  for (const auto& p : sw.pieces)
    out.exact_sum += polygon_disk_area(p.poly, p.src, r);

  // Overlap correction ∫ (F-1)_+ over multiply covered points. Proposal:
  // pieces clipped to their disk bounding boxes, density mult(y) / A_tot.
  std::vector<std::vector<Vec2>> clipped(sw.pieces.size());
  std::vector<double> carea(sw.pieces.size(), 0.0);
  std::unordered_map<int, std::vector<int>> by_face;
  double a_tot = 0;
  bool any_overlap_possible = false;
  for (size_t i = 0; i < sw.pieces.size(); ++i) {
    const auto& p = sw.pieces[i];
    auto poly = clip_halfplane(p.poly, p.src - Vec2{r, 0}, Vec2{1, 0});
    poly = clip_halfplane(poly, p.src + Vec2{r, 0}, Vec2{-1, 0});
    poly = clip_halfplane(poly, p.src - Vec2{0, r}, Vec2{0, 1});
    poly = clip_halfplane(poly, p.src + Vec2{0, r}, Vec2{0, -1});
    clipped[i] = std::move(poly);
    if (clipped[i].size() >= 3) carea[i] = polygon_area(clipped[i]);
    a_tot += carea[i];
    auto& grp = by_face[p.face];
    grp.push_back(static_cast<int>(i));
    if (grp.size() >= 2) any_overlap_possible = true;
  }

  if (!any_overlap_possible || a_tot <= 0 || mc_samples == 0) {
    out.value = out.exact_sum;
    return out;
  }

  std::vector<double> prefix(carea.size());
  double acc = 0;
  for (size_t i = 0; i < carea.size(); ++i) {
    acc += carea[i];
    prefix[i] = acc;
  }

  const double eps_in = 1e-12 * (r + 1.0);
  RunningStat stat;
  for (uint64_t i = 0; i < mc_samples; ++i) {
    Rng rng = Rng::substream(seed, i);
    double u = rng.next_double() * a_tot;
    size_t j = std::lower_bound(prefix.begin(), prefix.end(), u) -
               prefix.begin();
    if (j >= carea.size()) j = carea.size() - 1;
    while (carea[j] <= 0 && j > 0) --j;
    Vec2 y = sample_polygon(clipped[j], carea[j], rng);
    int mult = 0, f_count = 0;
    for (int k : by_face[sw.pieces[j].face]) {
      if (carea[k] <= 0) continue;
      if (!point_in_convex_polygon(y, clipped[k], eps_in)) continue;
      ++mult;
      if (dist(y, sw.pieces[k].src) < r) ++f_count;
    }
    double val = 0;
    if (mult > 0 && f_count > 1)
      val = static_cast<double>(f_count - 1) * a_tot / mult;
    stat.add(val);
  }
  out.overlap = stat.mean;
  out.std_error = stat.std_error_of_mean();
  out.value = out.exact_sum - out.overlap;
  return out;
}

std::vector<std::pair<int, double>> merge_edge_intervals(
    std::vector<EdgeInterval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const EdgeInterval& a, const EdgeInterval& b) {
              return a.edge != b.edge ? a.edge < b.edge : a.lo < b.lo;
            });
  std::vector<std::pair<int, double>> out;
  size_t i = 0;
  while (i < intervals.size()) {
    int e = intervals[i].edge;
    double total = 0, lo = intervals[i].lo, hi = intervals[i].hi;
    ++i;
    while (i < intervals.size() && intervals[i].edge == e) {
      if (intervals[i].lo > hi) {
        total += hi - lo;
        lo = intervals[i].lo;
        hi = intervals[i].hi;
      } else {
        hi = std::max(hi, intervals[i].hi);
      }
      ++i;
    }
    total += hi - lo;
    out.emplace_back(e, total);
  }
  return out;
}

}  // namespace devlab
