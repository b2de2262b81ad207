#pragma once

// Triangle meshes with intrinsic edge lengths. Each face carries a planar
// chart (CCW layout from its edge lengths); each interior edge carries the
// rigid chart-to-chart transition used by unfolding and flow.

#include <optional>
#include <vector>

#include "devlab/common.hpp"

namespace devlab {

// Absolute tolerance for point-in-face membership (coordinates desk scale).
inline constexpr double kMemEps = 1e-9;

// Rigid (possibly reflecting) plane isometry p -> linear(p) + t.
struct Xform {
  double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  Vec2 t{};
  Vec2 linear(Vec2 p) const {
    return {m00 * p.x + m01 * p.y, m10 * p.x + m11 * p.y};
  }
  Vec2 apply(Vec2 p) const { return linear(p) + t; }
  Xform then(const Xform& o) const;  // apply *this, then o
  Xform inverse() const;
};

struct MeshEdge {
  int va = -1, vb = -1;  // canonical direction: va < vb
  int f0 = -1, k0 = -1;  // lower face id side
  int f1 = -1, k1 = -1;  // other side, -1 if boundary
  double len = 0;
  bool boundary = false;
};

// Explicit gluing record: local edge k0 of face f0 is identified with local
// edge k1 of face f1. Needed where a vertex pair does not determine the edge
// (e.g. both copies of a doubled polygon share the same diagonal pair).
struct GlueSpec {
  int f0, k0, f1, k1;
};

struct MeshSpec {
  int n_vertices = 0;
  std::vector<std::array<int, 3>> faces;
  // Either positions (lengths derived) or explicit per-face edge lengths.
  std::optional<std::vector<Vec3>> positions;
  std::optional<std::vector<std::array<double, 3>>> lengths;
  // Optional explicit adjacency; edges not covered are matched by vertex pair.
  std::vector<GlueSpec> glue;
};

struct PolyhedralMesh {
  int n_vertices = 0;
  std::vector<std::array<int, 3>> faces;     // vertex ids, chart layout CCW
  std::vector<std::array<double, 3>> len;    // edge k joins corners k, k+1
  std::vector<std::array<Vec2, 3>> chart;    // per-face 2D corner positions
  std::vector<std::array<int, 3>> nbr;       // face across edge k, -1 boundary
  std::vector<std::array<int, 3>> nbr_edge;  // local edge id on the neighbor
  std::vector<std::array<Xform, 3>> trans;   // chart(f) -> chart(nbr) across k
  std::vector<std::array<int, 3>> edge_id;   // global edge id per (face, k)
  std::vector<MeshEdge> edges;
  std::vector<double> face_area;
  std::vector<double> cone_angle;     // total corner angle per vertex
  std::vector<bool> vertex_boundary;  // vertex lies on a boundary edge
  std::vector<std::vector<std::pair<int, int>>> vertex_corners;  // (face, ci)
  std::optional<std::vector<Vec3>> positions;
  std::vector<double> edge_exterior_angle;  // per edge, if positions present
  bool convex_embedded = false;  // positions present, all dihedrals convex
  bool has_spike_vertex = false;  // some interior cone angle > 2*pi
  bool has_boundary = false;
  double total_area = 0;
  double min_edge = 0, max_edge = 0;

  Vec2 corner(int f, int i) const { return chart[size_t(f)][size_t(i)]; }
  int vertex_at(int f, int i) const { return faces[size_t(f)][size_t(i)]; }
  // Angle defect 2*pi - cone angle (interior vertices).
  double defect(int v) const { return 2 * kPi - cone_angle[size_t(v)]; }
  std::vector<Vec2> face_polygon(int f) const {
    return {chart[size_t(f)][0], chart[size_t(f)][1], chart[size_t(f)][2]};
  }
};

// Build with full validation: triangle inequality, manifold edges, connected.
PolyhedralMesh build_mesh(const MeshSpec& spec);

// Point on a mesh: face id plus chart coordinates within that face.
struct MeshPoint {
  int face = -1;
  Vec2 p{};
};

// Snap a point to its canonical representative: membership is checked with
// tolerance kMemEps; points on shared edges belong to the lower face id.
MeshPoint canonicalize(const PolyhedralMesh& m, MeshPoint q);

// True if q lies in face (tolerance kMemEps).
bool in_face(const PolyhedralMesh& m, int face, Vec2 p, double eps = kMemEps);

// Local corner index if q is within eps of a corner of its face, else -1.
int corner_index_near(const PolyhedralMesh& m, const MeshPoint& q, double eps);

// --- builders ---------------------------------------------------------------

// Axis-aligned cube surface, edge length `edge`; each side split into
// subdiv x subdiv cells (12*subdiv^2 faces). Subdivision leaves the
// intrinsic metric unchanged; it only tightens Monte Carlo supersets.
PolyhedralMesh make_cube_mesh(double edge = 1.0, int subdiv = 1);

// Regular tetrahedron with the given edge length.
PolyhedralMesh make_tetrahedron_mesh(double edge = 1.0);

// Flat [0,w]x[0,h] rectangle, nx-by-ny grid cells, each split in two.
PolyhedralMesh make_rect_grid_mesh(double w, double h, int nx, int ny);

// Flat torus built as an n-by-n grid with wrapped identifications (n >= 3).
PolyhedralMesh make_flat_torus_mesh(double a, double b, int n);

// Geodesic sphere: icosahedron subdivided `level` times, projected to radius
// R. Convex; used for smooth-limit studies.
PolyhedralMesh make_icosphere_mesh(double R, int level);

// Double of a simple polygon across its boundary: two mirror copies glued
// edge-to-edge. Corner with interior angle beta gets cone angle 2*beta.
PolyhedralMesh double_polygon(const std::vector<Vec2>& polygon);

// Double of the [0,side]^2 square with each sheet meshed as an n-by-n grid
// (n = 1 delegates to double_polygon). Same metric as double_polygon of the
// square: four cone points of defect pi at the corners.
PolyhedralMesh make_doubled_square_mesh(double side = 1.0, int n = 1);

// Delaunay triangulation (lower hull of the paraboloid lift) of planar
// points; returns a flat mesh with positions z = 0.
PolyhedralMesh delaunay_mesh(const std::vector<Vec2>& pts);

}  // namespace devlab
