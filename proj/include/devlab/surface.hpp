#pragma once

// Model surfaces: analytic backends (plane, half-plane, flat torus, round
// sphere, metric cone) and polyhedral meshes, behind one Surface handle.
// Points, regions, area, uniform sampling, and the two atomic curvature
// measures (angle defects; edge-length-weighted exterior dihedrals).

#include <memory>
#include <optional>
#include <vector>

#include "devlab/common.hpp"
#include "devlab/mesh.hpp"

namespace devlab {

enum class Backend { plane, half_plane, flat_torus, sphere, cone, polyhedral };

const char* backend_name(Backend b);

// Point on a surface. For polyhedral surfaces: face id + chart coordinates.
// For analytic backends face = -1 and p holds backend coordinates:
//   plane/half_plane: (x, y); flat_torus: (x, y) in [0,a) x [0,b);
//   sphere: (colatitude in [0,pi], longitude); cone: (radius u >= 0, angle
//   psi in [0, rho)).
struct SurfacePoint {
  int face = -1;
  Vec2 p{};
};

struct Surface {
  Backend backend = Backend::plane;
  double a = 0, b = 0;  // flat_torus sides
  double R = 0;         // sphere radius
  double rho = 0;       // cone total angle, 0 < rho <= 2*pi
  std::shared_ptr<const PolyhedralMesh> mesh;

  const PolyhedralMesh& require_mesh() const {
    if (!mesh) throw UnsupportedError("operation requires a polyhedral surface");
    return *mesh;
  }
};

Surface make_plane();
Surface make_half_plane();
Surface make_flat_torus(double a, double b);
Surface make_sphere(double R);
Surface make_cone(double rho);  // total cone angle; defect alpha = 2*pi - rho
Surface make_polyhedral(PolyhedralMesh mesh);

// Regions of integration / sampling.
struct RegionSpec {
  enum class Kind { whole, ball, vertex_ball, boundary_strip, faces };
  Kind kind = Kind::whole;
  SurfacePoint center{};
  double radius = 0;
  int vertex = -1;
  double offset = 0;
  std::vector<int> face_ids;

  static RegionSpec whole() { return {}; }
  static RegionSpec ball(SurfacePoint c, double r);
  static RegionSpec vertex_ball(int v, double r);
  static RegionSpec boundary_strip(double offset);
  static RegionSpec faces(std::vector<int> ids);
};

// Canonical representative of a point (validates membership; edge points go
// to the lower face id on polyhedral surfaces; coordinates wrapped/clamped on
// analytic backends).
SurfacePoint canonical_point(const Surface& s, SurfacePoint q);

// Center point of the region's defining ball (vertex_ball resolves to the
// vertex corner on its lowest incident face).
SurfacePoint region_center(const Surface& s, const RegionSpec& region);

// Intrinsic distance between two points on an analytic backend (closed
// form). Polyhedral surfaces are handled by geodesics.hpp.
double analytic_distance(const Surface& s, SurfacePoint x, SurfacePoint y);

// Area H^2(region). Exact (analytic) where closed forms exist; polyhedral
// ball areas use the unfolding estimator; boundary strips on meshes use
// Monte Carlo with the given budget.
MeasureEstimate area(const Surface& s, const RegionSpec& region,
                     uint64_t mc_samples = 1 << 14, uint64_t seed = 0);

// Deterministic uniform sample sequence: element i depends only on (seed, i).
std::vector<SurfacePoint> sample_uniform(const Surface& s,
                                         const RegionSpec& region, uint64_t n,
                                         uint64_t seed);

// Atomic curvature measure: sum of angle defects (2*pi - cone angle) over
// interior cone points in the region; `absolute` sums |defect|. Exact.
// Unsupported on the sphere backend (curvature is not atomic there).
MeasureEstimate curvature_measure(const Surface& s, const RegionSpec& region,
                                  bool absolute = false);

// Boundary-length-weighted exterior dihedral sum over edges meeting the
// region (edges on region boundaries belong to their lower face id; ball
// regions clip edges to geodesic-distance sublevels). Requires an embedded
// polyhedral surface.
MeasureEstimate mean_curvature_measure(const Surface& s,
                                       const RegionSpec& region);

// Smallest geometric feature: grid for default profile radii.
// (min edge length on meshes; injectivity-scale on analytic backends)
double feature_scale(const Surface& s);

// --- analytic ball areas ------------------------------------------------

// Geodesic ball area on the round sphere of radius R (caps at 4*pi*R^2).
double sphere_cap_area(double R, double r);

// Ball area on the flat torus [0,a]x[0,b] (exact for every r).
double torus_ball_area(double a, double b, double r);

// Ball area in the closed half-plane around a point at depth d >= 0.
double halfplane_ball_area(double d, double r);

// Ball area on the cone of total angle rho around a point at distance u from
// the apex (closed form at the apex, 1-D adaptive quadrature otherwise).
QuadResult cone_ball_area(double rho, double u, double r, double tol = 1e-12);

// Distance on the cone between (u1, psi1) and (u2, psi2).
double cone_distance(double rho, double u1, double psi1, double u2,
                     double psi2);

}  // namespace devlab
