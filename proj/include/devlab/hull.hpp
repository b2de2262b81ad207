#pragma once

// Incremental 3D convex hull with exact orientation predicates (double
// filter, exact rational fallback). Coplanar facets are merged into patches
// and re-triangulated by a fan from their lowest-index vertex, so the output
// triangulation is deterministic. Points interior to the hull (including
// points on faces or edges) are discarded.

#include <vector>

#include "devlab/common.hpp"
#include "devlab/mesh.hpp"

namespace devlab {

// Sign of det[b-a, c-a, d-a]: +1 if d is on the CCW-normal side of (a,b,c).
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// Outward-CCW triangles indexed into `pts` (non-hull points unused).
// Requires >= 4 points, not all coplanar.
std::vector<std::array<int, 3>> convex_hull_faces(const std::vector<Vec3>& pts);

// Hull as a closed polyhedral surface (convex_embedded set by validation).
PolyhedralMesh build_convex_hull_surface(const std::vector<Vec3>& pts);

}  // namespace devlab
