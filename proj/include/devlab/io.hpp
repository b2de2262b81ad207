#pragma once

// Mesh readers (OFF/OBJ), JSON descriptors for surfaces, regions, points and
// measures, CSV tensor tables, and report serialization. Reports use ordered
// JSON (insertion order preserved) and fixed-format floats, so identical
// inputs produce identical bytes; wall-clock metadata goes into a separate
// "metadata" block that callers may omit or strip.

#include <cstdint>
#include <istream>
#include <string>

#include "json.hpp"

#include "devlab/chart.hpp"
#include "devlab/geodesics.hpp"
#include "devlab/measures.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"

namespace devlab::io {

using json = nlohmann::ordered_json;

// === Mesh input =============================================================

// OFF: "OFF / nv nf ne / vertex lines / face lines"; '#' comments allowed;
// polygon faces are fan-triangulated (they must be planar and convex).
MeshSpec read_off(std::istream& in);

// Wavefront OBJ subset: "v x y z" and "f i j k ..." (1-based, "i/t/n" forms
// accepted, negative indices rejected); faces fan-triangulated.
MeshSpec read_obj(std::istream& in);

// === Descriptors ============================================================

// {"type": "flat_torus"|"sphere"|"cone"|"plane"|"half_plane"|"cube"|
//  "doubled_square"|"tetrahedron"|"icosphere"|"rect_grid"|"doubled_polygon"|
//  "hull"|"mesh", ...parameters}. "mesh" loads the OFF/OBJ at "path".
Surface surface_from_json(const json& j);

// Dispatch on file extension: .off/.obj build polyhedral surfaces, .json is
// parsed as a descriptor.
Surface load_surface(const std::string& path);

// Descriptor for analytic surfaces, summary (counts, area, flags) for meshes.
json surface_to_json(const Surface& s);

SurfacePoint point_from_json(const json& j);
json point_to_json(const SurfacePoint& p);

// {"kind": "whole"|"ball"|"vertex_ball"|"boundary_strip"|"faces", ...}.
RegionSpec region_from_json(const json& j);
json region_to_json(const RegionSpec& region);

// {"kind": "hausdorff"} | {"kind": "dirac", "point": {...}} |
// {"kind": "weighted", "density": [per-face weights]}.
measures::MeasureSpec measure_from_json(const json& j);
json measure_to_json(const measures::MeasureSpec& spec);

// === Tensor fields ==========================================================

// Built-in families on the unit square: "identity"; "conformal_bump"
// ((1 + a*bump)*I, smooth bump supported in the disk of radius 0.35 around
// (0.5, 0.5)); "linear" (g11 = 1 + a*x, g12 = 0, g22 = 1).
chart::TensorField builtin_tensor_field(const std::string& name, double a);

// CSV node table with columns x,y,g11,g12,g22 (optional header). Lookup
// snaps query points to table rows within snap_tol.
chart::TensorField tensor_field_from_csv(const std::string& path,
                                         double snap_tol);

// === Reports ================================================================

json estimate_to_json(const MeasureEstimate& e);
json profile_to_json(const measures::DeviationProfile& p);

// Columns: r, V_r, se, V_r_over_r, V_r_over_r2.
std::string profile_to_csv(const measures::DeviationProfile& p);

// Columns: event_index, time, face_id, edge_id, x, y, dir_x, dir_y.
std::string flow_events_to_csv(const FlowResult& res);

std::string format_double(double v);  // "%.17g", round-trip exact

uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(const json& j);  // fnv1a-64 of the compact dump

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace devlab::io
