#pragma once

// Shared fixtures for the unit tests: locating 3D points on embedded meshes,
// chart <-> embedding frames, and a couple of numeric shorthands.

#include <array>
#include <cmath>
#include <stdexcept>

#include "devlab/common.hpp"
#include "devlab/mesh.hpp"
#include "devlab/surface.hpp"

namespace testutil {

using devlab::PolyhedralMesh;
using devlab::SurfacePoint;
using devlab::Vec2;
using devlab::Vec3;

// Barycentric coordinates of q in the 3D triangle (a, b, c); valid only if q
// lies in the triangle's plane.
inline std::array<double, 3> barycentric3(Vec3 q, Vec3 a, Vec3 b, Vec3 c) {
  Vec3 v0 = b - a, v1 = c - a, v2 = q - a;
  double d00 = devlab::dot(v0, v0), d01 = devlab::dot(v0, v1);
  double d11 = devlab::dot(v1, v1), d20 = devlab::dot(v2, v0);
  double d21 = devlab::dot(v2, v1);
  double den = d00 * d11 - d01 * d01;
  double v = (d11 * d20 - d01 * d21) / den;
  double w = (d00 * d21 - d01 * d20) / den;
  return {1.0 - v - w, v, w};
}

// Surface point whose embedded position is q (q must lie on the mesh).
inline SurfacePoint locate(const PolyhedralMesh& m, Vec3 q,
                           double tol = 1e-9) {
  if (!m.positions) throw std::runtime_error("locate: mesh has no positions");
  const auto& pos = *m.positions;
  for (size_t f = 0; f < m.faces.size(); ++f) {
    Vec3 a = pos[size_t(m.vertex_at(int(f), 0))];
    Vec3 b = pos[size_t(m.vertex_at(int(f), 1))];
    Vec3 c = pos[size_t(m.vertex_at(int(f), 2))];
    Vec3 n = devlab::cross(b - a, c - a);
    double nn = devlab::norm(n);
    if (nn == 0) continue;
    if (std::abs(devlab::dot(q - a, n)) > tol * (1 + nn)) continue;
    auto [u, v, w] = barycentric3(q, a, b, c);
    if (u < -tol || v < -tol || w < -tol) continue;
    Vec2 p = m.corner(int(f), 0) * u + m.corner(int(f), 1) * v +
             m.corner(int(f), 2) * w;
    return {int(f), p};
  }
  throw std::runtime_error("locate: point not on mesh");
}

// Embedded position of a surface point (inverse of locate).
inline Vec3 embed(const PolyhedralMesh& m, const SurfacePoint& x) {
  if (!m.positions) throw std::runtime_error("embed: mesh has no positions");
  const auto& pos = *m.positions;
  Vec2 a = m.corner(x.face, 0), b = m.corner(x.face, 1), c = m.corner(x.face, 2);
  // Barycentric in the chart (isometric image of the embedded triangle).
  Vec2 v0 = b - a, v1 = c - a, v2 = x.p - a;
  double d00 = devlab::dot(v0, v0), d01 = devlab::dot(v0, v1);
  double d11 = devlab::dot(v1, v1), d20 = devlab::dot(v2, v0);
  double d21 = devlab::dot(v2, v1);
  double den = d00 * d11 - d01 * d01;
  double v = (d11 * d20 - d01 * d21) / den;
  double w = (d00 * d21 - d01 * d20) / den;
  Vec3 A = pos[size_t(m.vertex_at(x.face, 0))];
  Vec3 B = pos[size_t(m.vertex_at(x.face, 1))];
  Vec3 C = pos[size_t(m.vertex_at(x.face, 2))];
  return A * (1.0 - v - w) + B * v + C * w;
}

// Chart direction on face f whose embedded image is the tangent vector d3
// (d3 must be tangent to the face). The chart is an isometric image of the
// embedded triangle, so the transpose of the embedding frame inverts it.
inline Vec2 chart_dir(const PolyhedralMesh& m, int f, Vec3 d3) {
  if (!m.positions) throw std::runtime_error("chart_dir: no positions");
  const auto& pos = *m.positions;
  Vec3 A = pos[size_t(m.vertex_at(f, 0))];
  Vec3 B = pos[size_t(m.vertex_at(f, 1))];
  Vec3 C = pos[size_t(m.vertex_at(f, 2))];
  Vec2 a = m.corner(f, 0), b = m.corner(f, 1), c = m.corner(f, 2);
  // Solve d3 = E * dchart for the 3x2 frame E mapping chart steps to 3D.
  Vec2 u1 = b - a, u2 = c - a;
  Vec3 w1 = B - A, w2 = C - A;
  // dchart = alpha*u1 + beta*u2 with d3 = alpha*w1 + beta*w2; least squares
  // via the (invertible) Gram system.
  double g11 = devlab::dot(w1, w1), g12 = devlab::dot(w1, w2);
  double g22 = devlab::dot(w2, w2);
  double r1 = devlab::dot(d3, w1), r2 = devlab::dot(d3, w2);
  double den = g11 * g22 - g12 * g12;
  double alpha = (r1 * g22 - r2 * g12) / den;
  double beta = (r2 * g11 - r1 * g12) / den;
  return u1 * alpha + u2 * beta;
}

}  // namespace testutil
