#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "degtk/errors.hpp"

namespace degtk {

// Oriented triangulation of the unit n-sphere in R^{n+1}, n in {1, 2, 3}.
// Every simplex satisfies det(vertex rows) > 0, which realizes the outward
// orientation and is exactly what the PL degree computation relies on.
struct TriangulatedSphere {
  int n = 0;
  int level = 0;
  Eigen::MatrixXd vertices;   // V x (n+1), rows on the unit sphere
  Eigen::MatrixXi simplices;  // C x (n+1), vertex indices

  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int simplex_count() const { return static_cast<int>(simplices.rows()); }
};

// Uniform refinement depth caps. Circles are cheap, so their cap is generous;
// the 3-sphere cap bounds memory (level 5 is about half a million cells).
int max_mesh_level(int n);

// Boundary of the cross-polytope refined `level` times. The coordinate
// hyperplanes stay subcomplexes at every level.
TriangulatedSphere build_mesh(int n, int level);

// Edge-midpoint subdivision with radial reprojection. For n = 3 the interior
// octahedron is split along its shortest reprojected diagonal, ties broken by
// lowest vertex index.
TriangulatedSphere refine(const TriangulatedSphere& mesh);

struct ValidityReport {
  std::vector<int> orientation_violations;               // simplex ids with det <= 0
  std::vector<std::vector<int>> nonmanifold_faces;       // faces not shared by exactly 2 simplices
  std::vector<int> off_sphere_vertices;                  // |v| deviates from 1 beyond 1e-12
  std::vector<std::array<int, 2>> duplicate_vertices;    // pairs closer than 1e-9

  bool ok() const {
    return orientation_violations.empty() && nonmanifold_faces.empty() &&
           off_sphere_vertices.empty() && duplicate_vertices.empty();
  }
};

ValidityReport validate_mesh(const TriangulatedSphere& mesh);

double signed_volume(const TriangulatedSphere& mesh);
double max_edge_chord(const TriangulatedSphere& mesh);

// Geomview nOFF text (OFF for n = 2) for external viewers.
std::string to_off(const TriangulatedSphere& mesh);

// Process-wide immutable cache; meshes are shared freely across threads.
std::shared_ptr<const TriangulatedSphere> cached_mesh(int n, int level);

}  // namespace degtk
