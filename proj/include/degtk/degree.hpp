#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "degtk/fields.hpp"
#include "degtk/kernels.hpp"
#include "degtk/sphere_mesh.hpp"

namespace degtk {

// The normalized restriction of a field to a probe sphere: unit x maps to
// V(center + radius * x) / |V(center + radius * x)|. Evaluation throws
// MinNormViolation when the raw norm drops to the floor or below.
struct SphereMapEval {
  FieldEval field;
  Eigen::VectorXd center;
  double radius = 1.0;
  double min_norm_floor = 1e-10;

  int n() const { return field.dim - 1; }
  Eigen::VectorXd raw(const Eigen::VectorXd& unit) const;
  Eigen::VectorXd operator()(const Eigen::VectorXd& unit) const;

  static SphereMapEval around(FieldEval field, Eigen::VectorXd center, double radius);
  static SphereMapEval origin_sphere(FieldEval field, double radius);
};

enum class DegreeMethod { winding, pl };

std::string to_string(DegreeMethod method);

struct DegreeReport {
  int degree = 0;
  DegreeMethod method = DegreeMethod::pl;
  int mesh_level = -1;       // final level used by the PL run
  int target_retries = 0;    // redraws forced by non-generic targets
  double min_image_norm = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;           // winding samples actually used
  bool cross_checked = false;
};

struct DegreeOptions {
  std::uint64_t seed = 0;
  int start_level = 2;
  int samples = 64;                  // initial winding density, >= 16
  double eps_cover = 1e-9;
  double hemisphere_diameter = 0.5;  // image simplices must be smaller than this
  ExecPolicy policy = ExecPolicy::parallel;
};

// Angle accumulation around the circle with adaptive density: increments must
// stay below pi/2 and the accumulated total must land near an integer multiple
// of 2*pi, doubling the sample count up to 4 times otherwise.
int winding_number(const SphereMapEval& map, int samples);
DegreeReport winding_report(const SphereMapEval& map, int samples);

// Simplicial degree: refine until image simplices are hemisphere-small, then
// count signed coverage of a seeded random target.
DegreeReport pl_degree(const SphereMapEval& map, const TriangulatedSphere& mesh,
                       std::uint64_t seed, const DegreeOptions& opts = {});

// Cross-checked dispatch: n = 1 runs winding and PL and insists they agree;
// n >= 2 runs PL at two consecutive mesh levels. Disagreement throws
// CrossCheckError.
DegreeReport degree(const SphereMapEval& map, const DegreeOptions& opts = {});

}  // namespace degtk
