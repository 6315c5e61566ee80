#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

#include "degtk/fields.hpp"
#include "degtk/index.hpp"

namespace degtk {

// Regions of R^d cut out by round spheres: one enclosing sphere, any number
// of excluded ones strictly inside it.
enum class SphereSide { encloses, excludes };

struct BoundarySphere {
  Eigen::VectorXd center;
  double radius = 0.0;
  SphereSide side = SphereSide::encloses;
};

struct MorseScenario {
  std::string name;
  int dim = 2;
  std::vector<BoundarySphere> boundaries;
  PolyField field{1, {{}}};
  std::vector<Eigen::VectorXd> interior_zeros;
  int chi_m = 0;
  int chi_boundary = 0;
  double collar_width = 0.0;     // 0 picks 0.2 * smallest boundary radius
  double min_norm_floor = 1e-4;  // undeclared-zero screening floor
  std::vector<Eigen::VectorXd> boundary_seeds;  // hints for dim-3 tangential zeros
};

// Structural checks plus a grid scan certifying, at grid resolution, that the
// field has no zeros in the region other than the declared ones.
void validate_scenario(const MorseScenario& scenario);

double default_collar_width(const MorseScenario& scenario);

// Sign of <V, outward normal> at boundary samples. A sample where the field
// is tangent whose whole neighborhood is also tangent rejects the scenario;
// isolated tangencies are left for boundary_indices to resolve.
struct BoundarySigns {
  int boundary = 0;
  Eigen::MatrixXd points;
  Eigen::VectorXd nu;
  int negative = 0;
  int positive = 0;
};

std::vector<BoundarySigns> classify_boundary(const MorseScenario& scenario, int samples = 720);

// T(x) = V(x) - <V(x), n(x)> n(x) on a boundary sphere, with the normal part
// alongside. Points are projected onto the sphere before evaluation.
struct BoundaryField {
  FieldEval tangential;
  std::function<double(const Eigen::VectorXd&)> normal;
};

BoundaryField tangential_field(const MorseScenario& scenario, const BoundarySphere& boundary);

struct BoundaryZero {
  Eigen::VectorXd point;
  int boundary = 0;
  int tangential_index = 0;
  bool inward = false;  // field points into the region near this zero
};

// Zeros of the tangential field on every boundary sphere. A boundary where
// the tangential field vanishes identically is admissible only when the field
// points outward along all of it; such boundaries carry no zeros and are
// flagged instead.
struct BoundaryAnalysis {
  std::vector<BoundaryZero> zeros;
  std::vector<bool> tangential_vanishes;  // per boundary sphere
};

BoundaryAnalysis boundary_indices(const MorseScenario& scenario, const DegreeOptions& opts = {});

// Collar damping profile: 0 at the boundary, 1 from the collar's midpoint on,
// flat to all orders at 0 so the reflected field stays smooth.
double smooth_step(double s);

struct SpotCheck {
  Eigen::VectorXd point;
  int boundary = 0;
  bool inward = false;
  int predicted = 0;
  int computed = 0;
  bool matches = false;
};

struct DoublingReport {
  long long doubled_sum = 0;  // 2*Ind_V plus signed boundary contributions
  int target = 0;             // 2*chi(M) - chi(boundary)
  bool identity_holds = false;
  double collar_width = 0.0;
  std::vector<SpotCheck> spot_checks;
  std::vector<int> degenerate_boundaries;  // boundaries contributing -chi(S^{d-1})
};

// Reflects the collar-damped field across the boundary and checks that the
// doubled manifold's total index matches 2*chi(M) - chi(boundary). One zero
// per boundary side is additionally re-derived in collar coordinates; a
// mismatch there throws CrossCheckError.
DoublingReport double_check(const MorseScenario& scenario, double collar_width = 0.0,
                            const DegreeOptions& opts = {});

struct MorseReport {
  std::string name;
  int ind_v = 0;
  std::vector<IndexReport> interior;
  BoundaryAnalysis boundary;
  int ind_dminus_v = 0;
  int chi_m = 0;
  bool formula_holds = false;
  bool has_doubling = false;
  DoublingReport doubling;
};

// Ind(V) + Ind over the inward-pointing part of the boundary, compared with
// the declared Euler characteristic.
MorseReport morse_check(const MorseScenario& scenario, const DegreeOptions& opts = {});

// morse_check plus double_check in one report.
MorseReport run_scenario(const MorseScenario& scenario, double collar_width = 0.0,
                         const DegreeOptions& opts = {});

}  // namespace degtk
