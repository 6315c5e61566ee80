#include "degtk/index.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "degtk/errors.hpp"
#include "degtk/kernels.hpp"
#include "degtk/sphere_mesh.hpp"

namespace degtk {

namespace {

constexpr double kZeroTolerance = 1e-9;

Eigen::MatrixXd raw_images(const FieldEval& field, const Eigen::MatrixXd& points) {
  Eigen::MatrixXd images(points.rows(), field.dim);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    images.row(i) = field(points.row(i).transpose()).transpose();
  }
  return images;
}

}  // namespace

IndexReport index_at(const FieldEval& field, const Eigen::VectorXd& zero, double radius,
                     const DegreeOptions& opts) {
  if (zero.size() != field.dim) {
    throw ValidationError("declared zero has dimension " + std::to_string(zero.size()) +
                          " but the field lives on R^" + std::to_string(field.dim));
  }
  const double at_zero = field(zero).norm();
  if (!(at_zero < kZeroTolerance)) {
    throw ValidationError("declared zero is not a zero: field norm there is " +
                          std::to_string(at_zero));
  }
  const SphereMapEval map = SphereMapEval::around(field, zero, radius);

  IndexReport report;
  report.zero = zero;
  report.radius = radius;
  report.degree_report = degree(map, opts);
  report.index = report.degree_report.degree;
  return report;
}

HomotopyScanReport verify_homotopy_nonvanishing(const FieldEval& v, const FieldEval& w,
                                                double radius, int grid, int mesh_level,
                                                ExecPolicy policy) {
  if (v.dim != w.dim) throw ValidationError("homotopy endpoints have different dimensions");
  if (v.dim < 2 || v.dim > 4) {
    throw ValidationError("homotopy scan supports fields on R^2, R^3 or R^4");
  }
  if (radius <= 0.0) throw ValidationError("homotopy scan radius must be positive");
  if (grid < 1) throw ValidationError("homotopy scan needs at least one t step");
  const int n = v.dim - 1;
  if (mesh_level < 0 || mesh_level > max_mesh_level(n)) {
    throw ValidationError("homotopy scan mesh level out of range");
  }

  const auto mesh = cached_mesh(n, mesh_level);
  const Eigen::MatrixXd points = radius * mesh->vertices;
  const Eigen::MatrixXd a = raw_images(v, points);
  const Eigen::MatrixXd b = raw_images(w, points);

  const ArgMin best = pair_min_norm(a, b, grid, policy);
  const Eigen::Index vertex = best.index / (grid + 1);
  const Eigen::Index step = best.index % (grid + 1);

  HomotopyScanReport report;
  report.min_norm = best.value;
  report.witness_x = points.row(vertex).transpose();
  report.witness_t = static_cast<double>(step) / grid;
  report.grid = grid;
  report.mesh_level = mesh_level;
  return report;
}

Lemma21Report check_lemma21(const PolyField& base, int sign, double radius,
                            const DegreeOptions& opts) {
  if (sign != 1 && sign != -1) throw ValidationError("suspension sign must be +1 or -1");
  const int n = base.dim_domain();
  if (n < 2 || n > 3) {
    throw ValidationError("suspension check needs a base field on R^2 or R^3 so both "
                          "indices are computable");
  }
  const PolyField suspended = suspend_field(base, sign);

  // Both indices are degrees of the normalized fields on probe spheres, so
  // the origin is allowed to be a regular point: a field with no zero inside
  // the ball honestly reports 0 on both sides and the relation still holds.
  Lemma21Report report;
  report.sign = sign;
  report.base_index =
      degree(SphereMapEval::around(FieldEval::from(base), Eigen::VectorXd::Zero(n), radius),
             opts)
          .degree;
  report.suspended_index =
      degree(SphereMapEval::around(FieldEval::from(suspended),
                                   Eigen::VectorXd::Zero(n + 1), radius),
             opts)
          .degree;
  report.relation_holds = (report.suspended_index == sign * report.base_index);

  // The hypothesis asks x_{n+1} * W_{n+1}(x) to keep the sign's orientation
  // off the hyperplane x_{n+1} = 0; scan it on mesh vertices of the probe
  // sphere rather than trusting the construction.
  const auto mesh = cached_mesh(n, 3);
  const FieldEval w = FieldEval::from(suspended);
  double condition_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < mesh->vertices.rows(); ++i) {
    const Eigen::VectorXd x = radius * mesh->vertices.row(i).transpose();
    if (std::abs(x[n]) <= kZeroTolerance) continue;
    const double value = sign * x[n] * w(x)[n];
    condition_min = std::min(condition_min, value);
  }
  report.sign_condition_min = condition_min;
  return report;
}

}  // namespace degtk
