#pragma once

#include <Eigen/Core>

#include "degtk/degree.hpp"
#include "degtk/fields.hpp"

namespace degtk {

// Index of an isolated zero: the degree of x -> V(zero + r*x)/|V(zero + r*x)|
// as a map of the unit sphere.
struct IndexReport {
  Eigen::VectorXd zero;
  double radius = 0.0;
  int index = 0;
  DegreeReport degree_report;
};

IndexReport index_at(const FieldEval& field, const Eigen::VectorXd& zero, double radius,
                     const DegreeOptions& opts = {});

// Minimum of |(1-t)V(x) + tW(x)| over sphere mesh vertices x and a uniform
// t grid, with the location of that minimum. Small values are a result, not
// an error; the caller decides what floor the homotopy needs to clear.
struct HomotopyScanReport {
  double min_norm = 0.0;
  Eigen::VectorXd witness_x;
  double witness_t = 0.0;
  int grid = 0;
  int mesh_level = 0;
};

HomotopyScanReport verify_homotopy_nonvanishing(const FieldEval& v, const FieldEval& w,
                                                double radius, int grid, int mesh_level = 4,
                                                ExecPolicy policy = ExecPolicy::parallel);

// Appends sign * x_{n+1} to a planar or spatial field and compares the index
// at the origin before and after. The expected relation is
// suspended_index = sign * base_index.
struct Lemma21Report {
  int base_index = 0;
  int suspended_index = 0;
  int sign = 0;
  bool relation_holds = false;
  double sign_condition_min = 0.0;  // scan of sign * x_last * W_last(x) away from x_last = 0
};

Lemma21Report check_lemma21(const PolyField& base, int sign, double radius,
                            const DegreeOptions& opts = {});

}  // namespace degtk
