#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "degtk/fields.hpp"
#include "degtk/sphere_mesh.hpp"

namespace degtk {

// Every kernel below has a plain serial reference implementation and an
// OpenMP variant. Both reduce with order-independent operations (integer sums,
// argmin with index tie-break), so their results are bit-identical; the tests
// hold them to that.
enum class ExecPolicy { serial, parallel };

struct VertexImages {
  Eigen::MatrixXd images;   // V x d, normalized field values at scaled mesh vertices
  double min_raw_norm = 0.0;
  Eigen::Index argmin = -1;
};

// Evaluates x -> f(center + radius * x) / |...| at every mesh vertex.
// Normalization is skipped for exactly-zero values; the caller compares
// min_raw_norm against its floor before trusting the images.
VertexImages normalized_images(const FieldEval& field, const Eigen::VectorXd& center, double radius,
                               const Eigen::MatrixXd& vertices, ExecPolicy policy);

// Largest pairwise distance between image vertices within one simplex,
// maximized over all simplices.
double max_image_diameter(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                          ExecPolicy policy);

struct CoverageResult {
  long long signed_sum = 0;     // sum of sign(det Wm) over covering simplices
  bool non_generic = false;     // some barycentric coordinate sat within eps of 0
  Eigen::Index offending = -1;  // lowest such simplex id
};

// Conic coverage test per simplex: solve Wm^T lambda = target; all lambda_i > eps
// means the simplex covers the target and contributes sign(det Wm).
CoverageResult coverage_sum(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                            const Eigen::VectorXd& target, double eps, ExecPolicy policy);

struct ArgMin {
  double value = 0.0;
  long long index = -1;
};

// min over (vertex v, step k) of |(1 - t_k) A_v + t_k B_v| with t_k = k / grid.
// The flat index is v * (grid + 1) + k.
ArgMin pair_min_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int grid,
                     ExecPolicy policy);

// min over rows of |field(point)|.
ArgMin min_norm_over_points(const FieldEval& field, const Eigen::MatrixXd& points,
                            ExecPolicy policy);

}  // namespace degtk
