#include "degtk/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace degtk {

namespace {

constexpr long long kNoIndex = std::numeric_limits<long long>::max();

struct MinCandidate {
  double value = std::numeric_limits<double>::infinity();
  long long index = kNoIndex;

  void offer(double v, long long i) {
    if (v < value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
  void merge(const MinCandidate& other) { offer(other.value, other.index); }
};

void eval_row(const FieldEval& field, const Eigen::VectorXd& center, double radius,
              const Eigen::MatrixXd& vertices, Eigen::MatrixXd& images, long long v,
              MinCandidate& best) {
  const Eigen::VectorXd x = center + radius * vertices.row(v).transpose();
  const Eigen::VectorXd raw = field(x);
  const double norm = raw.norm();
  best.offer(norm, v);
  if (norm > 0.0) {
    images.row(v) = raw.transpose() / norm;
  } else {
    images.row(v) = raw.transpose();
  }
}

// Solve Wm^T lambda = target for one simplex. Returns the signed contribution
// and reports targets that sit within eps of a coverage boundary. Degenerate
// image simplices solve to non-finite lambdas and contribute nothing, which is
// the right answer: a generic target misses a measure-zero image.
template <int D>
int cover_contribution(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells, long long cell,
                       const Eigen::VectorXd& target, double eps, bool& on_boundary) {
  Eigen::Matrix<double, D, D> wt;
  for (int k = 0; k < D; ++k) wt.col(k) = images.row(cells(cell, k)).transpose();
  const Eigen::PartialPivLU<Eigen::Matrix<double, D, D>> lu(wt);
  const double det = lu.determinant();
  if (!std::isfinite(det) || det == 0.0) return 0;
  const Eigen::Matrix<double, D, 1> lambda = lu.solve(target.head<D>());
  if (!lambda.array().isFinite().all()) return 0;
  if ((lambda.array().abs() <= eps).any()) {
    on_boundary = true;
    return 0;
  }
  if ((lambda.array() > eps).all()) return det > 0.0 ? 1 : -1;
  return 0;
}

int cover_dispatch(int d, const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                   long long cell, const Eigen::VectorXd& target, double eps, bool& on_boundary) {
  switch (d) {
    case 2: return cover_contribution<2>(images, cells, cell, target, eps, on_boundary);
    case 3: return cover_contribution<3>(images, cells, cell, target, eps, on_boundary);
    case 4: return cover_contribution<4>(images, cells, cell, target, eps, on_boundary);
    default: throw ValidationError("coverage test supports ambient dimensions 2..4");
  }
}

double cell_image_diameter(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                           long long cell) {
  const int d = static_cast<int>(cells.cols());
  double best = 0.0;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const double len = (images.row(cells(cell, a)) - images.row(cells(cell, b))).norm();
      best = std::max(best, len);
    }
  }
  return best;
}

double pair_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, long long v, double t) {
  return ((1.0 - t) * a.row(v) + t * b.row(v)).norm();
}

}  // namespace

VertexImages normalized_images(const FieldEval& field, const Eigen::VectorXd& center, double radius,
                               const Eigen::MatrixXd& vertices, ExecPolicy policy) {
  const long long count = vertices.rows();
  VertexImages out;
  out.images.resize(count, field.dim);
  MinCandidate best;

  if (policy == ExecPolicy::serial) {
    for (long long v = 0; v < count; ++v) eval_row(field, center, radius, vertices, out.images, v, best);
  } else {
#ifdef _OPENMP
#pragma omp parallel
    {
      MinCandidate local;
#pragma omp for schedule(static) nowait
      for (long long v = 0; v < count; ++v) {
        eval_row(field, center, radius, vertices, out.images, v, local);
      }
#pragma omp critical
      best.merge(local);
    }
#else
    for (long long v = 0; v < count; ++v) eval_row(field, center, radius, vertices, out.images, v, best);
#endif
  }

  out.min_raw_norm = best.value;
  out.argmin = static_cast<Eigen::Index>(best.index);
  return out;
}

double max_image_diameter(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                          ExecPolicy policy) {
  const long long count = cells.rows();
  double best = 0.0;
  if (policy == ExecPolicy::serial) {
    for (long long c = 0; c < count; ++c) best = std::max(best, cell_image_diameter(images, cells, c));
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : best)
    for (long long c = 0; c < count; ++c) best = std::max(best, cell_image_diameter(images, cells, c));
#else
    for (long long c = 0; c < count; ++c) best = std::max(best, cell_image_diameter(images, cells, c));
#endif
  }
  return best;
}

CoverageResult coverage_sum(const Eigen::MatrixXd& images, const Eigen::MatrixXi& cells,
                            const Eigen::VectorXd& target, double eps, ExecPolicy policy) {
  const long long count = cells.rows();
  const int d = static_cast<int>(cells.cols());
  long long sum = 0;
  long long offending = kNoIndex;

  if (policy == ExecPolicy::serial) {
    for (long long c = 0; c < count; ++c) {
      bool boundary = false;
      sum += cover_dispatch(d, images, cells, c, target, eps, boundary);
      if (boundary && c < offending) offending = c;
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : sum) reduction(min : offending)
    for (long long c = 0; c < count; ++c) {
      bool boundary = false;
      sum += cover_dispatch(d, images, cells, c, target, eps, boundary);
      if (boundary && c < offending) offending = c;
    }
#else
    for (long long c = 0; c < count; ++c) {
      bool boundary = false;
      sum += cover_dispatch(d, images, cells, c, target, eps, boundary);
      if (boundary && c < offending) offending = c;
    }
#endif
  }

  CoverageResult out;
  out.signed_sum = sum;
  out.non_generic = offending != kNoIndex;
  out.offending = out.non_generic ? static_cast<Eigen::Index>(offending) : -1;
  return out;
}

ArgMin pair_min_norm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int grid,
                     ExecPolicy policy) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("pair_min_norm: endpoint value shapes differ");
  }
  if (grid < 1) throw ValidationError("pair_min_norm: grid must be positive");
  const long long count = a.rows();
  MinCandidate best;

  auto scan_vertex = [&](long long v, MinCandidate& into) {
    for (int k = 0; k <= grid; ++k) {
      const double t = static_cast<double>(k) / grid;
      into.offer(pair_norm(a, b, v, t), v * (grid + 1) + k);
    }
  };

  if (policy == ExecPolicy::serial) {
    for (long long v = 0; v < count; ++v) scan_vertex(v, best);
  } else {
#ifdef _OPENMP
#pragma omp parallel
    {
      MinCandidate local;
#pragma omp for schedule(static) nowait
      for (long long v = 0; v < count; ++v) scan_vertex(v, local);
#pragma omp critical
      best.merge(local);
    }
#else
    for (long long v = 0; v < count; ++v) scan_vertex(v, best);
#endif
  }
  return {best.value, best.index};
}

ArgMin min_norm_over_points(const FieldEval& field, const Eigen::MatrixXd& points,
                            ExecPolicy policy) {
  const long long count = points.rows();
  MinCandidate best;

  if (policy == ExecPolicy::serial) {
    for (long long p = 0; p < count; ++p) best.offer(field(points.row(p).transpose()).norm(), p);
  } else {
#ifdef _OPENMP
#pragma omp parallel
    {
      MinCandidate local;
#pragma omp for schedule(static) nowait
      for (long long p = 0; p < count; ++p) local.offer(field(points.row(p).transpose()).norm(), p);
#pragma omp critical
      best.merge(local);
    }
#else
    for (long long p = 0; p < count; ++p) best.offer(field(points.row(p).transpose()).norm(), p);
#endif
  }
  return {best.value, best.index};
}

}  // namespace degtk
