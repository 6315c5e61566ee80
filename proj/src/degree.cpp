#include "degtk/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>
#include <vector>

#include "degtk/rng.hpp"

namespace degtk {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

constexpr int kMaxTargetRetries = 50;
constexpr int kMaxWindingDoublings = 4;

struct PlRun {
  std::shared_ptr<const TriangulatedSphere> owned;  // keeps cached meshes alive
  const TriangulatedSphere* mesh = nullptr;
};

// Refine until the image of every simplex fits well inside a hemisphere.
// `from_cache` lets the cross-checked dispatch reuse the process-wide meshes;
// direct callers with hand-built meshes get local refinement instead.
VertexImages prepare_images(const SphereMapEval& map, PlRun& run, bool from_cache,
                            const DegreeOptions& opts) {
  while (true) {
    VertexImages img = normalized_images(map.field, map.center, map.radius, run.mesh->vertices,
                                         opts.policy);
    if (img.min_raw_norm <= map.min_norm_floor) {
      const Eigen::VectorXd witness =
          map.center + map.radius * run.mesh->vertices.row(img.argmin).transpose();
      throw MinNormViolation("field norm " + std::to_string(img.min_raw_norm) +
                                 " at or below floor " + std::to_string(map.min_norm_floor) +
                                 " on the probe sphere",
                             to_std(witness), img.min_raw_norm);
    }
    const double diameter = max_image_diameter(img.images, run.mesh->simplices, opts.policy);
    if (diameter < opts.hemisphere_diameter) return img;
    if (run.mesh->level >= max_mesh_level(run.mesh->n)) {
      throw ValidationError("image simplices of diameter " + std::to_string(diameter) +
                            " remain at mesh level cap " + std::to_string(run.mesh->level));
    }
    if (from_cache) {
      run.owned = cached_mesh(run.mesh->n, run.mesh->level + 1);
    } else {
      run.owned = std::make_shared<const TriangulatedSphere>(refine(*run.mesh));
    }
    run.mesh = run.owned.get();
  }
}

DegreeReport pl_degree_impl(const SphereMapEval& map, PlRun run, bool from_cache,
                            std::uint64_t seed, const DegreeOptions& opts) {
  if (map.n() != run.mesh->n) {
    throw ValidationError("map lives on S^" + std::to_string(map.n()) + " but mesh is S^" +
                          std::to_string(run.mesh->n));
  }
  const VertexImages img = prepare_images(map, run, from_cache, opts);

  UnitSphereSampler sampler(seed);
  CoverageResult cov;
  int retries = 0;
  for (int attempt = 0; attempt <= kMaxTargetRetries; ++attempt) {
    const Eigen::VectorXd target = sampler.next_unit(map.n() + 1);
    cov = coverage_sum(img.images, run.mesh->simplices, target, opts.eps_cover, opts.policy);
    if (!cov.non_generic) {
      DegreeReport report;
      report.degree = static_cast<int>(cov.signed_sum);
      report.method = DegreeMethod::pl;
      report.mesh_level = run.mesh->level;
      report.target_retries = retries;
      report.min_image_norm = img.min_raw_norm;
      report.seed = seed;
      return report;
    }
    ++retries;
  }
  throw ValidationError("no generic target after " + std::to_string(kMaxTargetRetries) +
                        " retries; simplex " + std::to_string(cov.offending) +
                        " keeps hitting a coverage boundary");
}

}  // namespace

Eigen::VectorXd SphereMapEval::raw(const Eigen::VectorXd& unit) const {
  if (center.size() != field.dim) {
    throw ValidationError("probe sphere center dimension does not match the field");
  }
  return field(center + radius * unit);
}

Eigen::VectorXd SphereMapEval::operator()(const Eigen::VectorXd& unit) const {
  const Eigen::VectorXd value = raw(unit);
  const double norm = value.norm();
  if (norm <= min_norm_floor) {
    throw MinNormViolation("field norm " + std::to_string(norm) + " at or below floor " +
                               std::to_string(min_norm_floor) + " on the probe sphere",
                           to_std(center + radius * unit), norm);
  }
  return value / norm;
}

SphereMapEval SphereMapEval::around(FieldEval field, Eigen::VectorXd center, double radius) {
  if (radius <= 0.0) throw ValidationError("probe sphere radius must be positive");
  if (center.size() != field.dim) {
    throw ValidationError("probe sphere center dimension does not match the field");
  }
  SphereMapEval map;
  map.field = std::move(field);
  map.center = std::move(center);
  map.radius = radius;
  return map;
}

SphereMapEval SphereMapEval::origin_sphere(FieldEval field, double radius) {
  const int dim = field.dim;
  return around(std::move(field), Eigen::VectorXd::Zero(dim), radius);
}

std::string to_string(DegreeMethod method) {
  return method == DegreeMethod::winding ? "winding" : "pl";
}

DegreeReport winding_report(const SphereMapEval& map, int samples) {
  if (map.n() != 1) throw ValidationError("winding numbers are defined for circle maps only");
  if (samples < 16) throw ValidationError("winding needs at least 16 samples");
  constexpr double two_pi = 2.0 * std::numbers::pi;

  int count = samples;
  for (int doubling = 0; doubling <= kMaxWindingDoublings; ++doubling, count *= 2) {
    std::vector<double> phase(count);
    double min_norm = std::numeric_limits<double>::infinity();
    for (int k = 0; k < count; ++k) {
      const double theta = two_pi * k / count;
      const Eigen::VectorXd value = map.raw(Eigen::Vector2d(std::cos(theta), std::sin(theta)));
      const double norm = value.norm();
      if (norm <= map.min_norm_floor) {
        throw MinNormViolation("field norm " + std::to_string(norm) + " at or below floor " +
                                   std::to_string(map.min_norm_floor) + " on the probe circle",
                               to_std(map.center + map.radius *
                                                       Eigen::Vector2d(std::cos(theta), std::sin(theta))),
                               norm);
      }
      min_norm = std::min(min_norm, norm);
      phase[k] = std::atan2(value[1], value[0]);
    }

    double total = 0.0;
    bool too_coarse = false;
    for (int k = 0; k < count; ++k) {
      const double step = std::remainder(phase[(k + 1) % count] - phase[k], two_pi);
      if (std::abs(step) >= std::numbers::pi / 2.0) {
        too_coarse = true;
        break;
      }
      total += step;
    }
    if (too_coarse) continue;

    const double turns = total / two_pi;
    const double nearest = std::round(turns);
    if (std::abs(turns - nearest) < 0.05) {
      DegreeReport report;
      report.degree = static_cast<int>(nearest);
      report.method = DegreeMethod::winding;
      report.min_image_norm = min_norm;
      report.samples = count;
      return report;
    }
  }
  throw ValidationError("winding number did not converge after " +
                        std::to_string(kMaxWindingDoublings) + " density doublings");
}

int winding_number(const SphereMapEval& map, int samples) {
  return winding_report(map, samples).degree;
}

DegreeReport pl_degree(const SphereMapEval& map, const TriangulatedSphere& mesh,
                       std::uint64_t seed, const DegreeOptions& opts) {
  PlRun run;
  run.mesh = &mesh;
  return pl_degree_impl(map, std::move(run), false, seed, opts);
}

DegreeReport degree(const SphereMapEval& map, const DegreeOptions& opts) {
  const int n = map.n();
  if (n < 1 || n > 3) throw ValidationError("degree is computed on S^1, S^2 or S^3");

  auto run_at_level = [&](int level) {
    PlRun run;
    run.owned = cached_mesh(n, level);
    run.mesh = run.owned.get();
    return pl_degree_impl(map, std::move(run), true, opts.seed, opts);
  };

  const int start = std::clamp(opts.start_level, 0, max_mesh_level(n));
  DegreeReport first = run_at_level(start);

  if (n == 1) {
    const DegreeReport winding = winding_report(map, opts.samples);
    if (winding.degree != first.degree) {
      throw CrossCheckError("winding degree " + std::to_string(winding.degree) +
                            " disagrees with PL degree " + std::to_string(first.degree) +
                            " at mesh level " + std::to_string(first.mesh_level));
    }
    first.samples = winding.samples;
    first.cross_checked = true;
    return first;
  }

  if (first.mesh_level + 1 > max_mesh_level(n)) {
    throw ValidationError("cannot cross-check at two consecutive levels: level " +
                          std::to_string(first.mesh_level) + " is already the cap for n = " +
                          std::to_string(n));
  }
  DegreeReport second = run_at_level(first.mesh_level + 1);
  if (second.degree != first.degree) {
    throw CrossCheckError("PL degree " + std::to_string(first.degree) + " at level " +
                          std::to_string(first.mesh_level) + " disagrees with " +
                          std::to_string(second.degree) + " at level " +
                          std::to_string(second.mesh_level));
  }
  second.cross_checked = true;
  return second;
}

}  // namespace degtk
