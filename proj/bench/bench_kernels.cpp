// Times each kernel's serial reference against the OpenMP variant on a large
// mesh and reports the speedup. Results are checked for equality on the way,
// so a silent divergence between the two paths shows up here too.

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "degtk/constructors.hpp"
#include "degtk/fields.hpp"
#include "degtk/kernels.hpp"
#include "degtk/rng.hpp"
#include "degtk/sphere_mesh.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace degtk;

namespace {

template <typename F>
double time_best_of(int repeats, const F& work) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    work();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    best = std::min(best, elapsed);
  }
  return best;
}

void print_row(const std::string& name, double serial, double parallel, bool equal) {
  std::printf("%-22s %10.4f ms %10.4f ms %7.2fx  %s\n", name.c_str(), serial * 1e3,
              parallel * 1e3, serial / parallel, equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int level = argc > 1 ? std::atoi(argv[1]) : 6;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  if (level < 0 || level > max_mesh_level(2) || repeats < 1) {
    std::fprintf(stderr, "usage: %s [mesh-level (0..%d)] [repeats]\n", argv[0],
                 max_mesh_level(2));
    return 1;
  }

  const auto mesh = cached_mesh(2, level);
  std::printf("mesh: S^2 level %d, %lld vertices, %lld triangles\n",
              level, static_cast<long long>(mesh->vertices.rows()),
              static_cast<long long>(mesh->simplices.rows()));
#ifdef _OPENMP
  std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
  std::printf("openmp: unavailable, parallel policy falls back to serial\n");
#endif
  std::printf("%-22s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

  // A dense degree-3 field keeps per-vertex work realistic for the evaluation
  // kernels instead of reducing them to memory traffic.
  const PolyField cubic = suspend_field(power_pair(3), 1);
  const FieldEval field = FieldEval::from(cubic);
  const Eigen::VectorXd center = Eigen::Vector3d(0.05, -0.02, 0.01);

  const VertexImages serial_images =
      normalized_images(field, center, 0.8, mesh->vertices, ExecPolicy::serial);
  VertexImages parallel_images;
  const double t_images_s = time_best_of(repeats, [&] {
    normalized_images(field, center, 0.8, mesh->vertices, ExecPolicy::serial);
  });
  const double t_images_p = time_best_of(repeats, [&] {
    parallel_images = normalized_images(field, center, 0.8, mesh->vertices, ExecPolicy::parallel);
  });
  print_row("normalized_images", t_images_s, t_images_p,
            serial_images.images == parallel_images.images &&
                serial_images.argmin == parallel_images.argmin &&
                serial_images.min_raw_norm == parallel_images.min_raw_norm);

  const double diam_serial =
      max_image_diameter(serial_images.images, mesh->simplices, ExecPolicy::serial);
  double diam_parallel = 0.0;
  const double t_diam_s = time_best_of(repeats, [&] {
    max_image_diameter(serial_images.images, mesh->simplices, ExecPolicy::serial);
  });
  const double t_diam_p = time_best_of(repeats, [&] {
    diam_parallel = max_image_diameter(serial_images.images, mesh->simplices, ExecPolicy::parallel);
  });
  print_row("max_image_diameter", t_diam_s, t_diam_p, diam_serial == diam_parallel);

  UnitSphereSampler sampler(17);
  const Eigen::VectorXd target = sampler.next_unit(3);
  const CoverageResult cover_serial =
      coverage_sum(serial_images.images, mesh->simplices, target, 1e-9, ExecPolicy::serial);
  CoverageResult cover_parallel;
  const double t_cover_s = time_best_of(repeats, [&] {
    coverage_sum(serial_images.images, mesh->simplices, target, 1e-9, ExecPolicy::serial);
  });
  const double t_cover_p = time_best_of(repeats, [&] {
    cover_parallel =
        coverage_sum(serial_images.images, mesh->simplices, target, 1e-9, ExecPolicy::parallel);
  });
  print_row("coverage_sum", t_cover_s, t_cover_p,
            cover_serial.signed_sum == cover_parallel.signed_sum &&
                cover_serial.non_generic == cover_parallel.non_generic);

  const PolyField other = suspend_field(power_pair(2), -1);
  const VertexImages b_images = normalized_images(FieldEval::from(other), center, 0.8,
                                                  mesh->vertices, ExecPolicy::serial);
  const int grid = 48;
  const ArgMin pair_serial =
      pair_min_norm(serial_images.images, b_images.images, grid, ExecPolicy::serial);
  ArgMin pair_parallel;
  const double t_pair_s = time_best_of(repeats, [&] {
    pair_min_norm(serial_images.images, b_images.images, grid, ExecPolicy::serial);
  });
  const double t_pair_p = time_best_of(repeats, [&] {
    pair_parallel = pair_min_norm(serial_images.images, b_images.images, grid, ExecPolicy::parallel);
  });
  print_row("pair_min_norm", t_pair_s, t_pair_p,
            pair_serial.value == pair_parallel.value && pair_serial.index == pair_parallel.index);

  const Eigen::MatrixXd points = 0.8 * mesh->vertices;
  const ArgMin scan_serial = min_norm_over_points(field, points, ExecPolicy::serial);
  ArgMin scan_parallel;
  const double t_scan_s = time_best_of(repeats, [&] {
    min_norm_over_points(field, points, ExecPolicy::serial);
  });
  const double t_scan_p = time_best_of(repeats, [&] {
    scan_parallel = min_norm_over_points(field, points, ExecPolicy::parallel);
  });
  print_row("min_norm_over_points", t_scan_s, t_scan_p,
            scan_serial.value == scan_parallel.value && scan_serial.index == scan_parallel.index);

  const bool all_equal =
      serial_images.images == parallel_images.images && diam_serial == diam_parallel &&
      cover_serial.signed_sum == cover_parallel.signed_sum &&
      pair_serial.value == pair_parallel.value && scan_serial.value == scan_parallel.value;
  return all_equal ? 0 : 1;
}
