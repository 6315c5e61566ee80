#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

#include "degtk/errors.hpp"

namespace degtk {

// All randomness in the library flows through this sampler: an mt19937_64
// stream turned into uniform doubles in (0, 1] by taking the top 53 bits, then
// into Gaussians via Box-Muller. The construction is spelled out here (rather
// than using distribution classes) so identical seeds give identical draws on
// every platform.
class UnitSphereSampler {
public:
  explicit UnitSphereSampler(std::uint64_t seed) : rng_(seed) {}

  double next_uniform() {
    return static_cast<double>((rng_() >> 11) + 1) * (1.0 / 9007199254740992.0);
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd next_unit(int dim) {
    if (dim < 1) throw ValidationError("unit sample dimension must be positive");
    for (int attempt = 0; attempt < 64; ++attempt) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = next_gaussian();
      const double norm = v.norm();
      if (norm > 1e-6) return v / norm;
    }
    throw ValidationError("unit sphere sampling failed to produce a usable vector");
  }

private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace degtk
