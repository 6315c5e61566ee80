#include "degtk/morse.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "degtk/errors.hpp"
#include "degtk/sphere_mesh.hpp"

namespace degtk {

namespace {

constexpr double kTangentTol = 1e-9;       // |nu| below this counts as tangent
constexpr double kTangentialZeroTol = 1e-11;
constexpr double kBisectResolution = 1e-10;  // angular resolution for circle zeros
constexpr int kCircleSamples = 720;

double side_sign(const BoundarySphere& b) {
  return b.side == SphereSide::encloses ? 1.0 : -1.0;
}

int chi_sphere(int k) { return k % 2 == 0 ? 2 : 0; }

double surface_distance(const BoundarySphere& b, const Eigen::VectorXd& x) {
  return std::abs((x - b.center).norm() - b.radius);
}

bool strictly_inside(const MorseScenario& scenario, const Eigen::VectorXd& x, double margin) {
  for (const BoundarySphere& b : scenario.boundaries) {
    const double dist = (x - b.center).norm();
    if (b.side == SphereSide::encloses && dist >= b.radius - margin) return false;
    if (b.side == SphereSide::excludes && dist <= b.radius + margin) return false;
  }
  return true;
}

double min_boundary_radius(const MorseScenario& scenario) {
  double r = std::numeric_limits<double>::infinity();
  for (const BoundarySphere& b : scenario.boundaries) r = std::min(r, b.radius);
  return r;
}

std::string format_point(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Boundary sampling: uniform angles on circles, mesh vertices on spheres.
Eigen::MatrixXd boundary_sample_points(const BoundarySphere& b, int dim, int samples,
                                       std::vector<std::vector<int>>* adjacency) {
  if (dim == 2) {
    Eigen::MatrixXd points(samples, 2);
    for (int k = 0; k < samples; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / samples;
      points.row(k) = (b.center + b.radius * Eigen::Vector2d(std::cos(theta), std::sin(theta)))
                          .transpose();
    }
    if (adjacency) {
      adjacency->assign(samples, {});
      for (int k = 0; k < samples; ++k) {
        (*adjacency)[k] = {(k + samples - 1) % samples, (k + 1) % samples};
      }
    }
    return points;
  }

  int level = 0;
  while (4 * (1 << (2 * level)) + 2 < samples && level < max_mesh_level(2)) ++level;
  const auto mesh = cached_mesh(2, level);
  Eigen::MatrixXd points =
      (mesh->vertices * b.radius).rowwise() + b.center.transpose();
  if (adjacency) {
    adjacency->assign(mesh->vertex_count(), {});
    std::vector<std::set<int>> nbr(mesh->vertex_count());
    for (Eigen::Index t = 0; t < mesh->simplices.rows(); ++t) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (i != j) nbr[mesh->simplices(t, i)].insert(mesh->simplices(t, j));
        }
      }
    }
    for (std::size_t v = 0; v < nbr.size(); ++v) {
      (*adjacency)[v].assign(nbr[v].begin(), nbr[v].end());
    }
  }
  return points;
}

struct InteriorIndices {
  int sum = 0;
  std::vector<IndexReport> reports;
};

InteriorIndices interior_indices(const MorseScenario& scenario, const DegreeOptions& opts) {
  const FieldEval eval = FieldEval::from(scenario.field);
  InteriorIndices out;
  for (std::size_t i = 0; i < scenario.interior_zeros.size(); ++i) {
    const Eigen::VectorXd& z = scenario.interior_zeros[i];
    double radius = 1.0;
    for (const BoundarySphere& b : scenario.boundaries) {
      radius = std::min(radius, surface_distance(b, z));
    }
    for (std::size_t j = 0; j < scenario.interior_zeros.size(); ++j) {
      if (j != i) radius = std::min(radius, 0.5 * (z - scenario.interior_zeros[j]).norm());
    }
    IndexReport report = index_at(eval, z, 0.5 * radius, opts);
    out.sum += report.index;
    out.reports.push_back(std::move(report));
  }
  return out;
}

// Orthonormal basis of the tangent plane at unit vector u0 (dim 3).
void tangent_basis(const Eigen::Vector3d& u0, Eigen::Vector3d& t1, Eigen::Vector3d& t2) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(u0[i]) < std::abs(u0[axis])) axis = i;
  }
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e[axis] = 1.0;
  t1 = (e - e.dot(u0) * u0).normalized();
  t2 = u0.cross(t1);
}

// Inverse stereographic chart around u0, with z measured in arc-length-like
// units so the chart is close to an isometry near the origin.
Eigen::Vector3d chart_direction(const Eigen::Vector3d& u0, const Eigen::Vector3d& t1,
                                const Eigen::Vector3d& t2, const Eigen::Vector2d& z,
                                double radius) {
  const Eigen::Vector2d w = z / radius;
  const double q = 0.25 * w.squaredNorm();
  return ((1.0 - q) * u0 + w[0] * t1 + w[1] * t2) / (1.0 + q);
}

// Tangential components of the field in a moving frame derived from (t1, t2);
// the frame is well conditioned for |z| comfortably below the chart radius.
Eigen::Vector2d chart_tangential(const FieldEval& field, const BoundarySphere& b,
                                 const Eigen::Vector3d& u0, const Eigen::Vector3d& t1,
                                 const Eigen::Vector3d& t2, const Eigen::Vector2d& z,
                                 double rho) {
  const Eigen::Vector3d u = chart_direction(u0, t1, t2, z, b.radius);
  const Eigen::Vector3d x = b.center + rho * u;
  const Eigen::Vector3d v = field(x);
  const Eigen::Vector3d f1 = (t1 - t1.dot(u) * u).normalized();
  Eigen::Vector3d f2 = t2 - t2.dot(u) * u;
  f2 = (f2 - f2.dot(f1) * f1).normalized();
  return {v.dot(f1), v.dot(f2)};
}

struct CircleZero {
  double theta = 0.0;
  int index = 0;
};

// Zeros of a scalar field on the circle by sign changes over a uniform grid,
// refined by bisection. Samples landing exactly on a zero take the sign
// pattern of their neighbors.
std::vector<CircleZero> circle_zeros(const std::function<double(double)>& g, double scale) {
  const double tol = kTangentialZeroTol * std::max(1.0, scale);
  std::vector<double> value(kCircleSamples);
  std::vector<int> sign(kCircleSamples);
  for (int k = 0; k < kCircleSamples; ++k) {
    value[k] = g(2.0 * std::numbers::pi * k / kCircleSamples);
    sign[k] = std::abs(value[k]) <= tol ? 0 : (value[k] > 0 ? 1 : -1);
  }

  std::vector<CircleZero> zeros;
  for (int k = 0; k < kCircleSamples; ++k) {
    const int prev = (k + kCircleSamples - 1) % kCircleSamples;
    const int next = (k + 1) % kCircleSamples;
    const double theta = 2.0 * std::numbers::pi * k / kCircleSamples;
    if (sign[k] == 0) {
      if (sign[next] == 0) {
        throw ValidationError("tangential zeros are not isolated at grid resolution near "
                              "angle " + std::to_string(theta));
      }
      int index = 0;
      if (sign[prev] < 0 && sign[next] > 0) index = 1;
      if (sign[prev] > 0 && sign[next] < 0) index = -1;
      zeros.push_back({theta, index});
      continue;
    }
    if (sign[next] == 0 || sign[k] == sign[next]) continue;

    double lo = theta;
    double hi = 2.0 * std::numbers::pi * (k + 1) / kCircleSamples;
    double g_lo = value[k];
    while (hi - lo > kBisectResolution) {
      const double mid = 0.5 * (lo + hi);
      const double g_mid = g(mid);
      if (g_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((g_lo > 0) == (g_mid > 0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    zeros.push_back({0.5 * (lo + hi), sign[next] > 0 ? 1 : -1});
  }
  return zeros;
}

// Side of the boundary partition a zero belongs to, probing a punctured
// neighborhood when the normal component vanishes at the zero itself.
bool zero_is_inward(const std::function<double(int, double)>& nu_probe, int probes) {
  const double at_zero = nu_probe(-1, 0.0);
  if (std::abs(at_zero) >= kTangentTol) return at_zero < 0.0;
  bool any_negative = false;
  bool any_positive = false;
  for (int p = 0; p < probes; ++p) {
    const double v = nu_probe(p, 1e-3);
    if (std::abs(v) < kTangentTol) {
      throw ValidationError("normal component vanishes on a neighborhood of a tangential "
                            "zero; the boundary partition is ill-defined there");
    }
    (v < 0 ? any_negative : any_positive) = true;
  }
  if (any_negative && any_positive) {
    throw ValidationError("tangential zero sits between inward and outward boundary "
                          "regions; its side is ambiguous");
  }
  return any_negative;
}

std::vector<BoundaryZero> circle_boundary_zeros(const MorseScenario& scenario, int bi,
                                                bool& vanishes) {
  const BoundarySphere& b = scenario.boundaries[bi];
  const FieldEval eval = FieldEval::from(scenario.field);
  const double ss = side_sign(b);

  auto point_at = [&](double theta) {
    return Eigen::VectorXd(b.center +
                           b.radius * Eigen::Vector2d(std::cos(theta), std::sin(theta)));
  };
  auto g = [&](double theta) {
    const Eigen::Vector2d t(-std::sin(theta), std::cos(theta));
    return eval(point_at(theta)).dot(t);
  };
  auto nu = [&](double theta) {
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    return ss * eval(point_at(theta)).dot(u);
  };

  double scale = 0.0;
  for (int k = 0; k < kCircleSamples; ++k) {
    scale = std::max(scale, std::abs(g(2.0 * std::numbers::pi * k / kCircleSamples)));
  }
  if (scale <= kTangentialZeroTol) {
    vanishes = true;
    for (int k = 0; k < kCircleSamples; ++k) {
      if (nu(2.0 * std::numbers::pi * k / kCircleSamples) < kTangentTol) {
        throw ValidationError("tangential field vanishes identically on a boundary circle "
                              "that meets the inward region; its zeros are not isolated");
      }
    }
    return {};
  }

  vanishes = false;
  std::vector<BoundaryZero> out;
  for (const CircleZero& z : circle_zeros(g, scale)) {
    BoundaryZero bz;
    bz.point = point_at(z.theta);
    bz.boundary = bi;
    bz.tangential_index = z.index;
    bz.inward = zero_is_inward(
        [&](int probe, double delta) {
          if (probe < 0) return nu(z.theta);
          return nu(probe == 0 ? z.theta - delta : z.theta + delta);
        },
        2);
    out.push_back(std::move(bz));
  }
  return out;
}

std::vector<BoundaryZero> sphere_boundary_zeros(const MorseScenario& scenario, int bi,
                                                bool& vanishes, const DegreeOptions& opts) {
  const BoundarySphere& b = scenario.boundaries[bi];
  const FieldEval eval = FieldEval::from(scenario.field);
  const BoundaryField bf = tangential_field(scenario, b);
  const double R = b.radius;

  std::vector<std::vector<int>> adjacency;
  const Eigen::MatrixXd samples = boundary_sample_points(b, 3, kCircleSamples, &adjacency);
  Eigen::VectorXd tnorm(samples.rows());
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    tnorm[i] = bf.tangential(samples.row(i).transpose()).norm();
  }
  const double scale = tnorm.maxCoeff();

  if (scale <= kTangentialZeroTol) {
    vanishes = true;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      if (bf.normal(samples.row(i).transpose()) < kTangentTol) {
        throw ValidationError("tangential field vanishes identically on a boundary sphere "
                              "that meets the inward region; its zeros are not isolated");
      }
    }
    return {};
  }
  vanishes = false;

  // Seed points: declared hints near this sphere, else local minima of |T|.
  std::vector<Eigen::Vector3d> seeds;
  for (const Eigen::VectorXd& hint : scenario.boundary_seeds) {
    if (surface_distance(b, hint) <= 0.2 * R) {
      seeds.push_back((hint - b.center).normalized());
    }
  }
  if (seeds.empty()) {
    std::vector<std::pair<double, Eigen::Index>> candidates;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      bool local_min = tnorm[i] < 0.1 * scale;
      for (int j : adjacency[i]) local_min = local_min && tnorm[i] <= tnorm[j];
      if (local_min) candidates.emplace_back(tnorm[i], i);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    for (const auto& [val, idx] : candidates) {
      const Eigen::Vector3d dir =
          ((samples.row(idx).transpose() - b.center) / R).eval().normalized();
      bool fresh = true;
      for (const Eigen::Vector3d& s : seeds) fresh = fresh && (s - dir).norm() > 0.25;
      if (fresh && seeds.size() < 64) seeds.push_back(dir);
    }
  }
  if (seeds.empty()) {
    throw ValidationError("tangential field on a boundary sphere has small norm nowhere; "
                          "no zero seeds could be placed despite nonvanishing normal flow");
  }

  // Newton refinement of each seed in its own chart.
  std::vector<Eigen::Vector3d> zeros_u;
  for (const Eigen::Vector3d& seed : seeds) {
    Eigen::Vector3d t1, t2;
    tangent_basis(seed, t1, t2);
    auto F = [&](const Eigen::Vector2d& z) {
      return chart_tangential(eval, b, seed, t1, t2, z, R);
    };
    Eigen::Vector2d z = Eigen::Vector2d::Zero();
    const double h = 1e-7 * R;
    bool converged = false;
    for (int iter = 0; iter < 60; ++iter) {
      const Eigen::Vector2d f = F(z);
      if (f.norm() < 1e-12) {
        converged = true;
        break;
      }
      Eigen::Matrix2d jac;
      for (int j = 0; j < 2; ++j) {
        Eigen::Vector2d dz = Eigen::Vector2d::Zero();
        dz[j] = h;
        jac.col(j) = (F(z + dz) - F(z - dz)) / (2.0 * h);
      }
      const Eigen::Vector2d step = jac.fullPivLu().solve(f);
      if (!step.allFinite()) break;
      z -= step;
      if (z.norm() > R) break;
      if (step.norm() < 1e-14 * R) {
        converged = F(z).norm() < 1e-10;
        break;
      }
    }
    if (!converged && F(z).norm() >= 1e-10) {
      throw ValidationError("tangential zero seed near " +
                            format_point(b.center + R * seed) +
                            " did not converge; declare a better seed");
    }
    zeros_u.push_back(chart_direction(seed, t1, t2, z, R));
  }

  std::sort(zeros_u.begin(), zeros_u.end(), [](const auto& a, const auto& c) {
    return std::lexicographical_compare(a.data(), a.data() + 3, c.data(), c.data() + 3);
  });
  std::vector<Eigen::Vector3d> unique_u;
  for (const Eigen::Vector3d& u : zeros_u) {
    bool fresh = true;
    for (const Eigen::Vector3d& v : unique_u) fresh = fresh && (u - v).norm() > 1e-6;
    if (fresh) unique_u.push_back(u);
  }

  // No zero may hide between the found ones at sampling resolution.
  double min_sep = std::numbers::pi * R;
  for (std::size_t i = 0; i < unique_u.size(); ++i) {
    for (std::size_t j = i + 1; j < unique_u.size(); ++j) {
      const double angle = std::acos(std::clamp(unique_u[i].dot(unique_u[j]), -1.0, 1.0));
      min_sep = std::min(min_sep, R * angle);
    }
  }
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Eigen::Vector3d dir = ((samples.row(i).transpose() - b.center) / R).eval();
    double chord = std::numeric_limits<double>::infinity();
    for (const Eigen::Vector3d& u : unique_u) chord = std::min(chord, (dir - u).norm());
    if (chord > 0.3 && tnorm[i] <= 1e-3 * std::max(1.0, scale)) {
      throw ValidationError("tangential field is nearly zero away from every located zero "
                            "at " + format_point(samples.row(i).transpose()) +
                            "; a zero is likely missing a seed");
    }
  }

  std::vector<BoundaryZero> out;
  for (const Eigen::Vector3d& u : unique_u) {
    Eigen::Vector3d t1, t2;
    tangent_basis(u, t1, t2);
    const double r_chart = std::min(0.3 * R, 0.45 * min_sep);
    const FieldEval chart_field = FieldEval::opaque(2, [=](const Eigen::VectorXd& z) {
      return Eigen::VectorXd(
          chart_tangential(eval, b, u, t1, t2, Eigen::Vector2d(z[0], z[1]), R));
    });

    BoundaryZero bz;
    bz.point = b.center + R * u;
    bz.boundary = bi;
    bz.tangential_index =
        index_at(chart_field, Eigen::Vector2d::Zero(), r_chart, opts).index;
    bz.inward = zero_is_inward(
        [&](int probe, double delta) {
          if (probe < 0) return bf.normal(bz.point);
          Eigen::Vector2d dz = Eigen::Vector2d::Zero();
          dz[probe % 2] = (probe < 2 ? delta : -delta) * R;
          const Eigen::Vector3d dir = chart_direction(u, t1, t2, dz, R);
          return bf.normal(b.center + R * dir);
        },
        4);
    out.push_back(std::move(bz));
  }
  return out;
}

// Doubled-field chart around one boundary zero: coordinates (z, s) with z
// along the boundary and s the signed collar depth, the original region on
// s > 0 and its mirror on s < 0. The normal component is damped by
// smooth_step and reflected with odd symmetry.
FieldEval doubled_chart_field(const MorseScenario& scenario, const BoundarySphere& b,
                              const Eigen::VectorXd& p, double width) {
  const double ss = side_sign(b);
  const double R = b.radius;
  const int dim = scenario.dim;
  const PolyField field = scenario.field;

  if (dim == 2) {
    const Eigen::Vector2d u0 = ((p - b.center) / R).eval().normalized();
    const Eigen::Vector2d t0(-u0[1], u0[0]);
    const Eigen::Vector2d c = b.center;
    return FieldEval::opaque(2, [=](const Eigen::VectorXd& zeta) {
      const double phi = zeta[0] / R;
      const double s = zeta[1];
      const double as = std::abs(s);
      const double sgn = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
      const Eigen::Vector2d y = std::cos(phi) * u0 + std::sin(phi) * t0;
      const Eigen::Vector2d tau = -std::sin(phi) * u0 + std::cos(phi) * t0;
      const double rho = R - ss * as;
      const Eigen::Vector2d v = field.eval(c + rho * y);
      const double nu = ss * v.dot(y);
      return Eigen::VectorXd(
          Eigen::Vector2d(v.dot(tau), sgn * smooth_step(as / width) * -nu));
    });
  }

  const Eigen::Vector3d u0 = ((p - b.center) / R).eval().normalized();
  Eigen::Vector3d t1, t2;
  tangent_basis(u0, t1, t2);
  const Eigen::Vector3d c = b.center;
  return FieldEval::opaque(3, [=](const Eigen::VectorXd& zeta) {
    const Eigen::Vector2d z(zeta[0], zeta[1]);
    const double s = zeta[2];
    const double as = std::abs(s);
    const double sgn = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
    const Eigen::Vector3d u = chart_direction(u0, t1, t2, z, R);
    const double rho = R - ss * as;
    const Eigen::Vector3d v = field.eval(c + rho * u);
    const double nu = ss * v.dot(u);
    const Eigen::Vector3d f1 = (t1 - t1.dot(u) * u).normalized();
    Eigen::Vector3d f2 = t2 - t2.dot(u) * u;
    f2 = (f2 - f2.dot(f1) * f1).normalized();
    return Eigen::VectorXd(Eigen::Vector3d(v.dot(f1), v.dot(f2),
                                           sgn * smooth_step(as / width) * -nu));
  });
}

}  // namespace

double default_collar_width(const MorseScenario& scenario) {
  return 0.2 * min_boundary_radius(scenario);
}

void validate_scenario(const MorseScenario& scenario) {
  if (scenario.dim != 2 && scenario.dim != 3) {
    throw ValidationError("scenarios live in dimension 2 or 3");
  }
  if (scenario.field.dim_domain() != scenario.dim ||
      scenario.field.dim_out() != scenario.dim) {
    throw ValidationError("scenario field must map R^" + std::to_string(scenario.dim) +
                          " to itself");
  }
  if (scenario.boundaries.empty()) throw ValidationError("scenario needs a boundary sphere");

  int enclosing = -1;
  for (std::size_t i = 0; i < scenario.boundaries.size(); ++i) {
    const BoundarySphere& b = scenario.boundaries[i];
    if (b.center.size() != scenario.dim) {
      throw ValidationError("boundary sphere center dimension mismatch");
    }
    if (!(b.radius > 0.0)) throw ValidationError("boundary sphere radius must be positive");
    if (b.side == SphereSide::encloses) {
      if (enclosing >= 0) throw ValidationError("scenario has more than one enclosing sphere");
      enclosing = static_cast<int>(i);
    }
  }
  if (enclosing < 0) throw ValidationError("scenario has no enclosing sphere");

  const BoundarySphere& outer = scenario.boundaries[enclosing];
  for (std::size_t i = 0; i < scenario.boundaries.size(); ++i) {
    const BoundarySphere& b = scenario.boundaries[i];
    if (b.side != SphereSide::excludes) continue;
    if ((b.center - outer.center).norm() + b.radius >= outer.radius - 1e-9) {
      throw ValidationError("excluded sphere is not strictly inside the enclosing one");
    }
    for (std::size_t j = i + 1; j < scenario.boundaries.size(); ++j) {
      const BoundarySphere& o = scenario.boundaries[j];
      if (o.side != SphereSide::excludes) continue;
      if ((b.center - o.center).norm() <= b.radius + o.radius + 1e-9) {
        throw ValidationError("excluded spheres overlap");
      }
    }
  }

  const int holes = static_cast<int>(scenario.boundaries.size()) - 1;
  const int chi_bd_expected =
      (holes + 1) * chi_sphere(scenario.dim - 1);
  const int chi_m_expected =
      scenario.dim == 2 ? 1 - holes : 1 + holes;
  if (scenario.chi_m != chi_m_expected) {
    throw ValidationError("declared chi_M = " + std::to_string(scenario.chi_m) +
                          " does not match this geometry (expected " +
                          std::to_string(chi_m_expected) + ")");
  }
  if (scenario.chi_boundary != chi_bd_expected) {
    throw ValidationError("declared chi_boundary = " + std::to_string(scenario.chi_boundary) +
                          " does not match this geometry (expected " +
                          std::to_string(chi_bd_expected) + ")");
  }

  for (const Eigen::VectorXd& z : scenario.interior_zeros) {
    if (z.size() != scenario.dim) throw ValidationError("declared zero dimension mismatch");
    if (!strictly_inside(scenario, z, 1e-6)) {
      throw ValidationError("declared zero " + format_point(z) +
                            " is not in the interior of the region");
    }
    const double norm = scenario.field.eval(z).norm();
    if (!(norm < 1e-9)) {
      throw ValidationError("declared zero " + format_point(z) +
                            " is not a zero: field norm there is " + std::to_string(norm));
    }
  }
  for (const Eigen::VectorXd& s : scenario.boundary_seeds) {
    if (s.size() != scenario.dim) throw ValidationError("boundary seed dimension mismatch");
  }

  // The field may not vanish on the boundary itself.
  for (const BoundarySphere& b : scenario.boundaries) {
    const Eigen::MatrixXd pts =
        boundary_sample_points(b, scenario.dim, kCircleSamples, nullptr);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double norm = scenario.field.eval(pts.row(i).transpose()).norm();
      if (norm <= kTangentTol) {
        throw ValidationError("field vanishes on the boundary at " +
                              format_point(pts.row(i).transpose()));
      }
    }
  }

  // Grid screening for zeros nobody declared. Resolution-bounded, so a
  // soundness check at this scale rather than a proof.
  const double r_min = min_boundary_radius(scenario);
  const double step = 0.02 * r_min;
  const double guard = 0.1 * r_min;
  const Eigen::VectorXd lo = outer.center.array() - outer.radius;
  const int steps = static_cast<int>(std::floor(2.0 * outer.radius / step)) + 1;
  Eigen::VectorXd x(scenario.dim);
  const int plane = scenario.dim == 3 ? steps : 1;
  for (int k = 0; k < plane; ++k) {
    for (int j = 0; j < steps; ++j) {
      for (int i = 0; i < steps; ++i) {
        x[0] = lo[0] + step * i;
        x[1] = lo[1] + step * j;
        if (scenario.dim == 3) x[2] = lo[2] + step * k;
        if (!strictly_inside(scenario, x, 1e-9)) continue;
        bool near_declared = false;
        for (const Eigen::VectorXd& z : scenario.interior_zeros) {
          near_declared = near_declared || (x - z).norm() < guard;
        }
        if (near_declared) continue;
        const double norm = scenario.field.eval(x).norm();
        if (norm <= scenario.min_norm_floor) {
          throw ValidationError("field norm " + std::to_string(norm) +
                                " at undeclared point " + format_point(x) +
                                " is below the screening floor " +
                                std::to_string(scenario.min_norm_floor));
        }
      }
    }
  }
}

std::vector<BoundarySigns> classify_boundary(const MorseScenario& scenario, int samples) {
  if (samples < 8) throw ValidationError("boundary classification needs at least 8 samples");
  std::vector<BoundarySigns> out;
  for (std::size_t bi = 0; bi < scenario.boundaries.size(); ++bi) {
    const BoundarySphere& b = scenario.boundaries[bi];
    const double ss = side_sign(b);
    std::vector<std::vector<int>> adjacency;
    BoundarySigns signs;
    signs.boundary = static_cast<int>(bi);
    signs.points = boundary_sample_points(b, scenario.dim, samples, &adjacency);
    signs.nu.resize(signs.points.rows());
    for (Eigen::Index i = 0; i < signs.points.rows(); ++i) {
      const Eigen::VectorXd x = signs.points.row(i).transpose();
      const Eigen::VectorXd u = (x - b.center) / b.radius;
      signs.nu[i] = ss * scenario.field.eval(x).dot(u);
      if (signs.nu[i] < -kTangentTol) ++signs.negative;
      if (signs.nu[i] > kTangentTol) ++signs.positive;
    }
    for (Eigen::Index i = 0; i < signs.nu.size(); ++i) {
      if (std::abs(signs.nu[i]) > kTangentTol) continue;
      bool all_tangent = true;
      for (int j : adjacency[i]) all_tangent = all_tangent && std::abs(signs.nu[j]) <= kTangentTol;
      if (all_tangent) {
        throw ValidationError("field is tangent to the boundary on a whole neighborhood of " +
                              format_point(signs.points.row(i).transpose()) +
                              "; the scenario is not transverse");
      }
    }
    out.push_back(std::move(signs));
  }
  return out;
}

BoundaryField tangential_field(const MorseScenario& scenario, const BoundarySphere& boundary) {
  const double ss = side_sign(boundary);
  const PolyField field = scenario.field;
  const BoundarySphere b = boundary;
  BoundaryField out;
  out.tangential = FieldEval::opaque(scenario.dim, [field, b](const Eigen::VectorXd& x) {
    const Eigen::VectorXd u = (x - b.center).normalized();
    const Eigen::VectorXd v = field.eval(b.center + b.radius * u);
    return Eigen::VectorXd(v - v.dot(u) * u);
  });
  out.normal = [field, b, ss](const Eigen::VectorXd& x) {
    const Eigen::VectorXd u = (x - b.center).normalized();
    return ss * field.eval(b.center + b.radius * u).dot(u);
  };
  return out;
}

BoundaryAnalysis boundary_indices(const MorseScenario& scenario, const DegreeOptions& opts) {
  BoundaryAnalysis analysis;
  analysis.tangential_vanishes.assign(scenario.boundaries.size(), false);
  for (std::size_t bi = 0; bi < scenario.boundaries.size(); ++bi) {
    bool vanishes = false;
    std::vector<BoundaryZero> zeros =
        scenario.dim == 2
            ? circle_boundary_zeros(scenario, static_cast<int>(bi), vanishes)
            : sphere_boundary_zeros(scenario, static_cast<int>(bi), vanishes, opts);
    analysis.tangential_vanishes[bi] = vanishes;
    if (!vanishes) {
      int total = 0;
      for (const BoundaryZero& z : zeros) total += z.tangential_index;
      const int expected = chi_sphere(scenario.dim - 1);
      if (total != expected) {
        throw CrossCheckError("tangential indices on boundary " + std::to_string(bi) +
                              " sum to " + std::to_string(total) + ", expected " +
                              std::to_string(expected));
      }
    }
    analysis.zeros.insert(analysis.zeros.end(), zeros.begin(), zeros.end());
  }
  return analysis;
}

double smooth_step(double s) {
  if (!(s >= 0.0) || s >= 1.0) {
    throw ValidationError("smooth step is defined on [0, 1)");
  }
  const double u = 2.0 * s;
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const auto e = [](double t) { return std::exp(-1.0 / t); };
  return e(u) / (e(u) + e(1.0 - u));
}

DoublingReport double_check(const MorseScenario& scenario, double collar_width,
                            const DegreeOptions& opts) {
  validate_scenario(scenario);
  const double r_min = min_boundary_radius(scenario);
  const double width = collar_width > 0.0 ? collar_width : default_collar_width(scenario);
  if (width > 0.5 * r_min) {
    throw ValidationError("collar width " + std::to_string(width) +
                          " exceeds half the smallest boundary radius");
  }

  for (const Eigen::VectorXd& z : scenario.interior_zeros) {
    for (const BoundarySphere& b : scenario.boundaries) {
      if (surface_distance(b, z) <= width) {
        throw ValidationError("collar of width " + std::to_string(width) +
                              " contains the interior zero " + format_point(z));
      }
    }
  }
  for (std::size_t i = 0; i < scenario.boundaries.size(); ++i) {
    for (std::size_t j = 0; j < scenario.boundaries.size(); ++j) {
      if (i == j) continue;
      const BoundarySphere& a = scenario.boundaries[i];
      const BoundarySphere& b = scenario.boundaries[j];
      const double d = (a.center - b.center).norm();
      if (a.side == SphereSide::encloses && b.side == SphereSide::excludes &&
          d + b.radius + width >= a.radius - width) {
        throw ValidationError("collars of nested boundary spheres overlap at width " +
                              std::to_string(width));
      }
      if (i < j && a.side == SphereSide::excludes && b.side == SphereSide::excludes &&
          d <= a.radius + b.radius + 2.0 * width) {
        throw ValidationError("collars of excluded spheres overlap at width " +
                              std::to_string(width));
      }
    }
  }

  classify_boundary(scenario);
  const BoundaryAnalysis analysis = boundary_indices(scenario, opts);
  const InteriorIndices interior = interior_indices(scenario, opts);

  DoublingReport report;
  report.collar_width = width;
  report.doubled_sum = 2LL * interior.sum;
  for (const BoundaryZero& z : analysis.zeros) {
    report.doubled_sum += (z.inward ? 1 : -1) * z.tangential_index;
  }
  for (std::size_t bi = 0; bi < analysis.tangential_vanishes.size(); ++bi) {
    if (analysis.tangential_vanishes[bi]) {
      // The doubled field vanishes along the whole glued sphere; the normal
      // flow is attracting on both sides, so the component contributes the
      // sphere's Euler characteristic with a minus sign.
      report.doubled_sum -= chi_sphere(scenario.dim - 1);
      report.degenerate_boundaries.push_back(static_cast<int>(bi));
    }
  }
  report.target = 2 * scenario.chi_m - scenario.chi_boundary;
  report.identity_holds = report.doubled_sum == report.target;

  // Re-derive one zero per boundary side directly from the doubled field.
  const BoundaryZero* pick_inward = nullptr;
  const BoundaryZero* pick_outward = nullptr;
  for (const BoundaryZero& z : analysis.zeros) {
    if (z.inward && !pick_inward) pick_inward = &z;
    if (!z.inward && !pick_outward) pick_outward = &z;
  }
  for (const BoundaryZero* pick : {pick_inward, pick_outward}) {
    if (!pick) continue;
    const BoundarySphere& b = scenario.boundaries[pick->boundary];
    double min_sep = std::numbers::pi * b.radius;
    for (const BoundaryZero& other : analysis.zeros) {
      if (other.boundary != pick->boundary || &other == pick) continue;
      const double chord = (other.point - pick->point).norm() / b.radius;
      const double angle = 2.0 * std::asin(std::clamp(0.5 * chord, 0.0, 1.0));
      min_sep = std::min(min_sep, b.radius * angle);
    }
    const double r_spot = std::min({0.99 * width, 0.45 * min_sep, 0.5 * b.radius});
    const FieldEval doubled = doubled_chart_field(scenario, b, pick->point, width);
    SpotCheck spot;
    spot.point = pick->point;
    spot.boundary = pick->boundary;
    spot.inward = pick->inward;
    spot.predicted = (pick->inward ? 1 : -1) * pick->tangential_index;
    spot.computed =
        index_at(doubled, Eigen::VectorXd::Zero(scenario.dim), r_spot, opts).index;
    spot.matches = spot.computed == spot.predicted;
    if (!spot.matches) {
      throw CrossCheckError("doubled field near " + format_point(pick->point) +
                            " has index " + std::to_string(spot.computed) +
                            " but the reflection rule predicts " +
                            std::to_string(spot.predicted));
    }
    report.spot_checks.push_back(std::move(spot));
  }
  return report;
}

MorseReport morse_check(const MorseScenario& scenario, const DegreeOptions& opts) {
  validate_scenario(scenario);
  classify_boundary(scenario);

  MorseReport report;
  report.name = scenario.name;
  report.boundary = boundary_indices(scenario, opts);
  InteriorIndices interior = interior_indices(scenario, opts);
  report.ind_v = interior.sum;
  report.interior = std::move(interior.reports);
  for (const BoundaryZero& z : report.boundary.zeros) {
    if (z.inward) report.ind_dminus_v += z.tangential_index;
  }
  report.chi_m = scenario.chi_m;
  report.formula_holds = report.ind_v + report.ind_dminus_v == report.chi_m;
  return report;
}

MorseReport run_scenario(const MorseScenario& scenario, double collar_width,
                         const DegreeOptions& opts) {
  MorseReport report = morse_check(scenario, opts);
  report.doubling = double_check(scenario, collar_width, opts);
  report.has_doubling = true;
  return report;
}

}  // namespace degtk
