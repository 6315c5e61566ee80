#include <doctest.h>

#include <Eigen/Dense>

#include "degtk/constructors.hpp"
#include "degtk/errors.hpp"
#include "degtk/fields.hpp"
#include "degtk/index.hpp"
#include "degtk/rng.hpp"
#include "oracles.hpp"

using namespace degtk;

namespace {

// Rejection-sampled Gaussian matrices, kept away from singularity in both
// senses: determinant bounded below and condition number bounded above, so
// the normalized images stay resolvable within the mesh level caps.
Eigen::MatrixXd random_invertible(int dim, std::uint64_t seed) {
  UnitSphereSampler rng(seed);
  while (true) {
    Eigen::MatrixXd a(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) a(i, j) = rng.next_gaussian();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (std::abs(a.determinant()) > 0.1 && sv.maxCoeff() < 4.0 * sv.minCoeff()) return a;
  }
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("linear zeros carry the sign of the determinant") {
  const FieldEval saddle = FieldEval::from(linear_field(Eigen::Vector2d(1, -1).asDiagonal()));
  const IndexReport report = index_at(saddle, Eigen::Vector2d::Zero(), 0.5);
  CHECK(report.index == -1);
  CHECK(report.radius == 0.5);
  CHECK(report.degree_report.mesh_level >= 0);

  for (int dim : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const Eigen::MatrixXd a = random_invertible(dim, 31 * dim + seed);
      const IndexReport r =
          index_at(FieldEval::from(linear_field(a)), Eigen::VectorXd::Zero(dim), 0.75);
      CHECK(r.index == oracle::det_sign(a));
    }
  }
}

TEST_CASE("degenerate power zeros have index m") {
  for (int m = 1; m <= 5; ++m) {
    const IndexReport r =
        index_at(FieldEval::from(power_pair(m)), Eigen::Vector2d::Zero(), 1.0);
    CHECK(r.index == m);
  }
  // The zeroth power is the constant field (1, 0), so the origin is not a
  // zero and the declared-zero validation must refuse it.
  CHECK_THROWS_AS(index_at(FieldEval::from(power_pair(0)), Eigen::Vector2d::Zero(), 1.0),
                  ValidationError);
}

TEST_CASE("a translated zero is probed around its own center") {
  std::vector<Component> comps(3);
  for (int i = 0; i < 3; ++i) {
    std::vector<int> e(3, 0);
    e[i] = 1;
    comps[i].push_back(Monomial{1.0, std::move(e)});
  }
  comps[1].push_back(Monomial{0.7, {0, 0, 0}});
  const PolyField field(3, std::move(comps));
  const IndexReport r =
      index_at(FieldEval::from(field), Eigen::Vector3d(0.0, -0.7, 0.0), 0.4);
  CHECK(r.index == 1);
}

TEST_CASE("non-zeros and bad radii are rejected") {
  const FieldEval id = FieldEval::from(identity_field(2));
  CHECK_THROWS_AS(index_at(id, Eigen::Vector2d(0.5, 0.0), 0.25), ValidationError);
  CHECK_THROWS_AS(index_at(id, Eigen::Vector2d::Zero(), 0.0), ValidationError);
  CHECK_THROWS_AS(index_at(id, Eigen::Vector3d::Zero(), 0.5), ValidationError);
}

TEST_CASE("suspension relation for power fields") {
  for (int m = 0; m <= 4; ++m) {
    for (int sign : {1, -1}) {
      const Lemma21Report r = check_lemma21(power_pair(m), sign, 0.5);
      CHECK(r.base_index == m);
      CHECK(r.suspended_index == sign * m);
      CHECK(r.sign == sign);
      CHECK(r.relation_holds);
      CHECK(r.sign_condition_min > 0.0);
    }
  }
}

TEST_CASE("suspension relation for random linear fields") {
  for (int dim : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Eigen::MatrixXd a = random_invertible(dim, 57 * dim + seed);
      const int base = oracle::det_sign(a);
      for (int sign : {1, -1}) {
        const Lemma21Report r = check_lemma21(linear_field(a), sign, 0.5);
        CHECK(r.base_index == base);
        CHECK(r.suspended_index == sign * base);
        CHECK(r.relation_holds);
      }
    }
  }
}

TEST_CASE("suspension input validation") {
  CHECK_THROWS_AS(check_lemma21(power_pair(1), 0, 0.5), ValidationError);
  CHECK_THROWS_AS(check_lemma21(PolyField(1, {{Monomial{1.0, {1}}}}), 1, 0.5), ValidationError);
  CHECK_THROWS_AS(check_lemma21(identity_field(4), 1, 0.5), ValidationError);
}

TEST_CASE("homotopy scan of identical fields never dips") {
  const FieldEval id = FieldEval::from(identity_field(3));
  const HomotopyScanReport r = verify_homotopy_nonvanishing(id, id, 0.1, 20);
  CHECK(r.min_norm == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.grid == 20);
  CHECK(r.mesh_level == 4);
  CHECK(r.witness_t >= 0.0);
  CHECK(r.witness_t <= 1.0);
}

TEST_CASE("homotopy scan finds the reflection cancellation") {
  // (1-t)*(x, y) + t*(x, -y) = (x, (1-2t)y) vanishes at x = 0, t = 1/2.
  const FieldEval v = FieldEval::from(identity_field(2));
  const FieldEval w = FieldEval::from(linear_field(Eigen::Vector2d(1, -1).asDiagonal()));
  const HomotopyScanReport r = verify_homotopy_nonvanishing(v, w, 0.1, 20);
  CHECK(r.min_norm < 1e-12);
  CHECK(r.witness_t == 0.5);
  CHECK(std::abs(r.witness_x[0]) < 1e-12);
  CHECK(std::abs(std::abs(r.witness_x[1]) - 0.1) < 1e-12);
}

TEST_CASE("homotopy scan input validation") {
  const FieldEval v = FieldEval::from(identity_field(2));
  const FieldEval w3 = FieldEval::from(identity_field(3));
  CHECK_THROWS_AS(verify_homotopy_nonvanishing(v, w3, 0.1, 20), ValidationError);
  CHECK_THROWS_AS(verify_homotopy_nonvanishing(v, v, -0.1, 20), ValidationError);
  CHECK_THROWS_AS(verify_homotopy_nonvanishing(v, v, 0.1, 0), ValidationError);
  const FieldEval v1 = FieldEval::from(PolyField(1, {{Monomial{1.0, {1}}}}));
  CHECK_THROWS_AS(verify_homotopy_nonvanishing(v1, v1, 0.1, 20), ValidationError);
}

}  // TEST_SUITE
