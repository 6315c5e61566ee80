#include <doctest.h>

#include <Eigen/Dense>

#include <complex>
#include <sstream>

#include "degtk/constructors.hpp"
#include "degtk/degree.hpp"
#include "degtk/errors.hpp"
#include "degtk/fields.hpp"
#include "degtk/index.hpp"
#include "degtk/rng.hpp"
#include "oracles.hpp"

using namespace degtk;

TEST_SUITE("constructors") {

TEST_CASE("power pairs match repeated complex multiplication") {
  UnitSphereSampler rng(2024);
  for (int m = 0; m <= 8; ++m) {
    const PolyField pair = power_pair(m);
    for (int trial = 0; trial < 12; ++trial) {
      const double x = 1.5 * rng.next_gaussian();
      const double y = 1.5 * rng.next_gaussian();
      const std::complex<double> expected = oracle::complex_power(x, y, m);
      const Eigen::Vector2d got = pair.eval(Eigen::Vector2d(x, y));
      CHECK(got[0] == doctest::Approx(expected.real()).epsilon(1e-12));
      CHECK(got[1] == doctest::Approx(expected.imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("power pair coefficients are alternating binomials") {
  const PolyField p4 = power_pair(4);
  // x^4 - 6 x^2 y^2 + y^4 and 4 x^3 y - 4 x y^3.
  const Component expected_real = {Monomial{1.0, {0, 4}}, Monomial{-6.0, {2, 2}},
                                   Monomial{1.0, {4, 0}}};
  const Component expected_imag = {Monomial{-4.0, {1, 3}}, Monomial{4.0, {3, 1}}};
  CHECK(p4.components()[0] == expected_real);
  CHECK(p4.components()[1] == expected_imag);

  for (int m = 0; m <= 10; ++m) {
    const PolyField pm = power_pair(m);
    for (const Monomial& mono : pm.components()[0]) {
      const int k = mono.exponents[1];
      const double magnitude = static_cast<double>(oracle::binomial(m, k));
      CHECK(std::abs(mono.coeff) == magnitude);
    }
  }

  CHECK_THROWS_AS(power_pair(-1), ValidationError);
  CHECK_THROWS_AS(power_pair(41), ValidationError);
}

TEST_CASE("negative circle powers conjugate the pair") {
  UnitSphereSampler rng(9);
  for (int m = 1; m <= 4; ++m) {
    const AlphaSpec spec = build_alpha(1, -m);
    for (int trial = 0; trial < 8; ++trial) {
      const double x = rng.next_gaussian();
      const double y = rng.next_gaussian();
      const std::complex<double> expected = oracle::complex_power(x, y, -m);
      const Eigen::Vector2d got = spec.realized_field.eval(Eigen::Vector2d(x, y));
      CHECK(got[0] == doctest::Approx(expected.real()).epsilon(1e-12));
      CHECK(got[1] == doctest::Approx(expected.imag()).epsilon(1e-12));
    }
  }
}

TEST_CASE("alpha fields are suspensions of the power pair up to relabeling") {
  for (int m = 0; m <= 4; ++m) {
    CHECK(permute_field(build_alpha(2, m).realized_field, {2, 0, 1}) ==
          suspend_field(power_pair(m), 1));
    CHECK(permute_field(build_alpha(3, m).realized_field, {2, 3, 0, 1}) ==
          suspend_field(suspend_field(power_pair(m), 1), 1));
    if (m > 0) {
      CHECK(permute_field(build_alpha(2, -m).realized_field, {2, 0, 1}) ==
            suspend_field(power_pair(m), -1));
      CHECK(permute_field(build_alpha(3, -m).realized_field, {2, 3, 0, 1}) ==
            suspend_field(suspend_field(power_pair(m), -1), 1));
    }
  }
}

TEST_CASE("indices are invariant under coordinate relabeling") {
  const PolyField base = power_pair(2);
  const PolyField swapped = permute_field(base, {1, 0});
  const int original = index_at(FieldEval::from(base), Eigen::Vector2d::Zero(), 1.0).index;
  const int relabeled =
      index_at(FieldEval::from(swapped), Eigen::Vector2d::Zero(), 1.0).index;
  CHECK(original == 2);
  CHECK(relabeled == original);
}

TEST_CASE("equator restriction agrees with the suspension relation") {
  for (int m = 1; m <= 2; ++m) {
    const PolyField alpha = permute_field(build_alpha(2, m).realized_field, {2, 0, 1});
    const PolyField restricted = restrict_field(alpha);
    CHECK(restricted == power_pair(m));
    const Lemma21Report r = check_lemma21(restricted, 1, 1.0);
    CHECK(r.relation_holds);
    CHECK(r.suspended_index == m);
    const int direct =
        index_at(FieldEval::from(build_alpha(2, m).realized_field), Eigen::Vector3d::Zero(), 1.0)
            .index;
    CHECK(direct == r.suspended_index);
  }
}

TEST_CASE("degree table realizes every requested degree") {
  const std::vector<DegreeTableRow> rows = degree_table(2, -3, 3);
  REQUIRE(rows.size() == 14);
  int at = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int m = -3; m <= 3; ++m) {
      CHECK(rows[at].n == n);
      CHECK(rows[at].m == m);
      CHECK(rows[at].degree == m);
      CHECK(rows[at].method == (n == 1 ? "winding+pl" : "pl"));
      CHECK(rows[at].mesh_level >= 0);
      ++at;
    }
  }
}

TEST_CASE("csv serialization") {
  std::vector<DegreeTableRow> rows = {{1, -2, -2, "winding+pl", 3}, {2, 1, 1, "pl", 4}};
  std::ostringstream out;
  write_degree_table_csv(rows, out);
  CHECK(out.str() == "n,m,degree,method,mesh_level\n1,-2,-2,winding+pl,3\n2,1,1,pl,4\n");
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(build_alpha(0, 1), ValidationError);
  CHECK_THROWS_AS(build_alpha(4, 1), ValidationError);
  CHECK_THROWS_AS(build_alpha(2, 41), ValidationError);
  CHECK_THROWS_AS(degree_table(0, 0, 1), ValidationError);
  CHECK_THROWS_AS(degree_table(2, 3, -3), ValidationError);
}

TEST_CASE("spatial alpha maps realize their degree") {
  DegreeOptions opts;
  const SphereMapEval map = SphereMapEval::origin_sphere(
      FieldEval::from(build_alpha(3, 2).realized_field), 1.0);
  CHECK(degree(map, opts).degree == 2);
}

}  // TEST_SUITE
