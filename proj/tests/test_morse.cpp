#include <doctest.h>

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "degtk/constructors.hpp"
#include "degtk/errors.hpp"
#include "degtk/fields.hpp"
#include "degtk/json_io.hpp"
#include "degtk/morse.hpp"
#include "degtk/rng.hpp"

using namespace degtk;

namespace {

MorseScenario bundled(const std::string& name) {
  return load_scenario(std::string(SCENARIO_DIR) + "/" + name + ".json");
}

MorseScenario unit_disk(PolyField field) {
  MorseScenario sc;
  sc.dim = 2;
  sc.boundaries = {{Eigen::Vector2d::Zero(), 1.0, SphereSide::encloses}};
  sc.field = std::move(field);
  sc.chi_m = 1;
  sc.chi_boundary = 0;
  return sc;
}

}  // namespace

TEST_SUITE("morse") {

TEST_CASE("bundled scenarios satisfy both identities") {
  struct Expected {
    const char* name;
    int ind_v;
    int ind_dminus;
    int chi;
    int boundary_zeros;
    int degenerate;
  };
  const Expected table[] = {
      {"disk_source", 1, 0, 1, 0, 1},   {"disk_saddle", -1, 2, 1, 4, 0},
      {"disk_constant", 0, 1, 1, 2, 0}, {"disk_power2", 2, -1, 1, 2, 0},
      {"annulus_constant", 0, 0, 0, 4, 0}, {"ball3_source", 1, 0, 1, 0, 1},
      {"ball3_constant", 0, 1, 1, 2, 0}, {"ball3_saddle", -1, 2, 1, 6, 0},
  };
  for (const Expected& e : table) {
    CAPTURE(e.name);
    const MorseReport r = run_scenario(bundled(e.name));
    CHECK(r.ind_v == e.ind_v);
    CHECK(r.ind_dminus_v == e.ind_dminus);
    CHECK(r.chi_m == e.chi);
    CHECK(r.formula_holds);
    CHECK(static_cast<int>(r.boundary.zeros.size()) == e.boundary_zeros);
    REQUIRE(r.has_doubling);
    CHECK(r.doubling.identity_holds);
    CHECK(r.doubling.doubled_sum == r.doubling.target);
    CHECK(static_cast<int>(r.doubling.degenerate_boundaries.size()) == e.degenerate);
    for (const SpotCheck& spot : r.doubling.spot_checks) {
      CHECK(spot.matches);
      CHECK(spot.computed == spot.predicted);
    }
    if (e.boundary_zeros > 0) CHECK(r.doubling.spot_checks.size() == 2);
  }
}

TEST_CASE("boundary zeros of the planar saddle") {
  const MorseReport r = morse_check(bundled("disk_saddle"));
  REQUIRE(r.boundary.zeros.size() == 4);
  // Ordered by angle: outward at 0 and pi, inward at pi/2 and 3pi/2.
  CHECK(r.boundary.zeros[0].point.isApprox(Eigen::Vector2d(1, 0), 1e-9));
  CHECK(r.boundary.zeros[0].tangential_index == -1);
  CHECK_FALSE(r.boundary.zeros[0].inward);
  CHECK(r.boundary.zeros[1].point.isApprox(Eigen::Vector2d(0, 1), 1e-9));
  CHECK(r.boundary.zeros[1].tangential_index == 1);
  CHECK(r.boundary.zeros[1].inward);
  CHECK(r.boundary.zeros[2].tangential_index == -1);
  CHECK(r.boundary.zeros[3].tangential_index == 1);
}

TEST_CASE("boundary zeros of the spatial saddle sit at the axes") {
  const MorseReport r = morse_check(bundled("ball3_saddle"));
  REQUIRE(r.boundary.zeros.size() == 6);
  const Eigen::Vector3d expected[] = {{-1, 0, 0}, {0, -1, 0}, {0, 0, -1},
                                      {0, 0, 1},  {0, 1, 0},  {1, 0, 0}};
  const int indices[] = {-1, 1, 1, 1, 1, -1};
  const bool inward[] = {false, false, true, true, false, false};
  for (int i = 0; i < 6; ++i) {
    CHECK(r.boundary.zeros[i].point.isApprox(expected[i], 1e-7));
    CHECK(r.boundary.zeros[i].tangential_index == indices[i]);
    CHECK(r.boundary.zeros[i].inward == inward[i]);
  }
}

TEST_CASE("collar profile") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(0.5) == 1.0);
  CHECK(smooth_step(0.75) == 1.0);
  CHECK(smooth_step(0.99) == 1.0);
  double prev = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double value = smooth_step(0.01 * k);
    CHECK(value >= prev);
    prev = value;
  }
  CHECK(smooth_step(0.1) + smooth_step(0.4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(smooth_step(0.25) > 0.0);
  CHECK(smooth_step(0.25) < 1.0);
  CHECK_THROWS_AS(smooth_step(1.0), ValidationError);
  CHECK_THROWS_AS(smooth_step(-0.1), ValidationError);
}

TEST_CASE("scenario validation rejects malformed regions") {
  MorseScenario sc = bundled("disk_saddle");

  SUBCASE("second enclosing sphere") {
    sc.boundaries.push_back({Eigen::Vector2d::Zero(), 2.0, SphereSide::encloses});
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("excluded sphere reaching the rim") {
    sc.boundaries.push_back({Eigen::Vector2d(0.6, 0.0), 0.4, SphereSide::excludes});
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("declared euler characteristics must match the geometry") {
    sc.chi_m = 0;
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
    sc.chi_m = 1;
    sc.chi_boundary = 2;
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("zero too close to the boundary") {
    sc.interior_zeros = {Eigen::Vector2d(1.0, 0.0)};
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("declared point that is not a zero") {
    sc.interior_zeros = {Eigen::Vector2d(0.2, 0.2)};
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
  SUBCASE("undeclared zero caught by the grid scan") {
    sc.interior_zeros.clear();
    CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
  }
}

TEST_CASE("overlapping excluded spheres are rejected") {
  MorseScenario sc = bundled("annulus_constant");
  sc.boundaries.push_back({Eigen::Vector2d(0.7, 0.0), 0.25, SphereSide::excludes});
  CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
}

TEST_CASE("a field vanishing on the boundary is rejected") {
  std::vector<Component> comps(2);
  comps[0] = {Monomial{1.0, {1, 0}}, Monomial{-1.0, {0, 0}}};
  comps[1] = {Monomial{1.0, {0, 1}}};
  MorseScenario sc = unit_disk(PolyField(2, std::move(comps)));
  CHECK_THROWS_AS(validate_scenario(sc), ValidationError);
}

TEST_CASE("boundary classification counts both signs") {
  const std::vector<BoundarySigns> saddle = classify_boundary(bundled("disk_saddle"));
  REQUIRE(saddle.size() == 1);
  CHECK(saddle[0].negative > 0);
  CHECK(saddle[0].positive > 0);
  CHECK(saddle[0].negative + saddle[0].positive <= saddle[0].nu.size());

  const std::vector<BoundarySigns> source = classify_boundary(bundled("disk_source"));
  CHECK(source[0].negative == 0);
  CHECK(source[0].positive == source[0].nu.size());

  CHECK_THROWS_AS(classify_boundary(bundled("disk_source"), 4), ValidationError);
}

TEST_CASE("an everywhere tangent field is not transverse") {
  // Pure rotation: <V, n> = 0 on the whole circle.
  std::vector<Component> comps(2);
  comps[0] = {Monomial{-1.0, {0, 1}}};
  comps[1] = {Monomial{1.0, {1, 0}}};
  MorseScenario sc = unit_disk(PolyField(2, std::move(comps)));
  sc.interior_zeros = {Eigen::Vector2d::Zero()};
  CHECK_THROWS_AS(classify_boundary(sc), ValidationError);
}

TEST_CASE("tangential projection is orthogonal to the normal") {
  const MorseScenario sc = bundled("ball3_saddle");
  const BoundaryField bf = tangential_field(sc, sc.boundaries[0]);
  UnitSphereSampler rng(4);
  for (int trial = 0; trial < 16; ++trial) {
    const Eigen::VectorXd u = rng.next_unit(3);
    const Eigen::VectorXd t = bf.tangential(u);
    CHECK(std::abs(t.dot(u)) < 1e-12);
    const double nu = bf.normal(u);
    const double direct = sc.field.eval(u).dot(u);
    CHECK(nu == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("inward radial flow on a full boundary sphere is rejected") {
  // -x points inward everywhere on the unit circle and its tangential part
  // vanishes identically, so the inward zero set is not isolated.
  MorseScenario sc = unit_disk(linear_field(-Eigen::Matrix2d::Identity()));
  sc.interior_zeros = {Eigen::Vector2d::Zero()};
  CHECK_THROWS_AS(boundary_indices(sc), ValidationError);
}

TEST_CASE("degenerate boundaries carry no zeros") {
  const BoundaryAnalysis analysis = boundary_indices(bundled("disk_source"));
  CHECK(analysis.zeros.empty());
  REQUIRE(analysis.tangential_vanishes.size() == 1);
  CHECK(analysis.tangential_vanishes[0]);
}

TEST_CASE("collar validation") {
  MorseScenario sc = bundled("disk_saddle");
  CHECK(default_collar_width(sc) == doctest::Approx(0.2));
  CHECK_THROWS_AS(double_check(sc, 0.6), ValidationError);

  // A zero 0.15 from the rim collides with the default collar.
  std::vector<Component> comps(2);
  comps[0] = {Monomial{1.0, {1, 0}}, Monomial{-0.85, {0, 0}}};
  comps[1] = {Monomial{1.0, {0, 1}}};
  MorseScenario close = unit_disk(PolyField(2, std::move(comps)));
  close.interior_zeros = {Eigen::Vector2d(0.85, 0.0)};
  CHECK_THROWS_AS(double_check(close), ValidationError);
  const DoublingReport ok = double_check(close, 0.1);
  CHECK(ok.identity_holds);
}

TEST_CASE("annulus with a radial source in the hole is rejected") {
  // x points outward on the outer circle but inward on the inner one, where
  // its tangential part vanishes identically.
  MorseScenario sc = bundled("annulus_constant");
  sc.field = identity_field(2);
  CHECK_THROWS_AS(boundary_indices(sc), ValidationError);
}

TEST_CASE("doubling reports carry the collar width used") {
  const MorseScenario sc = bundled("disk_constant");
  const DoublingReport r = double_check(sc, 0.15);
  CHECK(r.collar_width == 0.15);
  CHECK(r.identity_holds);
  const DoublingReport d = double_check(sc);
  CHECK(d.collar_width == doctest::Approx(0.2));
}

TEST_CASE("a zero hidden below grid resolution fails the formula, not validation") {
  // The zero at (0.0131, 0.0077) sits between grid points with |V| above the
  // screening floor everywhere sampled, so the scan cannot see it. The index
  // sum then honestly misses chi, which is the cross-check's job to flag.
  std::vector<Component> comps(2);
  comps[0] = {Monomial{1.0, {1, 0}}, Monomial{-0.0131, {0, 0}}};
  comps[1] = {Monomial{1.0, {0, 1}}, Monomial{-0.0077, {0, 0}}};
  MorseScenario sc = unit_disk(PolyField(2, std::move(comps)));
  CHECK_NOTHROW(validate_scenario(sc));
  const MorseReport r = morse_check(sc);
  CHECK(r.ind_v == 0);
  CHECK(r.ind_dminus_v == 0);
  CHECK_FALSE(r.formula_holds);
}

TEST_CASE("morse_check leaves doubling off; run_scenario turns it on") {
  const MorseScenario sc = bundled("disk_constant");
  CHECK_FALSE(morse_check(sc).has_doubling);
  CHECK(run_scenario(sc).has_doubling);
}

}  // TEST_SUITE
