#include "degtk/json_io.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "degtk/errors.hpp"

namespace degtk {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + " must be a non-empty array of numbers");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ValidationError(where + " must contain only numbers");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(where + " is missing required key \"" + key + "\"");
  }
  return j.at(key);
}

int require_int(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(where + " key \"" + key + "\" must be an integer");
  }
  return v.get<int>();
}

}  // namespace

Json field_to_json(const PolyField& field) {
  Json components = Json::array();
  for (const Component& component : field.components()) {
    Json terms = Json::array();
    for (const Monomial& m : component) {
      terms.push_back(Json{{"c", m.coeff}, {"e", m.exponents}});
    }
    components.push_back(std::move(terms));
  }
  return Json{{"dim", field.dim_domain()}, {"components", std::move(components)}};
}

PolyField field_from_json(const Json& j) {
  const int dim = require_int(j, "dim", "field");
  const Json& comps = require(j, "components", "field");
  if (!comps.is_array() || comps.empty()) {
    throw ValidationError("field \"components\" must be a non-empty array");
  }
  std::vector<Component> components;
  for (const Json& comp : comps) {
    if (!comp.is_array()) {
      throw ValidationError("each field component must be an array of terms");
    }
    Component component;
    for (const Json& term : comp) {
      const Json& c = require(term, "c", "field term");
      const Json& e = require(term, "e", "field term");
      if (!c.is_number()) throw ValidationError("field term \"c\" must be a number");
      if (!e.is_array()) throw ValidationError("field term \"e\" must be an array");
      Monomial m;
      m.coeff = c.get<double>();
      for (const Json& exp : e) {
        if (!exp.is_number_integer()) {
          throw ValidationError("field term exponents must be integers");
        }
        m.exponents.push_back(exp.get<int>());
      }
      component.push_back(std::move(m));
    }
    components.push_back(std::move(component));
  }
  return PolyField(dim, std::move(components));
}

Json scenario_to_json(const MorseScenario& scenario) {
  Json out;
  if (!scenario.name.empty()) out["name"] = scenario.name;
  out["dim"] = scenario.dim;
  Json boundaries = Json::array();
  for (const BoundarySphere& b : scenario.boundaries) {
    boundaries.push_back(Json{
        {"center", vector_to_json(b.center)},
        {"radius", b.radius},
        {"side", b.side == SphereSide::encloses ? "encloses" : "excludes"}});
  }
  out["boundaries"] = std::move(boundaries);
  out["field"] = field_to_json(scenario.field);
  Json zeros = Json::array();
  for (const Eigen::VectorXd& z : scenario.interior_zeros) zeros.push_back(vector_to_json(z));
  out["zeros"] = std::move(zeros);
  out["chi_M"] = scenario.chi_m;
  out["chi_boundary"] = scenario.chi_boundary;
  if (scenario.collar_width > 0.0) out["collar_width"] = scenario.collar_width;
  out["min_norm_floor"] = scenario.min_norm_floor;
  if (!scenario.boundary_seeds.empty()) {
    Json seeds = Json::array();
    for (const Eigen::VectorXd& s : scenario.boundary_seeds) seeds.push_back(vector_to_json(s));
    out["boundary_seeds"] = std::move(seeds);
  }
  return out;
}

MorseScenario scenario_from_json(const Json& j) {
  MorseScenario scenario;
  scenario.field = field_from_json(require(j, "field", "scenario"));
  scenario.dim = require_int(j, "dim", "scenario");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ValidationError("scenario \"name\" must be a string");
    scenario.name = j.at("name").get<std::string>();
  }

  const Json& boundaries = require(j, "boundaries", "scenario");
  if (!boundaries.is_array()) throw ValidationError("scenario \"boundaries\" must be an array");
  for (const Json& bj : boundaries) {
    BoundarySphere b;
    b.center = vector_from_json(require(bj, "center", "boundary"), "boundary \"center\"");
    const Json& radius = require(bj, "radius", "boundary");
    if (!radius.is_number()) throw ValidationError("boundary \"radius\" must be a number");
    b.radius = radius.get<double>();
    const Json& side = require(bj, "side", "boundary");
    if (side == "encloses") {
      b.side = SphereSide::encloses;
    } else if (side == "excludes") {
      b.side = SphereSide::excludes;
    } else {
      throw ValidationError("boundary \"side\" must be \"encloses\" or \"excludes\"");
    }
    scenario.boundaries.push_back(std::move(b));
  }

  const Json& zeros = require(j, "zeros", "scenario");
  if (!zeros.is_array()) throw ValidationError("scenario \"zeros\" must be an array");
  for (const Json& z : zeros) {
    scenario.interior_zeros.push_back(vector_from_json(z, "scenario zero"));
  }
  scenario.chi_m = require_int(j, "chi_M", "scenario");
  scenario.chi_boundary = require_int(j, "chi_boundary", "scenario");

  if (j.contains("collar_width")) {
    if (!j.at("collar_width").is_number()) {
      throw ValidationError("scenario \"collar_width\" must be a number");
    }
    scenario.collar_width = j.at("collar_width").get<double>();
  }
  if (j.contains("min_norm_floor")) {
    if (!j.at("min_norm_floor").is_number()) {
      throw ValidationError("scenario \"min_norm_floor\" must be a number");
    }
    scenario.min_norm_floor = j.at("min_norm_floor").get<double>();
  }
  if (j.contains("boundary_seeds")) {
    const Json& seeds = j.at("boundary_seeds");
    if (!seeds.is_array()) throw ValidationError("scenario \"boundary_seeds\" must be an array");
    for (const Json& s : seeds) {
      scenario.boundary_seeds.push_back(vector_from_json(s, "boundary seed"));
    }
  }
  return scenario;
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

PolyField load_field(const std::string& path) {
  try {
    return field_from_json(load_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

MorseScenario load_scenario(const std::string& path) {
  try {
    return scenario_from_json(load_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Json to_json(const DegreeReport& report) {
  return Json{{"degree", report.degree},
              {"method", to_string(report.method)},
              {"mesh_level", report.mesh_level},
              {"target_retries", report.target_retries},
              {"min_image_norm", report.min_image_norm},
              {"seed", report.seed},
              {"samples", report.samples},
              {"cross_checked", report.cross_checked}};
}

Json to_json(const IndexReport& report) {
  return Json{{"zero", vector_to_json(report.zero)},
              {"radius", report.radius},
              {"index", report.index},
              {"degree_report", to_json(report.degree_report)}};
}

Json to_json(const HomotopyScanReport& report) {
  return Json{{"min_norm", report.min_norm},
              {"witness_x", vector_to_json(report.witness_x)},
              {"witness_t", report.witness_t},
              {"grid", report.grid},
              {"mesh_level", report.mesh_level}};
}

Json to_json(const Lemma21Report& report) {
  return Json{{"base_index", report.base_index},
              {"suspended_index", report.suspended_index},
              {"sign", report.sign},
              {"relation_holds", report.relation_holds},
              {"sign_condition_min", report.sign_condition_min}};
}

Json to_json(const SpotCheck& spot) {
  return Json{{"point", vector_to_json(spot.point)},
              {"boundary", spot.boundary},
              {"side", spot.inward ? "inward" : "outward"},
              {"predicted", spot.predicted},
              {"computed", spot.computed},
              {"matches", spot.matches}};
}

Json to_json(const DoublingReport& report) {
  Json spots = Json::array();
  for (const SpotCheck& spot : report.spot_checks) spots.push_back(to_json(spot));
  return Json{{"doubled_sum", report.doubled_sum},
              {"target", report.target},
              {"identity_holds", report.identity_holds},
              {"collar_width", report.collar_width},
              {"spot_checks", std::move(spots)},
              {"degenerate_boundaries", report.degenerate_boundaries}};
}

Json to_json(const MorseReport& report) {
  Json out;
  if (!report.name.empty()) out["name"] = report.name;
  out["Ind_V"] = report.ind_v;
  Json interior = Json::array();
  for (const IndexReport& r : report.interior) interior.push_back(to_json(r));
  out["interior_zeros"] = std::move(interior);
  Json zeros = Json::array();
  for (const BoundaryZero& z : report.boundary.zeros) {
    zeros.push_back(Json{{"point", vector_to_json(z.point)},
                         {"boundary", z.boundary},
                         {"index", z.tangential_index},
                         {"side", z.inward ? "inward" : "outward"}});
  }
  out["boundary_zeros"] = std::move(zeros);
  out["Ind_dminusV"] = report.ind_dminus_v;
  out["chi_M"] = report.chi_m;
  out["formula_holds"] = report.formula_holds;
  if (report.has_doubling) out["doubling_check"] = to_json(report.doubling);
  return out;
}

Json error_to_json(const std::exception& error) {
  std::string kind = "error";
  if (dynamic_cast<const MinNormViolation*>(&error)) {
    kind = "min_norm_violation";
  } else if (dynamic_cast<const CrossCheckError*>(&error)) {
    kind = "cross_check_error";
  } else if (dynamic_cast<const ValidationError*>(&error)) {
    kind = "validation_error";
  }
  Json out{{"error", kind}, {"message", error.what()}};
  if (const auto* mnv = dynamic_cast<const MinNormViolation*>(&error)) {
    out["witness"] = mnv->witness;
    out["norm"] = mnv->norm;
  }
  return out;
}

}  // namespace degtk
