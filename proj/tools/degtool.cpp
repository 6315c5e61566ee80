#include <CLI11.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "degtk/constructors.hpp"
#include "degtk/degree.hpp"
#include "degtk/errors.hpp"
#include "degtk/fields.hpp"
#include "degtk/index.hpp"
#include "degtk/json_io.hpp"
#include "degtk/morse.hpp"

namespace {

using degtk::Json;

std::string iso_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reports lead with a timestamp; everything after it is deterministic for a
// fixed seed, which is what the determinism contract promises.
void print_report(Json body) {
  Json out;
  out["timestamp"] = iso_timestamp();
  for (auto& [key, value] : body.items()) out[key] = std::move(value);
  std::cout << out.dump(2) << "\n";
}

Eigen::VectorXd parse_csv_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw degtk::ValidationError(flag + " expects comma-separated numbers, got \"" + text +
                                   "\"");
    }
  }
  if (values.empty()) {
    throw degtk::ValidationError(flag + " expects comma-separated numbers, got \"" + text + "\"");
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_field_file(const degtk::PolyField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw degtk::ValidationError("cannot write to " + path);
  out << degtk::field_to_json(field).dump(2) << "\n";
}

struct CommonOptions {
  std::uint64_t seed = 0;
  int mesh_level = 2;
  bool serial = false;

  degtk::DegreeOptions degree_options() const {
    degtk::DegreeOptions opts;
    opts.seed = seed;
    opts.start_level = mesh_level;
    opts.policy = serial ? degtk::ExecPolicy::serial : degtk::ExecPolicy::parallel;
    return opts;
  }
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--seed", common.seed, "Seed for all randomized choices (default 0)");
  cmd->add_option("--mesh-level", common.mesh_level,
                  "Starting refinement level for the simplicial degree method")
      ->check(CLI::Range(0, 12));
  cmd->add_flag("--serial", common.serial, "Disable parallel kernels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree, index and boundary-formula toolkit for polynomial vector fields"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* construct = app.add_subcommand(
      "construct-map", "Build the standard degree-m self-map of the n-sphere");
  int ctor_n = 1;
  int ctor_m = 1;
  std::string ctor_out;
  construct->add_option("--n", ctor_n, "Sphere dimension (1 to 3)")->required();
  construct->add_option("--m", ctor_m, "Target degree, may be negative")->required();
  construct->add_option("--out", ctor_out, "Also write the field JSON to this path");

  auto* degree_cmd =
      app.add_subcommand("degree", "Degree of the normalized field on a sphere");
  std::string degree_field_path;
  std::string degree_center;
  double degree_radius = 1.0;
  degree_cmd->add_option("--field", degree_field_path, "Field JSON file")->required();
  degree_cmd->add_option("--center", degree_center, "Sphere center, comma-separated");
  degree_cmd->add_option("--radius", degree_radius, "Sphere radius (default 1)");
  add_common(degree_cmd, common);

  auto* index_cmd = app.add_subcommand("index", "Index of a field at an isolated zero");
  std::string index_field_path;
  std::string index_zero;
  double index_radius = 0.5;
  index_cmd->add_option("--field", index_field_path, "Field JSON file")->required();
  index_cmd->add_option("--zero", index_zero, "Zero location, comma-separated")->required();
  index_cmd->add_option("--radius", index_radius, "Probe sphere radius (default 0.5)");
  add_common(index_cmd, common);

  auto* suspend_cmd = app.add_subcommand(
      "suspend", "Append sign * x_last as a new final component");
  std::string suspend_field_path;
  int suspend_sign = -1;
  std::string suspend_out;
  suspend_cmd->add_option("--field", suspend_field_path, "Field JSON file")->required();
  suspend_cmd->add_option("--sign", suspend_sign, "+1 or -1")->required();
  suspend_cmd->add_option("--out", suspend_out, "Also write the suspended field to this path");

  auto* lemma_cmd = app.add_subcommand(
      "lemma21", "Compare the index of a field with the index of its suspension");
  std::string lemma_field_path;
  int lemma_sign = -1;
  double lemma_radius = 0.5;
  lemma_cmd->add_option("--field", lemma_field_path, "Base field JSON file")->required();
  lemma_cmd->add_option("--sign", lemma_sign, "+1 or -1")->required();
  lemma_cmd->add_option("--radius", lemma_radius, "Probe sphere radius (default 0.5)");
  add_common(lemma_cmd, common);

  auto* morse_cmd = app.add_subcommand(
      "morse-check", "Check Ind_V + Ind_dminusV = chi_M on a scenario, with doubling");
  std::string scenario_path;
  double collar_width = 0.0;
  bool no_doubling = false;
  morse_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  morse_cmd->add_option("--collar-width", collar_width,
                        "Collar width for the doubling check (default from scenario)");
  morse_cmd->add_flag("--no-doubling", no_doubling, "Skip the doubling identity");
  add_common(morse_cmd, common);

  auto* table_cmd = app.add_subcommand(
      "degree-table", "Computed degree of every standard map in a range");
  int table_n_max = 2;
  int table_m_min = -4;
  int table_m_max = 4;
  std::string table_output = "csv";
  table_cmd->add_option("--n-max", table_n_max, "Largest sphere dimension (default 2)");
  table_cmd->add_option("--m-min", table_m_min, "Smallest degree (default -4)");
  table_cmd->add_option("--m-max", table_m_max, "Largest degree (default 4)");
  table_cmd->add_option("--output", table_output, "csv or json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  add_common(table_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json{{"error", "usage_error"}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }

  try {
    if (construct->parsed()) {
      const degtk::AlphaSpec spec = degtk::build_alpha(ctor_n, ctor_m);
      if (!ctor_out.empty()) write_field_file(spec.realized_field, ctor_out);
      print_report(Json{{"n", spec.n},
                        {"m", spec.m},
                        {"field", degtk::field_to_json(spec.realized_field)}});
      return 0;
    }

    if (degree_cmd->parsed()) {
      const degtk::PolyField field = degtk::load_field(degree_field_path);
      Eigen::VectorXd center = Eigen::VectorXd::Zero(field.dim_domain());
      if (!degree_center.empty()) center = parse_csv_vector(degree_center, "--center");
      const degtk::SphereMapEval map = degtk::SphereMapEval::around(
          degtk::FieldEval::from(field), center, degree_radius);
      const degtk::DegreeReport report = degtk::degree(map, common.degree_options());
      print_report(degtk::to_json(report));
      return 0;
    }

    if (index_cmd->parsed()) {
      const degtk::PolyField field = degtk::load_field(index_field_path);
      const Eigen::VectorXd zero = parse_csv_vector(index_zero, "--zero");
      const degtk::IndexReport report = degtk::index_at(
          degtk::FieldEval::from(field), zero, index_radius, common.degree_options());
      print_report(degtk::to_json(report));
      return 0;
    }

    if (suspend_cmd->parsed()) {
      const degtk::PolyField field = degtk::load_field(suspend_field_path);
      const degtk::PolyField suspended = degtk::suspend_field(field, suspend_sign);
      if (!suspend_out.empty()) write_field_file(suspended, suspend_out);
      print_report(Json{{"sign", suspend_sign},
                        {"field", degtk::field_to_json(suspended)}});
      return 0;
    }

    if (lemma_cmd->parsed()) {
      const degtk::PolyField field = degtk::load_field(lemma_field_path);
      const degtk::Lemma21Report report = degtk::check_lemma21(
          field, lemma_sign, lemma_radius, common.degree_options());
      print_report(degtk::to_json(report));
      if (!report.relation_holds) {
        std::cerr << Json{{"error", "cross_check_error"},
                          {"message", "suspended index does not match sign * base index"}}
                         .dump(2)
                  << "\n";
        return 2;
      }
      return 0;
    }

    if (morse_cmd->parsed()) {
      const degtk::MorseScenario scenario = degtk::load_scenario(scenario_path);
      const double width = collar_width > 0.0 ? collar_width : scenario.collar_width;
      const degtk::MorseReport report =
          no_doubling ? degtk::morse_check(scenario, common.degree_options())
                      : degtk::run_scenario(scenario, width, common.degree_options());
      print_report(degtk::to_json(report));
      const bool doubling_ok = !report.has_doubling || report.doubling.identity_holds;
      if (!report.formula_holds || !doubling_ok) {
        std::cerr << Json{{"error", "cross_check_error"},
                          {"message", report.formula_holds
                                          ? "doubling identity does not hold"
                                          : "index sum does not match chi_M"}}
                         .dump(2)
                  << "\n";
        return 2;
      }
      return 0;
    }

    if (table_cmd->parsed()) {
      const std::vector<degtk::DegreeTableRow> rows = degtk::degree_table(
          table_n_max, table_m_min, table_m_max, common.degree_options());
      if (table_output == "csv") {
        degtk::write_degree_table_csv(rows, std::cout);
      } else {
        Json out = Json::array();
        for (const degtk::DegreeTableRow& row : rows) {
          out.push_back(Json{{"n", row.n},
                             {"m", row.m},
                             {"degree", row.degree},
                             {"method", row.method},
                             {"mesh_level", row.mesh_level}});
        }
        print_report(Json{{"rows", std::move(out)}});
      }
      return 0;
    }
  } catch (const degtk::CrossCheckError& e) {
    std::cerr << degtk::error_to_json(e).dump(2) << "\n";
    return 2;
  } catch (const degtk::ValidationError& e) {
    std::cerr << degtk::error_to_json(e).dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << degtk::error_to_json(e).dump(2) << "\n";
    return 1;
  }
  return 0;
}
