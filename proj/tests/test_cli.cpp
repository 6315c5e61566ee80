#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "degtk/constructors.hpp"
#include "degtk/fields.hpp"
#include "degtk/json_io.hpp"

using namespace degtk;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string temp_path(const std::string& stem) {
  static int counter = 0;
  return "/tmp/degtk_cli_" + std::to_string(++counter) + "_" + stem;
}

RunResult run_tool(const std::string& args) {
  RunResult result;
  const std::string out_path = temp_path("stdout.txt");
  const std::string err_path = temp_path("stderr.txt");
  const std::string cmd =
      std::string(DEGTOOL_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
  const int rc = std::system(cmd.c_str());
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

Json parsed(const std::string& text) { return parse_json_text(text, "cli output"); }

std::string write_field_file(const PolyField& field, const std::string& stem) {
  const std::string path = temp_path(stem);
  std::ofstream out(path);
  out << field_to_json(field).dump(2) << "\n";
  return path;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("index of a saddle from a field file") {
  const std::string path =
      write_field_file(linear_field(Eigen::Vector2d(1, -1).asDiagonal()), "saddle.json");
  const RunResult r = run_tool("index --field " + path + " --zero 0,0 --radius 0.5");
  CHECK(r.exit_code == 0);
  const Json report = parsed(r.out);
  CHECK(report.at("index") == -1);
  CHECK(report.contains("timestamp"));
  std::remove(path.c_str());
}

TEST_CASE("construct, suspend and measure a map through files") {
  const std::string alpha_path = temp_path("alpha.json");
  const RunResult constructed =
      run_tool("construct-map --n 2 --m 3 --out " + alpha_path);
  CHECK(constructed.exit_code == 0);

  const RunResult deg = run_tool("degree --field " + alpha_path + " --radius 1");
  CHECK(deg.exit_code == 0);
  CHECK(parsed(deg.out).at("degree") == 3);

  const std::string base_path = write_field_file(power_pair(2), "pp2.json");
  const std::string suspended_path = temp_path("suspended.json");
  const RunResult susp =
      run_tool("suspend --field " + base_path + " --sign -1 --out " + suspended_path);
  CHECK(susp.exit_code == 0);
  CHECK(load_field(suspended_path) == suspend_field(power_pair(2), -1));

  const RunResult lemma = run_tool("lemma21 --field " + base_path + " --sign -1 --radius 0.5");
  CHECK(lemma.exit_code == 0);
  const Json lr = parsed(lemma.out);
  CHECK(lr.at("relation_holds") == true);
  CHECK(lr.at("suspended_index") == -2);

  std::remove(alpha_path.c_str());
  std::remove(base_path.c_str());
  std::remove(suspended_path.c_str());
}

TEST_CASE("morse-check accepts every bundled scenario") {
  for (const char* name :
       {"disk_source", "disk_saddle", "disk_constant", "disk_power2", "annulus_constant",
        "ball3_source", "ball3_constant", "ball3_saddle"}) {
    CAPTURE(name);
    const RunResult r =
        run_tool("morse-check --scenario " + std::string(SCENARIO_DIR) + "/" + name + ".json");
    CHECK(r.exit_code == 0);
    const Json report = parsed(r.out);
    CHECK(report.at("formula_holds") == true);
    CHECK(report.at("doubling_check").at("identity_holds") == true);
  }
}

TEST_CASE("degree table emits csv with degree equal to m") {
  const RunResult r = run_tool("degree-table --n-max 1 --m-min -2 --m-max 2");
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "n,m,degree,method,mesh_level");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string n, m, degree;
    std::getline(cells, n, ',');
    std::getline(cells, m, ',');
    std::getline(cells, degree, ',');
    CHECK(m == degree);
    ++rows;
  }
  CHECK(rows == 5);
}

TEST_CASE("fixed seeds reproduce reports byte for byte modulo timestamp") {
  const std::string path = write_field_file(power_pair(3), "pp3.json");
  const std::string args = "degree --field " + path + " --radius 1 --seed 7";
  Json first = parsed(run_tool(args).out);
  Json second = parsed(run_tool(args).out);
  first.erase("timestamp");
  second.erase("timestamp");
  CHECK(first.dump() == second.dump());

  const std::string table_args = "degree-table --n-max 1 --m-min 0 --m-max 3 --output json";
  Json t1 = parsed(run_tool(table_args).out);
  Json t2 = parsed(run_tool(table_args).out);
  t1.erase("timestamp");
  t2.erase("timestamp");
  CHECK(t1.dump() == t2.dump());
  std::remove(path.c_str());
}

TEST_CASE("bad inputs exit 1 with a json error object") {
  const RunResult missing = run_tool("degree --field /no/such/file.json");
  CHECK(missing.exit_code == 1);
  CHECK(parsed(missing.err).at("error") == "validation_error");

  const RunResult usage = run_tool("not-a-command");
  CHECK(usage.exit_code == 1);
  CHECK(parsed(usage.err).at("error") == "usage_error");

  const std::string path = write_field_file(identity_field(2), "id.json");
  const RunResult not_zero = run_tool("index --field " + path + " --zero 0.5,0 --radius 0.2");
  CHECK(not_zero.exit_code == 1);
  CHECK(parsed(not_zero.err).at("error") == "validation_error");
  std::remove(path.c_str());
}

TEST_CASE("a formula violation exits 2") {
  // The field's only zero is displaced off the screening grid and left out of
  // the declared list, so validation passes at its resolution and the index
  // sum honestly misses chi. The tool must report that as a check failure.
  std::vector<Component> comps(2);
  comps[0] = {Monomial{1.0, {1, 0}}, Monomial{-0.0131, {0, 0}}};
  comps[1] = {Monomial{1.0, {0, 1}}, Monomial{-0.0077, {0, 0}}};
  MorseScenario sc;
  sc.name = "hidden_zero";
  sc.dim = 2;
  sc.boundaries = {{Eigen::Vector2d::Zero(), 1.0, SphereSide::encloses}};
  sc.field = PolyField(2, std::move(comps));
  sc.chi_m = 1;
  sc.chi_boundary = 0;
  const std::string path = temp_path("hidden_zero.json");
  {
    std::ofstream out(path);
    out << scenario_to_json(sc).dump(2) << "\n";
  }
  const RunResult r = run_tool("morse-check --scenario " + path + " --no-doubling");
  CHECK(r.exit_code == 2);
  CHECK(parsed(r.out).at("formula_holds") == false);
  CHECK(parsed(r.err).at("error") == "cross_check_error");
  std::remove(path.c_str());
}

TEST_CASE("help is available") {
  CHECK(run_tool("--help").exit_code == 0);
  CHECK(run_tool("morse-check --help").exit_code == 0);
}

}  // TEST_SUITE
