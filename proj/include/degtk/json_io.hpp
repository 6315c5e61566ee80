#pragma once

#include <json.hpp>

#include <exception>
#include <string>

#include "degtk/degree.hpp"
#include "degtk/fields.hpp"
#include "degtk/index.hpp"
#include "degtk/morse.hpp"

namespace degtk {

using Json = nlohmann::ordered_json;

// Field interchange: { "dim": d, "components": [ [ {"c": c, "e": [e1..ed]}, .. ], .. ] }.
Json field_to_json(const PolyField& field);
PolyField field_from_json(const Json& j);

// Scenario interchange: dim, boundaries (center/radius/side), field, zeros,
// chi_M, chi_boundary, plus the optional keys name, collar_width,
// min_norm_floor and boundary_seeds.
Json scenario_to_json(const MorseScenario& scenario);
MorseScenario scenario_from_json(const Json& j);

// Parsing and file loading with failures rethrown as ValidationError, so the
// CLI's exit triage sees malformed input as input error rather than a crash.
Json parse_json_text(const std::string& text, const std::string& origin);
Json load_json_file(const std::string& path);
PolyField load_field(const std::string& path);
MorseScenario load_scenario(const std::string& path);

Json to_json(const DegreeReport& report);
Json to_json(const IndexReport& report);
Json to_json(const HomotopyScanReport& report);
Json to_json(const Lemma21Report& report);
Json to_json(const SpotCheck& spot);
Json to_json(const DoublingReport& report);
Json to_json(const MorseReport& report);

// Machine-readable error object; MinNormViolation carries its witness along.
Json error_to_json(const std::exception& error);

}  // namespace degtk
