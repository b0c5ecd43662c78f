#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

namespace fslab::cli {

using json = nlohmann::ordered_json;

// Adds {name, value, threshold, relation, pass} to report["verdicts"].
void add_verdict(json& report, const std::string& name, double value, const std::string& relation, double threshold);
bool all_pass(const json& report);

// Pretty JSON with every floating-point number at 17 significant digits and
// non-finite numbers as null.
void write_json(std::ostream& os, const json& j, int indent = 2);
void write_json_file(const std::string& path, const json& j);

}  // namespace fslab::cli
