#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace rankdist {

/// One verified statement. `claim` is the formula being checked, written out
/// so a JSON record can be traced back to the statement it certifies.
struct Check {
  std::string name;
  std::string claim;
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();
};

using Report = std::vector<Check>;

bool all_pass(const Report& report);
std::size_t count_failures(const Report& report);
void append(Report& into, Report from);

nlohmann::json to_json(const Check& check);
nlohmann::json to_json(const Report& report);

}  // namespace rankdist
