#include "rankdist/report.hpp"

#include <algorithm>

namespace rankdist {

bool all_pass(const Report& report) {
  return std::all_of(report.begin(), report.end(), [](const Check& c) { return c.pass; });
}

std::size_t count_failures(const Report& report) {
  return static_cast<std::size_t>(
      std::count_if(report.begin(), report.end(), [](const Check& c) { return !c.pass; }));
}

void append(Report& into, Report from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

nlohmann::json to_json(const Check& check) {
  return {{"name", check.name}, {"claim", check.claim}, {"pass", check.pass}, {"detail", check.detail}};
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : report) out.push_back(to_json(c));
  return out;
}

}  // namespace rankdist
