#include "fabflow/fixtures.hpp"

#include "fabflow/error.hpp"

namespace fabflow::scenario {

std::vector<FixtureInfo> fixture_catalog() {
  std::vector<FixtureInfo> out;
  for (const auto& f : detail::embedded_fixtures()) {
    out.push_back({std::string(f.name), parse_scenario(f.json).description});
  }
  return out;
}

std::optional<std::string_view> fixture_text(std::string_view name) {
  for (const auto& f : detail::embedded_fixtures()) {
    if (f.name == name) return f.json;
  }
  return std::nullopt;
}

Scenario load_fixture(std::string_view name) {
  const auto text = fixture_text(name);
  if (!text) throw Error(Errc::invalid_argument, "unknown fixture '" + std::string(name) + "'");
  return parse_scenario(*text);
}

}  // namespace fabflow::scenario
