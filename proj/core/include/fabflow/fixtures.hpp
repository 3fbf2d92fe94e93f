#pragma once

// Scenario files bundled into the library.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fabflow/scenario.hpp"

namespace fabflow::scenario {

namespace detail {

struct EmbeddedFixture {
  std::string_view name;
  std::string_view json;
};

const std::vector<EmbeddedFixture>& embedded_fixtures();

}  // namespace detail

struct FixtureInfo {
  std::string name;
  std::string description;
};

/// Every bundled scenario, sorted by name.
std::vector<FixtureInfo> fixture_catalog();

/// Raw JSON of a bundled scenario.
std::optional<std::string_view> fixture_text(std::string_view name);

/// Throws Error{invalid_argument} for an unknown name.
Scenario load_fixture(std::string_view name);

}  // namespace fabflow::scenario
