// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "ntnpos/scenario.hpp"

namespace ntnpos {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse a flat key=value scenario file ('#' comments, blank lines allowed)
/// on top of the built-in defaults. Unknown keys raise ConfigError naming the
/// key and line.
Scenario load_scenario(std::istream& is);
Scenario load_scenario(const std::string& path);

/// Same, but applied on top of an explicit base scenario (e.g. a profile).
Scenario load_scenario(std::istream& is, const Scenario& base);
Scenario load_scenario(const std::string& path, const Scenario& base);

/// One "key = value" line per field, parseable by load_scenario.
std::string scenario_to_config(const Scenario& sc);

/// Documented key list for --help output.
std::string config_key_help();

}  // namespace ntnpos
