#pragma once

#include <span>
#include <string>
#include <vector>

#include "erl/harness.hpp"

namespace erl {

struct ParsedConfig {
    ExperimentConfig config;
    std::vector<std::string> warnings;  // regime notes; structural problems throw
};

/// INI-style experiment configuration. Sections [grid], [physics], [solver],
/// [sweep], [reference], [init]; every key has a documented default; unknown
/// sections or keys are rejected. Overrides are "section.key=value" strings
/// applied after the file text.
ParsedConfig parse_config(const std::string& text,
                          std::span<const std::string> overrides = {});

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const ExperimentConfig& c);

}  // namespace erl
