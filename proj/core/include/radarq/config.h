#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "radarq/engine.h"

namespace radarq {

// Malformed or out-of-range configuration. The message starts with the
// offending field, e.g. "concurrency: must be >= 1".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON run configuration; every field is optional and defaults to the
// SimConfig defaults. Durations are in seconds; "coherence_time" also accepts
// "inf" or null. Unknown keys are rejected. Throws ConfigError.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::filesystem::path& path);

// parse_config() plus validate_config(). The ConfigError lists every problem,
// one per line.
SimConfig parse_and_validate(const std::string& json_text);

// Fully resolved configuration, defaults included, as pretty JSON. The output
// parses back to an equal config.
std::string describe_config(const SimConfig& config);

// Seconds, or "inf" for an absent coherence time. Throws ConfigError.
CoherenceTime parse_coherence(const std::string& text);

}  // namespace radarq
