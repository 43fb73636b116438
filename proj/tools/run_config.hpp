#pragma once

// Run configuration for the driver: a plain-text key = value file merged with
// command-line overrides. Flags always win over the file.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hkglue/checks.hpp"

namespace hkglue::cli {

enum class Format { Json, Csv };

struct RunConfig {
  std::string command;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::optional<Format> format;
  std::vector<double> ladder;
  std::optional<int> samples;
  CheckTolerances tolerances;
  // Command-specific keys that are not run keys (zone, tag, bound, ...).
  std::map<std::string, std::string> options;
  // Lines the run-config parser did not claim, kept for the model parser.
  std::string model_text;

  Format format_or(Format f) const { return format.value_or(f); }
  std::string option(const std::string& key, const std::string& fallback) const;
  double option_number(const std::string& key, double fallback) const;
  int option_int(const std::string& key, int fallback) const;
  bool option_bool(const std::string& key, bool fallback) const;
};

// Parses "1e-2, 1e-3, 1e-4". ConfigError on an empty entry or bad number.
std::vector<double> parse_ladder(const std::string& text);

// Keys: seed, out, format, ladder, samples, tol.<name> and the command option
// keys listed in option_keys(). With keep_model_keys, unknown keys are kept
// verbatim in model_text; otherwise they are a ConfigError naming the line.
void load_config_text(RunConfig& cfg, const std::string& text, const std::string& source, bool keep_model_keys);
void load_config_file(RunConfig& cfg, const std::string& path, bool keep_model_keys);
const std::vector<std::string>& option_keys();

}  // namespace hkglue::cli
