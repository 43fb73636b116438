#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace hkglue::cli {

// Each command writes its report to `out` and returns the process exit code:
// 0 when every check it ran passed, 1 otherwise. Configuration problems
// propagate as ConfigError / PreconditionError and map to exit code 2.
int cmd_model_check(const RunConfig& cfg, std::ostream& out);
int cmd_greens_probe(const RunConfig& cfg, std::ostream& out);
int cmd_glue_scan(const RunConfig& cfg, std::ostream& out);
int cmd_donaldson_selftest(const RunConfig& cfg, std::ostream& out);
int cmd_scales_profile(const RunConfig& cfg, std::ostream& out);
int cmd_topology(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

struct CommandInfo {
  std::string name;
  std::string summary;
  int (*run)(const RunConfig&, std::ostream&);
  // Whether unknown config keys describe a model (model-check only).
  bool model_keys;
};
const std::vector<CommandInfo>& commands();

}  // namespace hkglue::cli
