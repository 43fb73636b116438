#include "run_config.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "hkglue/errors.hpp"

namespace hkglue::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_number(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(where + ": trailing characters in '" + v + "'");
  return x;
}

}  // namespace

const std::vector<std::string>& option_keys() {
  static const std::vector<std::string> keys{"zone", "t", "n", "divide_logs", "tag", "bound", "periods",
                                             "lambda", "trials", "ift_trials", "inject_nonharmonic", "roots"};
  return keys;
}

std::string RunConfig::option(const std::string& key, const std::string& fallback) const {
  const auto it = options.find(key);
  return it == options.end() ? fallback : it->second;
}

double RunConfig::option_number(const std::string& key, double fallback) const {
  const auto it = options.find(key);
  return it == options.end() ? fallback : to_number(it->second, "option " + key);
}

int RunConfig::option_int(const std::string& key, int fallback) const {
  const double v = option_number(key, fallback);
  if (v != static_cast<int>(v)) throw ConfigError("option " + key + " must be an integer");
  return static_cast<int>(v);
}

bool RunConfig::option_bool(const std::string& key, bool fallback) const {
  const std::string v = option(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("option " + key + " must be true or false, got '" + v + "'");
}

std::vector<double> parse_ladder(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("ladder: empty entry in '" + text + "'");
    out.push_back(to_number(item, "ladder"));
  }
  if (out.empty()) throw ConfigError("ladder: no values");
  return out;
}

void load_config_text(RunConfig& cfg, const std::string& text, const std::string& source, bool keep_model_keys) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::ostringstream model;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = fmt::format("{}:{}", source, lineno);
    const std::string raw = line;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const std::string at = where + ": key '" + key + "'";
    try {
      if (key == "seed") {
        const double s = to_number(value, at);
        if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s))) throw ConfigError(at + ": bad seed");
        cfg.seed = static_cast<std::uint64_t>(s);
      } else if (key == "out") {
        cfg.out = value;
      } else if (key == "format") {
        if (value == "json") cfg.format = Format::Json;
        else if (value == "csv") cfg.format = Format::Csv;
        else throw ConfigError(at + ": format must be json or csv");
      } else if (key == "ladder") {
        cfg.ladder = parse_ladder(value);
      } else if (key == "samples") {
        const double s = to_number(value, at);
        if (s < 1 || s != static_cast<int>(s)) throw ConfigError(at + ": samples must be a positive integer");
        cfg.samples = static_cast<int>(s);
      } else if (key.rfind("tol.", 0) == 0) {
        set_tolerance(cfg.tolerances, key.substr(4), to_number(value, at));
      } else if (keep_model_keys && key == "tag") {
        // The model grammar owns 'tag' when a model is being configured.
        model << raw << '\n';
      } else if (std::find(option_keys().begin(), option_keys().end(), key) != option_keys().end()) {
        cfg.options[key] = value;
      } else if (keep_model_keys) {
        model << raw << '\n';
      } else {
        throw ConfigError(at + ": unknown key");
      }
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      throw ConfigError(msg.rfind(source, 0) == 0 ? msg : at + ": " + msg);
    }
  }
  cfg.model_text += model.str();
}

void load_config_file(RunConfig& cfg, const std::string& path, bool keep_model_keys) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  load_config_text(cfg, ss.str(), path, keep_model_keys);
}

}  // namespace hkglue::cli
