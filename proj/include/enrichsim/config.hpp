#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "enrichsim/experiments.hpp"
#include "enrichsim/trial.hpp"

namespace enrichsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with dotted section names. '#' starts a
/// comment; keys are unique; parse errors carry the line number.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text,
                             const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);

  /// Keys sorted, one `key = value` per line; hashing and round-trip use this.
  std::string canonical_text() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::string origin_;

  [[noreturn]] void missing(const std::string& key) const;
};

/// Readers for the config sections. Unknown scenario `grid.sets` letters or
/// malformed values throw ConfigError naming the offending key.
Scenario scenario_from_config(const Config& cfg,
                              const std::string& prefix = "scenario.");
DesignSpec design_from_config(const Config& cfg);
ScenarioGrid grid_from_config(const Config& cfg);

/// A one-shot interim decision case: observed statistics are supplied in the
/// log-rank convention (`interim.z_f`, `interim.z_s`), event counts per
/// population anchor the conditional-power formula, and predictions come
/// either from a historical model applied to `surrogate.theta_*` or directly
/// via `interim.predicted_*` (log-rank convention).
struct InterimCase {
  InterimSnapshot snapshot;
  DecisionConfig decision;
};

InterimCase interim_from_config(const Config& cfg);

}  // namespace enrichsim
