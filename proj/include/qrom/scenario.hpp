#pragma once

// Scenario files: one `key = value` per line, `#` starts a comment.
// See README.md for the full key table.

#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qrom/dns.hpp"
#include "qrom/domain.hpp"
#include "qrom/eigensolver.hpp"
#include "qrom/metrics.hpp"
#include "qrom/pod.hpp"
#include "qrom/rom.hpp"

namespace qrom {

/// Flat key/value store with strict key checking.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<input>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  /// Keys never read through an accessor; used to reject typos.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
  mutable std::set<std::string> used_;
};

enum class PotentialKind { None, Field, Pyramids };

struct Scenario {
  std::string name;
  StructureSpec structure;
  PotentialKind potential = PotentialKind::None;
  std::vector<PyramidSpec> pyramids;
  TrainingPlan plan;
  int dns_states = 8;
  EigenOptions eigen;
  KineticScheme kinetic = KineticScheme::Stiffness;
  SweepOptions report;
  int solve_modes = 13;
  /// Named parameter sets, e.g. "test", "extrapolation".
  std::map<std::string, ScenarioParams> named_params;
  /// Echo of every key/value as read.
  std::map<std::string, std::string> resolved;
};

Scenario parse_scenario(const KeyValueConfig& config);
Scenario load_scenario(const std::filesystem::path& path);

/// Everything derived from a scenario on its grid.
struct ScenarioFields {
  Grid grid;
  MassField mass;
  PotentialAssembly assembly;
};

ScenarioFields build_fields(const Scenario& scenario);

std::vector<std::string> param_names(const Scenario& scenario);

/// "Ex=25,Ey=-10" (unlisted parameters are zero), "@name" for a named set,
/// or "" for all zeros.
ScenarioParams parse_params(const Scenario& scenario, const std::string& text);

/// "1:20", "40,225" or "13".
std::vector<int> parse_mode_list(const std::string& text);

}  // namespace qrom
