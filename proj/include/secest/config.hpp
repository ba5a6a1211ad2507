#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "secest/grid.hpp"
#include "secest/lmi.hpp"
#include "secest/sim.hpp"
#include "secest/system.hpp"

namespace secest::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Initial-state spec: explicit values or a seeded uniform box.
struct InitSpec {
  enum class Kind { Zeros, Values, RandomBox };
  Kind kind = Kind::Zeros;
  Vector values;
  double lo = 0.0;
  double hi = 0.0;
};

Vector resolve_init(const InitSpec& spec, int dim, std::mt19937_64& rng);

struct ChecksConfig {
  bool envelope = true;
  bool theorem2 = true;
  bool convergence = true;
  bool safety = true;  // grid scenarios only
  double epsilon = 1e-3;
  double slack_abs = 1e-6;
  double slack_rel = 1e-3;
};

struct OutputConfig {
  std::string dir = "out";
  bool trace = true;
  bool plots = true;
  int decimation = 1;        // extra thinning applied when writing the trace
  std::string gains_dir;     // defaults to <dir>/gains
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::optional<grid::GridTopology> grid_topology;
  LureSystem system;  // raw, or compiled from the grid section
  int attack_budget = 0;
  AttackScenario attack;
  MeasurementModel measurement;
  SimConfig sim;
  InitSpec x0;
  InitSpec xhat0;
  std::map<IndexSet, Vector> xhat0_overrides;
  lmi::SynthesisOptions synthesis;
  OutputConfig output;
  ChecksConfig checks;
  std::string system_hash;  // content hash of the system section

  bool is_grid() const { return grid_topology.has_value(); }
};

/// Parses and validates a scenario file. Throws ConfigError with a message
/// naming the offending key or constraint (unknown keys are rejected).
ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin = "<inline>");

}  // namespace secest::cli
