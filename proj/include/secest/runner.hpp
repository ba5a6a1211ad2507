#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secest/config.hpp"
#include "secest/gains_io.hpp"
#include "secest/selector.hpp"
#include "secest/sim.hpp"

namespace secest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitCheckFailed = 4;

struct RunFlags {
  std::optional<std::string> out;        // overrides output.dir
  std::optional<std::uint64_t> seed;     // overrides sim.seed
  std::optional<double> tol;             // overrides synthesis.tol
  bool no_plots = false;
  bool write_outputs = true;             // `check` runs without artifacts
};

struct GainsOutcome {
  bool ok = false;
  std::map<IndexSet, GainsFile> gains;   // every required set, both tiers
  std::vector<std::string> infeasible;   // labels, when !ok
  int synthesized = 0;                   // 0 with a warm cache means no-op
  std::string message;
};

/// Loads cached gains (hash-checked) and synthesizes the rest; writes files
/// when asked. Throws ConfigError on unreadable/tampered gains files.
GainsOutcome obtain_gains(const ScenarioConfig& cfg, const std::string& gains_dir,
                          bool write_files);

struct Verdict {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct FalseAlarmEvent {
  int sensor = 0;      // 1-based
  double raw_exit_time = -1.0;   // first time the raw reading leaves the band
};

struct ScenarioOutcome {
  int exit_code = kExitOk;
  std::string message;
  SimTrace trace;
  BankEnvelopes envelopes;
  Vector x0;
  std::vector<Verdict> verdicts;
  std::vector<FalseAlarmEvent> false_alarms_averted;
};

/// Full pipeline: gains -> bank -> simulation -> checks -> artifacts.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunFlags& flags);

int cmd_synthesize(const std::string& config_path, const RunFlags& flags);
int cmd_run(const std::string& config_path, const RunFlags& flags);
int cmd_check(const std::string& config_path, const RunFlags& flags);
int cmd_report(const std::string& config_path, const RunFlags& flags);

}  // namespace secest::cli
