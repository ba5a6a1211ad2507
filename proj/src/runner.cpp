#include "secest/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>

#include <json.hpp>

#include "secest/trace_io.hpp"
#include "svg_plot.hpp"

namespace secest::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ScenarioConfig with_overrides(ScenarioConfig cfg, const RunFlags& flags) {
  if (flags.out) cfg.output.dir = *flags.out;
  if (flags.seed) cfg.sim.seed = *flags.seed;
  if (flags.tol) cfg.synthesis.tol = *flags.tol;
  if (flags.no_plots) cfg.output.plots = false;
  return cfg;
}

std::string default_gains_dir(const ScenarioConfig& cfg) {
  return cfg.output.gains_dir.empty() ? cfg.output.dir + "/gains" : cfg.output.gains_dir;
}

std::vector<IndexSet> required_sets(const ScenarioConfig& cfg) {
  const int N = cfg.system.sensor_count();
  const int M = cfg.attack_budget;
  std::vector<IndexSet> sets = k_subsets(N, N - M);
  if (M > 0) {
    for (IndexSet& s : k_subsets(N, N - 2 * M)) sets.push_back(std::move(s));
  }
  return sets;
}

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

GainsOutcome obtain_gains(const ScenarioConfig& cfg, const std::string& gains_dir,
                          bool write_files) {
  GainsOutcome out;
  if (write_files) fs::create_directories(gains_dir);

  lmi::SynthesisOptions opts = cfg.synthesis;
  for (const IndexSet& set : required_sets(cfg)) {
    if (out.gains.count(set)) continue;
    const std::string path = gains_dir + "/gains_" + set.label() + ".json";
    bool cached = false;
    if (fs::exists(path)) {
      GainsFile file = load_gains(path);  // throws on tampered files, naming the path
      if (file.system_hash == cfg.system_hash && file.gains.set == set) {
        file.gains.validate_shapes(cfg.system.state_dim(), cfg.system.sensor_count());
        lmi::LmiProblem prob{cfg.system.A, cfg.system.H, set, cfg.system.d_upper};
        const auto v = lmi::verify(prob, lmi::gains_to_candidate(file.gains), opts.tol,
                                   opts.pd_floor);
        if (v.ok) {
          out.gains[set] = std::move(file);
          cached = true;
        }
      }
    }
    if (cached) continue;

    lmi::LmiProblem prob{cfg.system.A, cfg.system.H, set, cfg.system.d_upper};
    const lmi::SynthesisResult res = lmi::synthesize(prob, opts);
    ++out.synthesized;
    if (!res.feasible) {
      out.infeasible.push_back(set.label() + " (best lambda_max " + fmtg(res.lambda_max) + ")");
      continue;
    }
    GainsFile file;
    file.gains = res.gains;
    file.lambda_max = res.lambda_max;
    file.seed = opts.seed;
    file.system_hash = cfg.system_hash;
    if (write_files) save_gains(file, path);
    out.gains[set] = std::move(file);
  }

  out.ok = out.infeasible.empty();
  if (!out.ok) {
    out.message = "synthesis infeasible for index sets: ";
    for (size_t i = 0; i < out.infeasible.size(); ++i) {
      out.message += (i ? ", " : "") + out.infeasible[i];
    }
  } else if (out.synthesized == 0) {
    out.message = "all gains cached (system hash match); nothing to do";
  } else {
    out.message = "synthesized " + std::to_string(out.synthesized) + " gain sets";
  }
  return out;
}

namespace {

struct GridSeries {
  std::vector<Vector> v_true_sq;   // ground-truth squared voltages per sample
  std::vector<Vector> v_est_sq;    // reconstructed from the selected estimate
  std::vector<Vector> raw_reading; // corrupted voltage-domain readings
};

GridSeries grid_series(const ScenarioConfig& cfg, const SimTrace& trace) {
  GridSeries gs;
  const auto& topo = *cfg.grid_topology;
  const double vref2 = topo.v_ref * topo.v_ref;
  for (int s = 0; s < trace.samples(); ++s) {
    const Vector z = cfg.system.output_linear(trace.x[static_cast<size_t>(s)],
                                              trace.times[static_cast<size_t>(s)]);
    Vector vt = (vref2 - z.array()).matrix();
    gs.v_true_sq.push_back(vt);
    gs.v_est_sq.push_back(
        grid::reconstruct_voltage(topo, trace.selected[static_cast<size_t>(s)]).v_sq);
    Vector raw(vt.size());
    for (Eigen::Index i = 0; i < vt.size(); ++i) {
      const double v = std::sqrt(std::max(vt(i), 0.0));
      raw(i) = v + cfg.attack.signal(static_cast<int>(i) + 1, trace.times[static_cast<size_t>(s)]);
    }
    gs.raw_reading.push_back(raw);
  }
  return gs;
}

void write_report_json(const ScenarioConfig& cfg, const ScenarioOutcome& outcome,
                       const std::string& path) {
  json j;
  j["name"] = cfg.name;
  j["system_hash"] = cfg.system_hash;
  j["exit_code"] = outcome.exit_code;
  j["truncated"] = outcome.trace.truncated;
  if (outcome.trace.truncated) j["truncated_at"] = outcome.trace.truncated_at;
  json verdicts = json::array();
  for (const Verdict& v : outcome.verdicts) {
    verdicts.push_back({{"id", v.id}, {"pass", v.pass}, {"detail", v.detail}});
  }
  j["verdicts"] = verdicts;
  json events = json::array();
  for (const FalseAlarmEvent& e : outcome.false_alarms_averted) {
    events.push_back({{"sensor", e.sensor}, {"raw_exit_time", e.raw_exit_time}});
  }
  j["false_alarms_averted"] = events;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

void write_plots(const ScenarioConfig& cfg, const ScenarioOutcome& outcome,
                 const std::string& dir) {
  fs::create_directories(dir);
  const SimTrace& trace = outcome.trace;
  const auto& times = trace.times;

  {
    SvgPlot plot("selected estimate error", "t", "|x - xhat_sigma|");
    plot.add_line(times, trace.selected_error(), "error", plot_color(0));
    if (!trace.sigma.empty() && trace.sigma.front() >= 0 && cfg.attack_budget >= 0) {
      try {
        const auto bound = selected_error_bound_series(times, trace.sigma, outcome.envelopes,
                                                       cfg.attack.support());
        plot.add_line(times, bound, "three-term bound", plot_color(1), true);
      } catch (const std::exception&) {
        // bound undefined (e.g. support exceeds budget in a library-level run)
      }
    }
    plot.write(dir + "/error.svg");
  }
  {
    SvgPlot plot("consistency measures", "t", "pi_S");
    for (size_t b = 0; b < trace.tier1_sets.size(); ++b) {
      std::vector<double> pis(times.size());
      for (size_t s = 0; s < times.size(); ++s) pis[s] = trace.pis[s][b];
      plot.add_line(times, pis, "S=" + trace.tier1_sets[b].label(),
                    plot_color(static_cast<int>(b)));
    }
    plot.write(dir + "/pi.svg");
  }
  {
    SvgPlot plot("selected index set", "t", "tier-1 set index");
    std::vector<double> sig(times.size());
    for (size_t s = 0; s < times.size(); ++s) sig[s] = trace.sigma[s];
    plot.add_line(times, sig, "sigma(t)", plot_color(0));
    plot.write(dir + "/sigma.svg");
  }
  {
    SvgPlot plot("plant state and selected estimate", "t", "x");
    const int n = trace.x.empty() ? 0 : static_cast<int>(trace.x.front().size());
    for (int i = 0; i < n; ++i) {
      std::vector<double> xs(times.size()), xh(times.size());
      for (size_t s = 0; s < times.size(); ++s) {
        xs[s] = trace.x[s](i);
        xh[s] = trace.selected[s].size() ? trace.selected[s](i) : 0.0;
      }
      plot.add_line(times, xs, "x[" + std::to_string(i) + "]", plot_color(i));
      plot.add_line(times, xh, "xhat[" + std::to_string(i) + "]", plot_color(i), true);
    }
    plot.write(dir + "/states.svg");
  }
  if (cfg.is_grid()) {
    const GridSeries gs = grid_series(cfg, trace);
    SvgPlot plot("customer voltages", "t", "v (p.u.)");
    const auto& topo = *cfg.grid_topology;
    const int n = topo.customers();
    for (int i = 0; i < n; ++i) {
      std::vector<double> vt(times.size()), ve(times.size());
      for (size_t s = 0; s < times.size(); ++s) {
        vt[s] = std::sqrt(std::max(gs.v_true_sq[s](i), 0.0));
        ve[s] = std::sqrt(std::max(gs.v_est_sq[s](i), 0.0));
      }
      plot.add_line(times, vt, "v[" + std::to_string(i + 1) + "]", plot_color(i));
      plot.add_line(times, ve, "vhat[" + std::to_string(i + 1) + "]", plot_color(i), true);
    }
    for (int i : cfg.attack.support().members()) {
      std::vector<double> raw(times.size());
      for (size_t s = 0; s < times.size(); ++s) raw[s] = gs.raw_reading[s](i - 1);
      plot.add_line(times, raw, "raw y[" + std::to_string(i) + "]", "#000000", true);
    }
    plot.add_hline(topo.v_ref + topo.delta, "band", "#999999");
    plot.add_hline(topo.v_ref - topo.delta, "", "#999999");
    plot.write(dir + "/voltage.svg");
  }
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& raw_cfg, const RunFlags& flags) {
  const ScenarioConfig cfg = with_overrides(raw_cfg, flags);
  ScenarioOutcome outcome;

  const std::string out_dir = cfg.output.dir;
  if (flags.write_outputs) fs::create_directories(out_dir);

  GainsOutcome gains = obtain_gains(cfg, default_gains_dir(cfg), flags.write_outputs);
  if (!gains.ok) {
    outcome.exit_code = kExitInfeasible;
    outcome.message = gains.message;
    return outcome;
  }

  // deterministic initial-state resolution: plant first, then observers
  std::mt19937_64 rng(cfg.sim.seed);
  const int n = cfg.system.state_dim();
  outcome.x0 = resolve_init(cfg.x0, n, rng);
  const Vector xhat0 = resolve_init(cfg.xhat0, n, rng);

  GainProvider provider = [&gains](const IndexSet& set) -> std::optional<ObserverGains> {
    auto it = gains.gains.find(set);
    if (it == gains.gains.end()) return std::nullopt;
    return it->second.gains;
  };
  ObserverBank bank = build_bank(cfg.system, cfg.attack_budget, provider, xhat0,
                                 cfg.xhat0_overrides.empty() ? nullptr : &cfg.xhat0_overrides);
  outcome.envelopes = bank_envelopes(bank, outcome.x0, cfg.system.d_upper.maxCoeff());

  Simulator sim(cfg.system, std::move(bank), cfg.attack, cfg.measurement);
  outcome.trace = sim.run(outcome.x0, cfg.sim);
  const SimTrace& trace = outcome.trace;

  // ---- checks ----
  const auto& checks = cfg.checks;
  auto add_verdict = [&outcome](std::string id, bool pass, std::string detail) {
    outcome.verdicts.push_back({std::move(id), pass, std::move(detail)});
  };

  if (checks.envelope) {
    for (int tier = 1; tier <= 2; ++tier) {
      const auto& sets = tier == 1 ? trace.tier1_sets : trace.tier2_sets;
      const auto& envs = tier == 1 ? outcome.envelopes.tier1 : outcome.envelopes.tier2;
      const auto& e0s = tier == 1 ? outcome.envelopes.tier1_e0 : outcome.envelopes.tier2_e0;
      const auto& sups = tier == 1 ? trace.attack_sup1 : trace.attack_sup2;
      for (size_t b = 0; b < sets.size(); ++b) {
        std::vector<double> err = trace.observer_error(tier, static_cast<int>(b));
        std::vector<double> asup(trace.times.size());
        for (size_t s = 0; s < asup.size(); ++s) asup[s] = sups[s][b];
        const double scale = envs[b].beta(e0s[b], 0.0) + envs[b].gamma(asup.back());
        const double slack = checks.slack_abs + checks.slack_rel * scale;
        const EnvelopeCheck chk = check_envelope(trace.times, err, envs[b], asup, slack);
        add_verdict(std::string("observer.iss_envelope[") + (tier == 1 ? "S" : "P") +
                        sets[b].label() + "]",
                    chk.ok,
                    chk.ok ? "max excess " + fmtg(chk.max_excess)
                           : "violated at t=" + fmtg(chk.first_violation_time) + " by " +
                                 fmtg(chk.max_excess));
      }
    }
  }

  std::vector<double> bound_series;
  if (checks.theorem2 || (cfg.is_grid() && checks.safety)) {
    bound_series = selected_error_bound_series(trace.times, trace.sigma, outcome.envelopes,
                                               cfg.attack.support());
  }
  if (checks.theorem2) {
    const double scale = bound_series.empty() ? 0.0 : bound_series.front();
    const double slack = checks.slack_abs + checks.slack_rel * scale;
    const BoundCheck chk = selected_error_bound(trace.times, trace.selected_error(), trace.sigma,
                                                outcome.envelopes, cfg.attack.support(), slack);
    add_verdict("selector.theorem2_bound", chk.ok,
                chk.ok ? "max excess " + fmtg(chk.max_excess)
                       : "violated at t=" + fmtg(chk.first_violation_time) + " by " +
                             fmtg(chk.max_excess));
  }

  double settle_time = std::numeric_limits<double>::infinity();
  {
    const std::vector<double> err = trace.selected_error();
    int last_bad = -1;
    for (int s = 0; s < trace.samples(); ++s) {
      if (err[static_cast<size_t>(s)] > checks.epsilon) last_bad = s;
    }
    if (last_bad + 1 < trace.samples()) {
      settle_time = trace.times[static_cast<size_t>(last_bad + 1)];
    }
  }
  if (checks.convergence) {
    const double deadline = 10.0 / outcome.envelopes.slowest_rate();
    bool pass = !trace.truncated && !trace.times.empty() &&
                trace.times.back() + 1e-9 >= deadline && settle_time <= deadline;
    std::string detail;
    if (trace.truncated) {
      detail = "run truncated at t=" + fmtg(trace.truncated_at);
    } else if (!trace.times.empty() && trace.times.back() + 1e-9 < deadline) {
      detail = "horizon " + fmtg(trace.times.back()) + " does not cover the deadline " +
               fmtg(deadline);
    } else {
      detail = "error below " + fmtg(checks.epsilon) + " from t=" + fmtg(settle_time) +
               " (deadline " + fmtg(deadline) + ")";
    }
    add_verdict("selector.convergence", pass, detail);
  }

  if (cfg.is_grid() && checks.safety) {
    const auto& topo = *cfg.grid_topology;
    const GridSeries gs = grid_series(cfg, trace);

    // Prop-2-style bound: |v_i^2 - vhat_i^2| <= |H_i| * (three-term bound)
    bool prop2_ok = true;
    double prop2_excess = -std::numeric_limits<double>::infinity();
    double prop2_when = -1.0;
    const Matrix H = cfg.system.H;
    const double scale = bound_series.empty() ? 0.0 : bound_series.front();
    const double slack = checks.slack_abs + checks.slack_rel * scale;
    for (int s = 0; s < trace.samples(); ++s) {
      for (int i = 0; i < topo.customers(); ++i) {
        const double row_norm = H.row(i).cwiseAbs().sum();
        const double lhs = std::abs(gs.v_true_sq[static_cast<size_t>(s)](i) -
                                    gs.v_est_sq[static_cast<size_t>(s)](i));
        const double excess = lhs - (row_norm * bound_series[static_cast<size_t>(s)] + slack);
        if (excess > prop2_excess) {
          prop2_excess = excess;
          if (excess > 0 && prop2_ok) {
            prop2_ok = false;
            prop2_when = trace.times[static_cast<size_t>(s)];
          }
        }
      }
    }
    add_verdict("grid.prop2_voltage_bound", prop2_ok,
                prop2_ok ? "max excess " + fmtg(prop2_excess)
                         : "violated at t=" + fmtg(prop2_when) + " by " + fmtg(prop2_excess));

    // after the transient, the monitor on reconstructed voltages must agree
    // with the monitor on the true voltages
    const auto true_flags = grid::safety_monitor(gs.v_true_sq, topo.v_ref, topo.delta);
    const auto est_flags = grid::safety_monitor(gs.v_est_sq, topo.v_ref, topo.delta);
    bool agree = true;
    double disagree_at = -1.0;
    for (int s = 0; s < trace.samples(); ++s) {
      if (trace.times[static_cast<size_t>(s)] < settle_time) continue;
      if (true_flags[static_cast<size_t>(s)] != est_flags[static_cast<size_t>(s)]) {
        agree = false;
        disagree_at = trace.times[static_cast<size_t>(s)];
        break;
      }
    }
    add_verdict("grid.band_agreement_settled", agree,
                agree ? "monitor on vhat matches ground truth from t=" + fmtg(settle_time)
                      : "first disagreement at t=" + fmtg(disagree_at));

    // false alarms averted: raw reading leaves the band while the true and
    // reconstructed voltages stay inside
    for (int sensor : cfg.attack.support().members()) {
      const int i = sensor - 1;
      double raw_exit = -1.0;
      bool est_always_in = true;
      bool true_always_in = true;
      for (int s = 0; s < trace.samples(); ++s) {
        const double raw = gs.raw_reading[static_cast<size_t>(s)](i);
        if (raw_exit < 0 && (raw < topo.v_ref - topo.delta || raw > topo.v_ref + topo.delta)) {
          raw_exit = trace.times[static_cast<size_t>(s)];
        }
        if (!est_flags[static_cast<size_t>(s)][static_cast<size_t>(i)]) est_always_in = false;
        if (!true_flags[static_cast<size_t>(s)][static_cast<size_t>(i)]) true_always_in = false;
      }
      if (raw_exit >= 0 && est_always_in && true_always_in) {
        outcome.false_alarms_averted.push_back({sensor, raw_exit});
      }
    }
  }

  bool all_pass = true;
  for (const Verdict& v : outcome.verdicts) all_pass = all_pass && v.pass;
  if (!all_pass) outcome.exit_code = kExitCheckFailed;

  if (flags.write_outputs) {
    if (cfg.output.trace) {
      write_trace_csv(trace, out_dir + "/trace.csv", cfg.output.decimation);
    }
    write_report_json(cfg, outcome, out_dir + "/report.json");
    if (cfg.output.plots) write_plots(cfg, outcome, out_dir + "/plots");
  }
  return outcome;
}

namespace {

int guard_config(const std::string& config_path, const RunFlags& flags,
                 int (*body)(const ScenarioConfig&, const RunFlags&)) {
  try {
    const ScenarioConfig cfg = parse_scenario_file(config_path);
    return body(cfg, flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

void print_verdicts(const ScenarioOutcome& outcome) {
  for (const Verdict& v : outcome.verdicts) {
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.id << ": " << v.detail << "\n";
  }
  for (const FalseAlarmEvent& e : outcome.false_alarms_averted) {
    std::cout << "[EVENT] false-alarm-averted: sensor " << e.sensor
              << " raw reading left the band at t=" << e.raw_exit_time
              << " while the reconstructed voltage stayed in band\n";
  }
}

}  // namespace

int cmd_synthesize(const std::string& config_path, const RunFlags& flags) {
  return guard_config(config_path, flags, [](const ScenarioConfig& raw, const RunFlags& f) {
    const ScenarioConfig cfg = with_overrides(raw, f);
    const std::string gains_dir = default_gains_dir(cfg);
    GainsOutcome gains = obtain_gains(cfg, gains_dir, true);
    std::cout << gains.message << "\n";
    if (!gains.ok) return kExitInfeasible;
    std::ofstream summary(gains_dir + "/summary.txt");
    summary << "set\tnu\tmu\tlambda_max\n";
    std::cout << "set\tnu\tmu\tlambda_max\n";
    for (const auto& [set, file] : gains.gains) {
      const std::string line = set.label() + "\t" + fmtg(file.gains.nu) + "\t" +
                               fmtg(file.gains.mu) + "\t" + fmtg(file.lambda_max);
      summary << line << "\n";
      std::cout << line << "\n";
    }
    return kExitOk;
  });
}

int cmd_run(const std::string& config_path, const RunFlags& flags) {
  return guard_config(config_path, flags, [](const ScenarioConfig& cfg, const RunFlags& f) {
    ScenarioOutcome outcome = run_scenario(cfg, f);
    if (outcome.exit_code == kExitInfeasible) {
      std::cerr << outcome.message << "\n";
      return outcome.exit_code;
    }
    print_verdicts(outcome);
    if (outcome.trace.truncated) {
      std::cout << "trace truncated at t=" << outcome.trace.truncated_at
                << " (state overflow)\n";
    }
    std::cout << (outcome.exit_code == kExitOk ? "all checks passed\n" : "checks failed\n");
    return outcome.exit_code;
  });
}

int cmd_check(const std::string& config_path, const RunFlags& flags) {
  RunFlags quiet = flags;
  quiet.write_outputs = false;
  return cmd_run(config_path, quiet);
}

int cmd_report(const std::string& config_path, const RunFlags& flags) {
  return guard_config(config_path, flags, [](const ScenarioConfig& raw, const RunFlags& f) {
    const ScenarioConfig cfg = with_overrides(raw, f);
    const std::string out_dir = cfg.output.dir;
    const std::string trace_path = out_dir + "/trace.csv";
    if (!fs::exists(trace_path)) {
      std::cerr << "report: no trace at " << trace_path << " (run the scenario first)\n";
      return kExitConfig;
    }
    const TraceTable table = read_trace_csv(trace_path);
    const auto times = table.numeric_column("t");

    fs::create_directories(out_dir + "/plots");
    // consistency plot straight from the trace file
    SvgPlot pi_plot("consistency measures", "t", "pi_S");
    int color = 0;
    for (const std::string& col : table.header) {
      if (col.rfind("pi_S", 0) == 0) {
        pi_plot.add_line(times, table.numeric_column(col), col.substr(3), plot_color(color++));
      }
    }
    pi_plot.write(out_dir + "/plots/pi.svg");

    SvgPlot x_plot("plant state", "t", "x");
    color = 0;
    for (const std::string& col : table.header) {
      if (col.rfind("x[", 0) == 0) {
        x_plot.add_line(times, table.numeric_column(col), col, plot_color(color++));
      }
    }
    x_plot.write(out_dir + "/plots/states_from_trace.svg");

    std::ofstream summary(out_dir + "/summary.txt");
    summary << "scenario: " << cfg.name << "\n";
    summary << "samples: " << table.rows.size() << "\n";
    if (!times.empty()) summary << "horizon: " << times.back() << "\n";
    const int sigma_col = table.column("sigma");
    if (sigma_col >= 0 && !table.rows.empty()) {
      summary << "final sigma: " << table.rows.back()[static_cast<size_t>(sigma_col)] << "\n";
    }
    if (fs::exists(out_dir + "/report.json")) {
      std::ifstream in(out_dir + "/report.json");
      json j;
      in >> j;
      for (const auto& v : j["verdicts"]) {
        summary << (v["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << v["id"].get<std::string>()
                << ": " << v["detail"].get<std::string>() << "\n";
      }
    }
    std::cout << "report written to " << out_dir << "\n";
    return kExitOk;
  });
}

}  // namespace secest::cli
