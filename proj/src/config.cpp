#include "secest/config.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace secest::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    }
  }
}

double get_number(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(ctx + ": key '" + key + "' must be a number");
  return j[key].get<double>();
}

double get_number_or(const json& j, const std::string& key, double fallback,
                     const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(ctx + ": key '" + key + "' must be a number");
  return j[key].get<double>();
}

bool get_bool_or(const json& j, const std::string& key, bool fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(ctx + ": key '" + key + "' must be a boolean");
  return j[key].get<bool>();
}

std::string get_string_or(const json& j, const std::string& key, const std::string& fallback,
                          const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(ctx + ": key '" + key + "' must be a string");
  return j[key].get<std::string>();
}

Vector get_vector(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
  const json& arr = j[key];
  if (!arr.is_array()) throw ConfigError(ctx + ": key '" + key + "' must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ConfigError(ctx + ": key '" + key + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

Matrix get_matrix(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
  const json& arr = j[key];
  if (!arr.is_array() || arr.empty() || !arr[0].is_array()) {
    throw ConfigError(ctx + ": key '" + key + "' must be an array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(arr.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(arr[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = arr[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(ctx + ": key '" + key + "' has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<size_t>(c)].is_number()) {
        throw ConfigError(ctx + ": key '" + key + "' must hold numbers");
      }
      m(i, c) = row[static_cast<size_t>(c)].get<double>();
    }
  }
  return m;
}

Signal parse_signal(const json& j, const std::string& ctx, bool allow_sensor_key) {
  std::set<std::string> allowed = {"kind"};
  if (allow_sensor_key) allowed.insert("sensor");
  const std::string kind = get_string_or(j, "kind", "", ctx);
  if (kind == "zero") {
    check_keys(j, allowed, ctx);
    return Signal::zero();
  }
  if (kind == "bias" || kind == "constant") {
    allowed.insert("value");
    check_keys(j, allowed, ctx);
    return Signal::bias(get_number(j, "value", ctx));
  }
  if (kind == "ramp") {
    allowed.insert("rate");
    check_keys(j, allowed, ctx);
    return Signal::ramp(get_number(j, "rate", ctx));
  }
  if (kind == "sinusoid") {
    allowed.insert("amplitude");
    allowed.insert("omega");
    allowed.insert("phase");
    check_keys(j, allowed, ctx);
    return Signal::sinusoid(get_number(j, "amplitude", ctx), get_number(j, "omega", ctx),
                            get_number_or(j, "phase", 0.0, ctx));
  }
  if (kind == "step") {
    allowed.insert("value");
    allowed.insert("time");
    check_keys(j, allowed, ctx);
    return Signal::step(get_number(j, "value", ctx), get_number(j, "time", ctx));
  }
  if (kind == "table") {
    allowed.insert("times");
    allowed.insert("values");
    check_keys(j, allowed, ctx);
    const Vector ts = get_vector(j, "times", ctx);
    const Vector vs = get_vector(j, "values", ctx);
    return Signal::table(std::vector<double>(ts.data(), ts.data() + ts.size()),
                         std::vector<double>(vs.data(), vs.data() + vs.size()));
  }
  throw ConfigError(ctx + ": unknown signal kind '" + kind + "'");
}

Nonlinearity parse_nonlinearity(const json& j, const std::string& ctx) {
  const std::string kind = get_string_or(j, "kind", "", ctx);
  if (kind == "zero") {
    check_keys(j, {"kind"}, ctx);
    return Nonlinearity::zero();
  }
  if (kind == "linear") {
    check_keys(j, {"kind", "gain"}, ctx);
    return Nonlinearity::linear(get_number(j, "gain", ctx));
  }
  if (kind == "tanh") {
    check_keys(j, {"kind", "amplitude", "rate"}, ctx);
    return Nonlinearity::tanh_sigmoid(get_number(j, "amplitude", ctx),
                                      get_number(j, "rate", ctx));
  }
  if (kind == "saturation") {
    check_keys(j, {"kind", "gain", "limit"}, ctx);
    return Nonlinearity::saturation(get_number(j, "gain", ctx), get_number(j, "limit", ctx));
  }
  throw ConfigError(ctx + ": unknown nonlinearity kind '" + kind + "'");
}

LureSystem parse_lure(const json& j) {
  const std::string ctx = "lure";
  check_keys(j, {"A", "H", "slope_lower", "slope_upper", "nonlinearities", "input"}, ctx);
  LureSystem sys;
  sys.A = get_matrix(j, "A", ctx);
  sys.H = get_matrix(j, "H", ctx);
  sys.d_lower = get_vector(j, "slope_lower", ctx);
  sys.d_upper = get_vector(j, "slope_upper", ctx);
  if (!j.contains("nonlinearities") || !j["nonlinearities"].is_array()) {
    throw ConfigError(ctx + ": missing array 'nonlinearities'");
  }
  int idx = 0;
  for (const json& nj : j["nonlinearities"]) {
    sys.phi.push_back(parse_nonlinearity(nj, ctx + ".nonlinearities[" + std::to_string(idx) + "]"));
    ++idx;
  }
  if (j.contains("input")) {
    if (!j["input"].is_array()) throw ConfigError(ctx + ": 'input' must be an array");
    idx = 0;
    for (const json& sj : j["input"]) {
      sys.input.push_back(parse_signal(sj, ctx + ".input[" + std::to_string(idx) + "]", false));
      ++idx;
    }
  }
  try {
    sys.validate();
  } catch (const std::exception& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  // sampled slope restriction; catches typo'd bounds early
  for (int i = 0; i < sys.sensor_count(); ++i) {
    const auto grid_pts = slope_grid(-10.0, 10.0, 60, 20, 12345);
    const auto& fn = sys.phi[static_cast<size_t>(i)];
    if (!verify_slope([&fn](double s) { return fn(s); }, sys.d_lower(i), sys.d_upper(i), grid_pts,
                      1e-9)) {
      throw ConfigError(ctx + ": nonlinearity " + std::to_string(i + 1) +
                        " violates its declared slope bounds on the sample grid");
    }
  }
  return sys;
}

grid::GridTopology parse_grid(const json& j) {
  const std::string ctx = "grid";
  check_keys(j,
             {"line_resistance", "line_reactance", "drop_resistance", "drop_reactance", "tau",
              "s_max", "rho_g", "rho_c", "q_c", "w_min", "w_m", "w_n", "w_max", "v_ref", "delta",
              "v_head"},
             ctx);
  grid::GridTopology topo;
  topo.line_resistance = get_vector(j, "line_resistance", ctx);
  topo.line_reactance = get_vector(j, "line_reactance", ctx);
  topo.drop_resistance = get_vector(j, "drop_resistance", ctx);
  topo.drop_reactance = get_vector(j, "drop_reactance", ctx);
  topo.tau = get_vector(j, "tau", ctx);
  topo.s_max = get_vector(j, "s_max", ctx);
  topo.rho_g = get_vector(j, "rho_g", ctx);
  topo.rho_c = get_vector(j, "rho_c", ctx);
  topo.q_c = get_vector(j, "q_c", ctx);
  topo.w_min = get_vector(j, "w_min", ctx);
  topo.w_m = get_vector(j, "w_m", ctx);
  topo.w_n = get_vector(j, "w_n", ctx);
  topo.w_max = get_vector(j, "w_max", ctx);
  topo.v_ref = get_number_or(j, "v_ref", 1.0, ctx);
  topo.delta = get_number(j, "delta", ctx);
  topo.v_head = get_number(j, "v_head", ctx);
  try {
    topo.validate();
  } catch (const std::exception& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return topo;
}

InitSpec parse_init(const json& j, const std::string& ctx) {
  InitSpec spec;
  if (j.is_array()) {
    spec.kind = InitSpec::Kind::Values;
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(ctx + ": must hold numbers");
      v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    spec.values = v;
    return spec;
  }
  if (j.is_object()) {
    check_keys(j, {"random_box"}, ctx);
    const json& box = j.at("random_box");
    if (!box.is_array() || box.size() != 2) {
      throw ConfigError(ctx + ": 'random_box' must be [lo, hi]");
    }
    spec.kind = InitSpec::Kind::RandomBox;
    spec.lo = box[0].get<double>();
    spec.hi = box[1].get<double>();
    if (!(spec.lo <= spec.hi)) throw ConfigError(ctx + ": 'random_box' needs lo <= hi");
    return spec;
  }
  throw ConfigError(ctx + ": expected an array of values or {\"random_box\": [lo, hi]}");
}

}  // namespace

Vector resolve_init(const InitSpec& spec, int dim, std::mt19937_64& rng) {
  switch (spec.kind) {
    case InitSpec::Kind::Zeros:
      return Vector::Zero(dim);
    case InitSpec::Kind::Values:
      if (spec.values.size() != dim) {
        throw ConfigError("initial state has dimension " + std::to_string(spec.values.size()) +
                          ", expected " + std::to_string(dim));
      }
      return spec.values;
    case InitSpec::Kind::RandomBox: {
      std::uniform_real_distribution<double> u(spec.lo, spec.hi);
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = u(rng);
      return v;
    }
  }
  return Vector::Zero(dim);
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
  check_keys(j, {"name", "lure", "grid", "attack", "sim", "synthesis", "output", "checks"},
             origin);

  ScenarioConfig cfg;
  cfg.name = get_string_or(j, "name", "scenario", origin);

  const bool has_lure = j.contains("lure");
  const bool has_grid = j.contains("grid");
  if (has_lure == has_grid) {
    throw ConfigError(origin + ": exactly one of 'lure' or 'grid' must be present");
  }
  if (has_grid) {
    cfg.grid_topology = parse_grid(j["grid"]);
    try {
      cfg.system = grid::compile_lure(*cfg.grid_topology);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
    cfg.measurement.kind = MeasurementModel::Kind::SquaredVoltage;
    cfg.measurement.v_ref = cfg.grid_topology->v_ref;
    cfg.system_hash = std::to_string(fnv1a64(j["grid"].dump()));
  } else {
    cfg.system = parse_lure(j["lure"]);
    cfg.measurement.kind = MeasurementModel::Kind::Additive;
    cfg.system_hash = std::to_string(fnv1a64(j["lure"].dump()));
  }
  const int N = cfg.system.sensor_count();

  // attack section
  if (j.contains("attack")) {
    const json& aj = j["attack"];
    const std::string ctx = "attack";
    check_keys(aj, {"budget", "support", "signals", "domain"}, ctx);
    cfg.attack_budget = static_cast<int>(get_number_or(aj, "budget", 0.0, ctx));
    if (cfg.attack_budget < 0) throw ConfigError(ctx + ": budget must be >= 0");
    std::vector<int> support;
    if (aj.contains("support")) {
      for (const json& sj : aj["support"]) {
        if (!sj.is_number_integer()) throw ConfigError(ctx + ": support must hold integers");
        support.push_back(sj.get<int>());
      }
    }
    IndexSet support_set;
    try {
      support_set = IndexSet(support);
    } catch (const std::exception& e) {
      throw ConfigError(ctx + ": " + e.what());
    }
    if (!support_set.empty() && support_set[support_set.size() - 1] > N) {
      throw ConfigError(ctx + ": support member exceeds the sensor count");
    }
    std::map<int, Signal> signals;
    if (aj.contains("signals")) {
      if (!aj["signals"].is_array()) throw ConfigError(ctx + ": 'signals' must be an array");
      int idx = 0;
      for (const json& sj : aj["signals"]) {
        const std::string sctx = ctx + ".signals[" + std::to_string(idx) + "]";
        if (!sj.contains("sensor") || !sj["sensor"].is_number_integer()) {
          throw ConfigError(sctx + ": missing integer 'sensor'");
        }
        const int sensor = sj["sensor"].get<int>();
        if (signals.count(sensor)) throw ConfigError(sctx + ": duplicate signal for sensor");
        signals[sensor] = parse_signal(sj, sctx, true);
        ++idx;
      }
    }
    try {
      cfg.attack = AttackScenario(support_set, std::move(signals));
    } catch (const std::exception& e) {
      throw ConfigError(ctx + ": " + e.what());
    }
    if (support_set.size() > cfg.attack_budget) {
      throw ConfigError(ctx + ": attack support has " + std::to_string(support_set.size()) +
                        " sensors but the declared budget is " +
                        std::to_string(cfg.attack_budget));
    }
    const std::string domain = get_string_or(aj, "domain", has_grid ? "voltage" : "additive", ctx);
    if (domain == "additive") {
      cfg.measurement.kind = MeasurementModel::Kind::Additive;
    } else if (domain == "voltage") {
      if (!has_grid) throw ConfigError(ctx + ": voltage-domain attacks need a grid section");
      cfg.measurement.kind = MeasurementModel::Kind::SquaredVoltage;
    } else {
      throw ConfigError(ctx + ": unknown domain '" + domain + "'");
    }
  }
  if (N <= 2 * cfg.attack_budget) {
    throw ConfigError("attack: the observer bank requires N > 2M (have N = " + std::to_string(N) +
                      " sensors, M = " + std::to_string(cfg.attack_budget) + ")");
  }

  // sim section
  if (j.contains("sim")) {
    const json& sj = j["sim"];
    const std::string ctx = "sim";
    check_keys(sj,
               {"step", "horizon", "method", "decimation", "seed", "x0", "xhat0",
                "xhat0_overrides", "overflow_threshold"},
               ctx);
    cfg.sim.step = get_number_or(sj, "step", cfg.sim.step, ctx);
    cfg.sim.horizon = get_number_or(sj, "horizon", cfg.sim.horizon, ctx);
    const std::string method = get_string_or(sj, "method", "rk4", ctx);
    if (method == "rk4") {
      cfg.sim.method = IntegrationMethod::Rk4;
    } else if (method == "euler") {
      cfg.sim.method = IntegrationMethod::Euler;
    } else {
      throw ConfigError(ctx + ": unknown method '" + method + "'");
    }
    cfg.sim.decimation = static_cast<int>(get_number_or(sj, "decimation", 10.0, ctx));
    cfg.sim.seed = static_cast<std::uint64_t>(get_number_or(sj, "seed", 1.0, ctx));
    cfg.sim.overflow_threshold =
        get_number_or(sj, "overflow_threshold", cfg.sim.overflow_threshold, ctx);
    if (sj.contains("x0")) cfg.x0 = parse_init(sj["x0"], ctx + ".x0");
    if (sj.contains("xhat0")) cfg.xhat0 = parse_init(sj["xhat0"], ctx + ".xhat0");
    if (sj.contains("xhat0_overrides")) {
      const json& oj = sj["xhat0_overrides"];
      if (!oj.is_object()) throw ConfigError(ctx + ": 'xhat0_overrides' must be an object");
      for (auto it = oj.begin(); it != oj.end(); ++it) {
        std::vector<int> members;
        std::stringstream ss(it.key());
        std::string tok;
        while (std::getline(ss, tok, '-')) {
          try {
            members.push_back(std::stoi(tok));
          } catch (...) {
            throw ConfigError(ctx + ": override key '" + it.key() + "' is not a set label");
          }
        }
        InitSpec spec = parse_init(it.value(), ctx + ".xhat0_overrides." + it.key());
        if (spec.kind != InitSpec::Kind::Values) {
          throw ConfigError(ctx + ": override for '" + it.key() + "' must be explicit values");
        }
        cfg.xhat0_overrides[IndexSet(members)] = spec.values;
      }
    }
    try {
      cfg.sim.validate();
    } catch (const std::exception& e) {
      throw ConfigError(ctx + ": " + e.what());
    }
  }

  // synthesis section
  if (j.contains("synthesis")) {
    const json& sj = j["synthesis"];
    const std::string ctx = "synthesis";
    check_keys(sj,
               {"tol", "pd_floor", "projection_floor", "restarts", "max_iter", "seed", "nu_rounds",
                "size_cap", "nu_backoff", "p_scale_cap"},
               ctx);
    auto& o = cfg.synthesis;
    o.tol = get_number_or(sj, "tol", o.tol, ctx);
    o.pd_floor = get_number_or(sj, "pd_floor", o.pd_floor, ctx);
    o.projection_floor = get_number_or(sj, "projection_floor", o.projection_floor, ctx);
    o.restarts = static_cast<int>(get_number_or(sj, "restarts", o.restarts, ctx));
    o.max_iter = static_cast<int>(get_number_or(sj, "max_iter", o.max_iter, ctx));
    o.seed = static_cast<std::uint64_t>(get_number_or(sj, "seed", static_cast<double>(o.seed), ctx));
    o.nu_rounds = static_cast<int>(get_number_or(sj, "nu_rounds", o.nu_rounds, ctx));
    o.size_cap = static_cast<int>(get_number_or(sj, "size_cap", o.size_cap, ctx));
    o.nu_backoff = get_number_or(sj, "nu_backoff", o.nu_backoff, ctx);
    o.p_scale_cap = get_number_or(sj, "p_scale_cap", o.p_scale_cap, ctx);
  }

  // output section
  if (j.contains("output")) {
    const json& oj = j["output"];
    const std::string ctx = "output";
    check_keys(oj, {"dir", "trace", "plots", "decimation", "gains_dir"}, ctx);
    cfg.output.dir = get_string_or(oj, "dir", cfg.output.dir, ctx);
    cfg.output.trace = get_bool_or(oj, "trace", cfg.output.trace, ctx);
    cfg.output.plots = get_bool_or(oj, "plots", cfg.output.plots, ctx);
    cfg.output.decimation = static_cast<int>(get_number_or(oj, "decimation", 1.0, ctx));
    cfg.output.gains_dir = get_string_or(oj, "gains_dir", "", ctx);
    if (cfg.output.decimation < 1) throw ConfigError(ctx + ": decimation must be >= 1");
  }

  // checks section
  if (j.contains("checks")) {
    const json& cj = j["checks"];
    const std::string ctx = "checks";
    check_keys(cj, {"envelope", "theorem2", "convergence", "safety", "epsilon", "slack_abs",
                    "slack_rel"},
               ctx);
    cfg.checks.envelope = get_bool_or(cj, "envelope", true, ctx);
    cfg.checks.theorem2 = get_bool_or(cj, "theorem2", true, ctx);
    cfg.checks.convergence = get_bool_or(cj, "convergence", true, ctx);
    cfg.checks.safety = get_bool_or(cj, "safety", true, ctx);
    cfg.checks.epsilon = get_number_or(cj, "epsilon", cfg.checks.epsilon, ctx);
    cfg.checks.slack_abs = get_number_or(cj, "slack_abs", cfg.checks.slack_abs, ctx);
    cfg.checks.slack_rel = get_number_or(cj, "slack_rel", cfg.checks.slack_rel, ctx);
  }

  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

}  // namespace secest::cli
