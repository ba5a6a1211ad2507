#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "secest/config.hpp"
#include "secest/gains_io.hpp"
#include "secest/grid.hpp"
#include "secest/index_set.hpp"
#include "secest/lmi.hpp"
#include "secest/observer.hpp"
#include "secest/runner.hpp"
#include "secest/selector.hpp"
#include "secest/sim.hpp"
#include "secest/system.hpp"

namespace py = pybind11;
using namespace secest;

namespace {

std::vector<std::vector<int>> py_k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (const IndexSet& s : k_subsets(n, k)) out.push_back(s.members());
  return out;
}

cli::RunFlags make_flags(const std::optional<std::string>& out,
                         const std::optional<std::uint64_t>& seed,
                         const std::optional<double>& tol, bool no_plots) {
  cli::RunFlags flags;
  flags.out = out;
  flags.seed = seed;
  flags.tol = tol;
  flags.no_plots = no_plots;
  return flags;
}

}  // namespace

PYBIND11_MODULE(secest, m) {
  m.doc() = "secure state estimation for Lur'e systems under sensor attacks";

  py::class_<IndexSet>(m, "IndexSet")
      .def(py::init<std::vector<int>>())
      .def_property_readonly("members", &IndexSet::members)
      .def("label", &IndexSet::label)
      .def("__len__", &IndexSet::size)
      .def("__repr__", [](const IndexSet& s) { return "IndexSet(" + s.label() + ")"; });
  py::implicitly_convertible<py::list, IndexSet>();

  m.def("k_subsets", &py_k_subsets, py::arg("n"), py::arg("k"),
        "all k-element subsets of {1..n}, lexicographic");

  py::class_<Signal>(m, "Signal")
      .def_static("zero", &Signal::zero)
      .def_static("bias", &Signal::bias, py::arg("value"))
      .def_static("ramp", &Signal::ramp, py::arg("rate"))
      .def_static("sinusoid", &Signal::sinusoid, py::arg("amplitude"), py::arg("omega"),
                  py::arg("phase") = 0.0)
      .def_static("step", &Signal::step, py::arg("value"), py::arg("at_time"))
      .def_static("table", &Signal::table, py::arg("times"), py::arg("values"))
      .def("__call__", &Signal::operator());

  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def_static("zero", &Nonlinearity::zero)
      .def_static("linear", &Nonlinearity::linear, py::arg("gain"))
      .def_static("tanh_sigmoid", &Nonlinearity::tanh_sigmoid, py::arg("amplitude"),
                  py::arg("rate"))
      .def_static("saturation", &Nonlinearity::saturation, py::arg("gain"), py::arg("limit"))
      .def_static("custom", &Nonlinearity::custom, py::arg("fn"), py::arg("name") = "custom")
      .def("__call__", &Nonlinearity::operator());

  py::class_<LureSystem>(m, "LureSystem")
      .def(py::init<>())
      .def_readwrite("A", &LureSystem::A)
      .def_readwrite("H", &LureSystem::H)
      .def_readwrite("phi", &LureSystem::phi)
      .def_readwrite("d_lower", &LureSystem::d_lower)
      .def_readwrite("d_upper", &LureSystem::d_upper)
      .def_readwrite("input", &LureSystem::input)
      .def("state_dim", &LureSystem::state_dim)
      .def("sensor_count", &LureSystem::sensor_count)
      .def("validate", &LureSystem::validate);

  py::class_<AttackScenario>(m, "AttackScenario")
      .def(py::init<>())
      .def(py::init([](const std::vector<int>& support, const std::map<int, Signal>& signals) {
             return AttackScenario(IndexSet(support), signals);
           }),
           py::arg("support"), py::arg("signals"))
      .def_property_readonly("support",
                             [](const AttackScenario& a) { return a.support().members(); })
      .def("admissible_for", &AttackScenario::admissible_for)
      .def("signal", &AttackScenario::signal, py::arg("sensor"), py::arg("t"));

  m.def("lure_dynamics", &lure_dynamics, py::arg("system"), py::arg("x"), py::arg("t"));
  m.def("measure", &measure, py::arg("system"), py::arg("x"), py::arg("t"), py::arg("attack"));
  m.def(
      "verify_slope",
      [](const std::function<double(double)>& fn, double lo, double hi,
         const std::vector<double>& grid, double tol) {
        return verify_slope(fn, lo, hi, grid, tol);
      },
      py::arg("fn"), py::arg("d_lower"), py::arg("d_upper"), py::arg("grid"),
      py::arg("tol") = 1e-9);
  m.def("slope_grid", &slope_grid, py::arg("lo"), py::arg("hi"), py::arg("dense"),
        py::arg("extra"), py::arg("seed"));

  py::class_<ObserverGains>(m, "ObserverGains")
      .def(py::init<>())
      .def_property(
          "set", [](const ObserverGains& g) { return g.set.members(); },
          [](ObserverGains& g, const std::vector<int>& members) { g.set = IndexSet(members); })
      .def_readwrite("P", &ObserverGains::P)
      .def_readwrite("L", &ObserverGains::L)
      .def_readwrite("K", &ObserverGains::K)
      .def_readwrite("nu", &ObserverGains::nu)
      .def_readwrite("mu", &ObserverGains::mu);

  py::class_<IssEnvelope>(m, "IssEnvelope")
      .def_readonly("rate", &IssEnvelope::rate)
      .def_readonly("overshoot", &IssEnvelope::overshoot)
      .def_readonly("alpha", &IssEnvelope::alpha)
      .def_readonly("gain", &IssEnvelope::gain)
      .def("beta", &IssEnvelope::beta, py::arg("r"), py::arg("t"))
      .def("gamma", &IssEnvelope::gamma, py::arg("r"))
      .def("bound", &IssEnvelope::bound, py::arg("e0"), py::arg("t"), py::arg("attack_sup"));

  m.def("iss_envelope", &iss_envelope, py::arg("gains"), py::arg("d_upper_max"));
  m.def("output_injection", &output_injection, py::arg("gain"), py::arg("y_sel"), py::arg("xhat"),
        py::arg("w_sel"), py::arg("H_sel"));
  m.def(
      "observer_rhs",
      [](const ObserverGains& gains, const Vector& xhat, const LureSystem& sys,
         const Vector& y_sel, double t) {
        ObserverState obs{gains, xhat};
        return observer_rhs(obs, sys, y_sel, t);
      },
      py::arg("gains"), py::arg("xhat"), py::arg("system"), py::arg("y_sel"), py::arg("t"));
  m.def(
      "check_envelope",
      [](const std::vector<double>& times, const std::vector<double>& error,
         const IssEnvelope& env, const std::vector<double>& attack_sup, double slack) {
        const EnvelopeCheck c = check_envelope(times, error, env, attack_sup, slack);
        return py::make_tuple(c.ok, c.max_excess, c.first_violation_time);
      },
      py::arg("times"), py::arg("error"), py::arg("envelope"), py::arg("attack_sup"),
      py::arg("slack") = 1e-6);

  // matrix-inequality synthesis
  py::class_<lmi::LmiProblem>(m, "LmiProblem")
      .def(py::init([](const Matrix& A, const Matrix& H, const std::vector<int>& set,
                       const Vector& d_upper) {
             return lmi::LmiProblem{A, H, IndexSet(set), d_upper};
           }),
           py::arg("A"), py::arg("H"), py::arg("set"), py::arg("d_upper"))
      .def_readwrite("A", &lmi::LmiProblem::A)
      .def_readwrite("H", &lmi::LmiProblem::H)
      .def_readwrite("d_upper", &lmi::LmiProblem::d_upper);

  py::class_<lmi::LmiCandidate>(m, "LmiCandidate")
      .def(py::init([](const Matrix& P, const Matrix& Y, const Matrix& K, double nu, double mu) {
             return lmi::LmiCandidate{P, Y, K, nu, mu};
           }),
           py::arg("P"), py::arg("Y"), py::arg("K"), py::arg("nu"), py::arg("mu"))
      .def_readwrite("P", &lmi::LmiCandidate::P)
      .def_readwrite("Y", &lmi::LmiCandidate::Y)
      .def_readwrite("K", &lmi::LmiCandidate::K)
      .def_readwrite("nu", &lmi::LmiCandidate::nu)
      .def_readwrite("mu", &lmi::LmiCandidate::mu);

  py::class_<lmi::SynthesisOptions>(m, "SynthesisOptions")
      .def(py::init<>())
      .def_readwrite("seed", &lmi::SynthesisOptions::seed)
      .def_readwrite("restarts", &lmi::SynthesisOptions::restarts)
      .def_readwrite("max_iter", &lmi::SynthesisOptions::max_iter)
      .def_readwrite("tol", &lmi::SynthesisOptions::tol)
      .def_readwrite("pd_floor", &lmi::SynthesisOptions::pd_floor)
      .def_readwrite("projection_floor", &lmi::SynthesisOptions::projection_floor)
      .def_readwrite("nu_rounds", &lmi::SynthesisOptions::nu_rounds)
      .def_readwrite("size_cap", &lmi::SynthesisOptions::size_cap);

  m.def("assemble", &lmi::assemble, py::arg("problem"), py::arg("candidate"));
  m.def(
      "verify",
      [](const lmi::LmiProblem& prob, const lmi::LmiCandidate& cand, double tol, double floor) {
        const lmi::Verification v = lmi::verify(prob, cand, tol, floor);
        return py::make_tuple(v.ok, v.lambda_max);
      },
      py::arg("problem"), py::arg("candidate"), py::arg("tol") = 1e-8,
      py::arg("pd_floor") = 1e-10);
  m.def("sylvester_oracle", &lmi::sylvester_oracle, py::arg("matrix"), py::arg("tol") = 1e-9);
  m.def(
      "synthesize",
      [](const lmi::LmiProblem& prob, const lmi::SynthesisOptions& opts) {
        const lmi::SynthesisResult r = lmi::synthesize(prob, opts);
        return py::make_tuple(r.feasible, r.gains, r.lambda_max, r.message);
      },
      py::arg("problem"), py::arg("options") = lmi::SynthesisOptions{});

  // bank + simulation
  py::class_<SimTrace>(m, "SimTrace")
      .def_readonly("times", &SimTrace::times)
      .def_readonly("sigma", &SimTrace::sigma)
      .def_readonly("truncated", &SimTrace::truncated)
      .def_property_readonly("tier1_labels",
                             [](const SimTrace& t) {
                               std::vector<std::string> out;
                               for (const auto& s : t.tier1_sets) out.push_back(s.label());
                               return out;
                             })
      .def_property_readonly("x",
                             [](const SimTrace& t) {
                               Matrix m(t.samples(), t.x.empty() ? 0 : t.x.front().size());
                               for (int s = 0; s < t.samples(); ++s) {
                                 m.row(s) = t.x[static_cast<size_t>(s)];
                               }
                               return m;
                             })
      .def_property_readonly("selected",
                             [](const SimTrace& t) {
                               Matrix m(t.samples(),
                                        t.selected.empty() ? 0 : t.selected.front().size());
                               for (int s = 0; s < t.samples(); ++s) {
                                 m.row(s) = t.selected[static_cast<size_t>(s)];
                               }
                               return m;
                             })
      .def_property_readonly("pi",
                             [](const SimTrace& t) {
                               Matrix m(t.samples(),
                                        t.pis.empty() ? 0 : static_cast<int>(t.pis.front().size()));
                               for (int s = 0; s < t.samples(); ++s) {
                                 for (int b = 0; b < m.cols(); ++b) {
                                   m(s, b) = t.pis[static_cast<size_t>(s)][static_cast<size_t>(b)];
                                 }
                               }
                               return m;
                             })
      .def("observer_error", &SimTrace::observer_error, py::arg("tier"), py::arg("index"))
      .def("selected_error", &SimTrace::selected_error);

  m.def(
      "simulate_bank",
      [](const LureSystem& sys, int budget, const std::vector<ObserverGains>& gains,
         const AttackScenario& attack, const Vector& x0, const Vector& xhat0, double step,
         double horizon, const std::string& method, int decimation, const std::string& domain,
         double v_ref) {
        GainProvider provider = [&gains](const IndexSet& set) -> std::optional<ObserverGains> {
          for (const auto& g : gains) {
            if (g.set == set) return g;
          }
          return std::nullopt;
        };
        ObserverBank bank = build_bank(sys, budget, provider, xhat0);
        MeasurementModel mm;
        mm.kind = domain == "voltage" ? MeasurementModel::Kind::SquaredVoltage
                                      : MeasurementModel::Kind::Additive;
        mm.v_ref = v_ref;
        SimConfig cfg;
        cfg.step = step;
        cfg.horizon = horizon;
        cfg.method = method == "euler" ? IntegrationMethod::Euler : IntegrationMethod::Rk4;
        cfg.decimation = decimation;
        Simulator sim(sys, std::move(bank), attack, mm);
        return sim.run(x0, cfg);
      },
      py::arg("system"), py::arg("budget"), py::arg("gains"), py::arg("attack"), py::arg("x0"),
      py::arg("xhat0"), py::arg("step") = 1e-3, py::arg("horizon") = 10.0,
      py::arg("method") = "rk4", py::arg("decimation") = 10, py::arg("domain") = "additive",
      py::arg("v_ref") = 1.0);

  // grid scenario
  py::class_<grid::GridTopology>(m, "GridTopology")
      .def(py::init<>())
      .def_readwrite("line_resistance", &grid::GridTopology::line_resistance)
      .def_readwrite("line_reactance", &grid::GridTopology::line_reactance)
      .def_readwrite("drop_resistance", &grid::GridTopology::drop_resistance)
      .def_readwrite("drop_reactance", &grid::GridTopology::drop_reactance)
      .def_readwrite("tau", &grid::GridTopology::tau)
      .def_readwrite("s_max", &grid::GridTopology::s_max)
      .def_readwrite("rho_g", &grid::GridTopology::rho_g)
      .def_readwrite("rho_c", &grid::GridTopology::rho_c)
      .def_readwrite("q_c", &grid::GridTopology::q_c)
      .def_readwrite("w_min", &grid::GridTopology::w_min)
      .def_readwrite("w_m", &grid::GridTopology::w_m)
      .def_readwrite("w_n", &grid::GridTopology::w_n)
      .def_readwrite("w_max", &grid::GridTopology::w_max)
      .def_readwrite("v_ref", &grid::GridTopology::v_ref)
      .def_readwrite("delta", &grid::GridTopology::delta)
      .def_readwrite("v_head", &grid::GridTopology::v_head)
      .def("customers", &grid::GridTopology::customers)
      .def("q_limit", &grid::GridTopology::q_limit)
      .def("validate", &grid::GridTopology::validate);

  py::class_<grid::GridState>(m, "GridState")
      .def_readonly("q_g", &grid::GridState::q_g)
      .def_readonly("flow_p", &grid::GridState::flow_p)
      .def_readonly("flow_q", &grid::GridState::flow_q)
      .def_readonly("vp_sq", &grid::GridState::vp_sq)
      .def_readonly("v_sq", &grid::GridState::v_sq);

  m.def("droop", &grid::droop, py::arg("topology"), py::arg("customer"), py::arg("w"));
  m.def("droop_slope_bound", &grid::droop_slope_bound, py::arg("topology"), py::arg("customer"));
  m.def("distflow_solve", &grid::distflow_solve, py::arg("topology"), py::arg("q_g"));
  m.def("coupling_matrix", &grid::coupling_matrix, py::arg("topology"));
  m.def("input_offset", &grid::input_offset, py::arg("topology"));
  m.def("compile_lure", &grid::compile_lure, py::arg("topology"));
  m.def("attack_transform", &grid::attack_transform, py::arg("v"), py::arg("alpha"));
  m.def(
      "reconstruct_voltage",
      [](const grid::GridTopology& topo, const Vector& xhat) {
        const grid::VoltageEstimate e = grid::reconstruct_voltage(topo, xhat);
        return py::make_tuple(e.v_sq, e.clamped);
      },
      py::arg("topology"), py::arg("xhat"));
  m.def("safety_monitor", &grid::safety_monitor, py::arg("v_sq_series"), py::arg("v_ref"),
        py::arg("delta"));

  // config-driven entry points (CLI parity)
  m.def(
      "run_scenario",
      [](const std::string& config, std::optional<std::string> out,
         std::optional<std::uint64_t> seed, std::optional<double> tol, bool no_plots) {
        return cli::cmd_run(config, make_flags(out, seed, tol, no_plots));
      },
      py::arg("config"), py::arg("out") = std::nullopt, py::arg("seed") = std::nullopt,
      py::arg("tol") = std::nullopt, py::arg("no_plots") = false);
  m.def(
      "synthesize_gains",
      [](const std::string& config, std::optional<std::string> out,
         std::optional<std::uint64_t> seed, std::optional<double> tol) {
        return cli::cmd_synthesize(config, make_flags(out, seed, tol, true));
      },
      py::arg("config"), py::arg("out") = std::nullopt, py::arg("seed") = std::nullopt,
      py::arg("tol") = std::nullopt);
  m.def(
      "check_scenario",
      [](const std::string& config, std::optional<std::uint64_t> seed) {
        cli::RunFlags flags = make_flags(std::nullopt, seed, std::nullopt, true);
        return cli::cmd_check(config, flags);
      },
      py::arg("config"), py::arg("seed") = std::nullopt);
}
