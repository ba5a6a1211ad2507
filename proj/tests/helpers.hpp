#pragma once

#include <random>

#include "secest/grid.hpp"
#include "secest/lmi.hpp"
#include "secest/selector.hpp"
#include "secest/system.hpp"

namespace secest::testing {

/// Coupled stable 3-state chain with identity output map and tanh channels.
inline LureSystem make_n3_system(double slope = 0.4) {
  LureSystem sys;
  sys.A = Matrix::Zero(3, 3);
  sys.A << -1.0, 0.1, 0.0, 0.1, -1.0, 0.1, 0.0, 0.1, -1.0;
  sys.H = Matrix::Identity(3, 3);
  for (int i = 0; i < 3; ++i) sys.phi.push_back(Nonlinearity::tanh_sigmoid(slope, 1.0));
  sys.d_lower = Vector::Zero(3);
  sys.d_upper = Vector::Constant(3, slope);
  return sys;
}

inline LureSystem make_chain_system(int n, double slope) {
  LureSystem sys;
  sys.A = -Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    sys.A(i, i + 1) = 0.1;
    sys.A(i + 1, i) = 0.1;
  }
  sys.H = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) sys.phi.push_back(Nonlinearity::tanh_sigmoid(slope, 1.0));
  sys.d_lower = Vector::Zero(n);
  sys.d_upper = Vector::Constant(n, slope);
  return sys;
}

/// Feeder with slope-symmetric droop breakpoints; parameters jittered by seed.
inline grid::GridTopology make_topology(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  grid::GridTopology t;
  auto fill = [&](double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = draw(lo, hi);
    return v;
  };
  t.line_resistance = fill(0.01, 0.08);
  t.line_reactance = fill(0.01, 0.08);
  t.drop_resistance = fill(0.005, 0.03);
  t.drop_reactance = fill(0.005, 0.03);
  t.tau = fill(0.5, 2.0);
  t.rho_g = fill(0.0, 0.2);
  t.s_max = t.rho_g + fill(0.1, 0.4).cwiseMax(0.05);
  t.rho_c = fill(0.0, 0.3);
  t.q_c = fill(0.0, 0.2);
  Vector span = fill(0.05, 0.2);
  t.w_n = fill(0.0, 0.03);
  t.w_max = t.w_n + span;
  t.w_m = -t.w_n;
  t.w_min = -t.w_max;
  t.v_ref = 1.0;
  t.delta = 0.05;
  t.v_head = 1.01;
  return t;
}

inline std::vector<ObserverGains> synthesize_bank_gains(const LureSystem& sys, int budget,
                                                        lmi::SynthesisOptions opts = {}) {
  const int N = sys.sensor_count();
  std::vector<ObserverGains> out;
  std::vector<IndexSet> sets = k_subsets(N, N - budget);
  for (IndexSet& s : k_subsets(N, N - 2 * budget)) sets.push_back(std::move(s));
  for (const IndexSet& set : sets) {
    lmi::LmiProblem prob{sys.A, sys.H, set, sys.d_upper};
    lmi::SynthesisResult res = lmi::synthesize(prob, opts);
    if (!res.feasible) throw std::runtime_error("test gains infeasible for " + set.label());
    out.push_back(res.gains);
  }
  return out;
}

inline GainProvider provider_for(const std::vector<ObserverGains>& gains) {
  return [&gains](const IndexSet& set) -> std::optional<ObserverGains> {
    for (const auto& g : gains) {
      if (g.set == set) return g;
    }
    return std::nullopt;
  };
}

/// Shape-correct placeholder gains (no certificate) for combinatorics tests.
inline GainProvider dummy_provider(int n) {
  return [n](const IndexSet& set) -> std::optional<ObserverGains> {
    ObserverGains g;
    g.set = set;
    g.P = Matrix::Identity(n, n);
    g.L = Matrix::Zero(n, set.size());
    g.K = Matrix::Zero(n, set.size());
    g.nu = 0.1;
    g.mu = 1.0;
    return g;
  };
}

}  // namespace secest::testing
