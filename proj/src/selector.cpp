#include "secest/selector.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace secest {

namespace {

int find_set(const std::vector<ObserverState>& tier, const IndexSet& set) {
  for (size_t i = 0; i < tier.size(); ++i) {
    if (tier[i].gains.set == set) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

int ObserverBank::tier1_index(const IndexSet& set) const { return find_set(tier1, set); }
int ObserverBank::tier2_index(const IndexSet& set) const { return find_set(tier2, set); }

ObserverBank build_bank(const LureSystem& sys, int attack_budget, const GainProvider& gains,
                        const Vector& xhat0,
                        const std::map<IndexSet, Vector>* per_set_init) {
  sys.validate();
  const int N = sys.sensor_count();
  const int M = attack_budget;
  if (M < 0) throw std::invalid_argument("build_bank: attack budget must be >= 0");
  if (N <= 2 * M) {
    throw std::invalid_argument(
        "build_bank: insufficient sensor redundancy: the selector requires N > 2M (N = " +
        std::to_string(N) + ", M = " + std::to_string(M) + ")");
  }
  if (xhat0.size() != sys.state_dim()) {
    throw std::invalid_argument("build_bank: xhat0 has the wrong dimension");
  }

  ObserverBank bank;
  bank.sensor_count = N;
  bank.attack_budget = M;

  std::string missing;
  auto make_tier = [&](int k) {
    std::vector<ObserverState> tier;
    for (const IndexSet& set : k_subsets(N, k)) {
      auto g = gains(set);
      if (!g) {
        missing += missing.empty() ? set.label() : (", " + set.label());
        continue;
      }
      g->validate_shapes(sys.state_dim(), N);
      ObserverState obs;
      obs.gains = std::move(*g);
      obs.xhat = xhat0;
      if (per_set_init) {
        auto it = per_set_init->find(set);
        if (it != per_set_init->end()) {
          if (it->second.size() != sys.state_dim()) {
            throw std::invalid_argument("build_bank: per-set init for " + set.label() +
                                        " has the wrong dimension");
          }
          obs.xhat = it->second;
        }
      }
      tier.push_back(std::move(obs));
    }
    return tier;
  };

  bank.tier1 = make_tier(N - M);
  bank.tier2 = make_tier(N - 2 * M);
  if (!missing.empty()) {
    throw std::invalid_argument("build_bank: no gains for index sets: " + missing);
  }
  return bank;
}

double consistency(const ObserverBank& bank, const IndexSet& tier1_set) {
  const int idx = bank.tier1_index(tier1_set);
  if (idx < 0) throw std::invalid_argument("consistency: unknown tier-1 set " + tier1_set.label());
  const Vector& xhat = bank.tier1[static_cast<size_t>(idx)].xhat;
  double worst = 0.0;
  for (const ObserverState& sub : bank.tier2) {
    if (!sub.gains.set.subset_of(tier1_set)) continue;
    worst = std::max(worst, inf_norm(Vector(xhat - sub.xhat)));
  }
  return worst;
}

Selection select(const ObserverBank& bank) {
  if (bank.tier1.empty()) throw std::invalid_argument("select: bank has no tier-1 observers");
  Selection sel;
  sel.pis.reserve(bank.tier1.size());
  int best = 0;
  for (size_t i = 0; i < bank.tier1.size(); ++i) {
    sel.pis.push_back(consistency(bank, bank.tier1[i].gains.set));
    // strict < keeps the lexicographically smallest set on ties (tier1 is in
    // lexicographic order)
    if (sel.pis[i] < sel.pis[static_cast<size_t>(best)]) best = static_cast<int>(i);
  }
  sel.chosen = bank.tier1[static_cast<size_t>(best)].gains.set;
  sel.estimate = bank.tier1[static_cast<size_t>(best)].xhat;
  return sel;
}

double BankEnvelopes::slowest_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& e : tier1) r = std::min(r, e.rate);
  for (const auto& e : tier2) r = std::min(r, e.rate);
  return r;
}

BankEnvelopes bank_envelopes(const ObserverBank& bank, const Vector& x0, double d_upper_max) {
  BankEnvelopes out;
  for (const ObserverState& obs : bank.tier1) {
    out.tier1_sets.push_back(obs.gains.set);
    out.tier1.push_back(iss_envelope(obs.gains, d_upper_max));
    out.tier1_e0.push_back(inf_norm(Vector(x0 - obs.xhat)));
  }
  for (const ObserverState& obs : bank.tier2) {
    out.tier2_sets.push_back(obs.gains.set);
    out.tier2.push_back(iss_envelope(obs.gains, d_upper_max));
    out.tier2_e0.push_back(inf_norm(Vector(x0 - obs.xhat)));
  }
  return out;
}

std::vector<double> selected_error_bound_series(const std::vector<double>& times,
                                                const std::vector<int>& sigma_tier1_index,
                                                const BankEnvelopes& env,
                                                const IndexSet& true_support) {
  if (times.size() != sigma_tier1_index.size()) {
    throw std::invalid_argument("selected_error_bound: series must share the time grid");
  }
  // attack-free tier-1 reference set (lexicographically smallest)
  int ref1 = -1;
  for (size_t i = 0; i < env.tier1_sets.size(); ++i) {
    if (!env.tier1_sets[i].intersects(true_support)) {
      ref1 = static_cast<int>(i);
      break;
    }
  }
  if (ref1 < 0) {
    throw std::invalid_argument(
        "selected_error_bound: no attack-free tier-1 set (attack support exceeds the budget)");
  }
  // worst attack-free tier-2 envelope below the reference set
  std::vector<int> ref2;
  for (size_t i = 0; i < env.tier2_sets.size(); ++i) {
    if (env.tier2_sets[i].subset_of(env.tier1_sets[static_cast<size_t>(ref1)])) {
      ref2.push_back(static_cast<int>(i));
    }
  }

  std::vector<double> bound(times.size());
  const double t0 = times.empty() ? 0.0 : times.front();
  for (size_t s = 0; s < times.size(); ++s) {
    const double t = times[s] - t0;
    const int sig = sigma_tier1_index[s];
    if (sig < 0 || sig >= static_cast<int>(env.tier1_sets.size())) {
      throw std::invalid_argument("selected_error_bound: sigma index out of range");
    }
    // attack-free tier-2 observer below sigma(t): any choice yields a valid
    // bound, so take the minimum
    double term_sub = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < env.tier2_sets.size(); ++i) {
      if (env.tier2_sets[i].intersects(true_support)) continue;
      if (!env.tier2_sets[i].subset_of(env.tier1_sets[static_cast<size_t>(sig)])) continue;
      term_sub = std::min(term_sub, env.tier2[i].beta(env.tier2_e0[i], t));
    }
    if (!std::isfinite(term_sub)) {
      throw std::invalid_argument(
          "selected_error_bound: no attack-free tier-2 subset under sigma(t)");
    }
    const double term_ref = env.tier1[static_cast<size_t>(ref1)].beta(
        env.tier1_e0[static_cast<size_t>(ref1)], t);
    double term_worst = 0.0;
    for (int i : ref2) {
      term_worst = std::max(term_worst,
                            env.tier2[static_cast<size_t>(i)].beta(
                                env.tier2_e0[static_cast<size_t>(i)], t));
    }
    bound[s] = term_sub + term_ref + term_worst;
  }
  return bound;
}

BoundCheck selected_error_bound(const std::vector<double>& times,
                                const std::vector<double>& selected_error,
                                const std::vector<int>& sigma_tier1_index,
                                const BankEnvelopes& env, const IndexSet& true_support,
                                double slack) {
  if (times.size() != selected_error.size()) {
    throw std::invalid_argument("selected_error_bound: series must share the time grid");
  }
  const std::vector<double> bound =
      selected_error_bound_series(times, sigma_tier1_index, env, true_support);
  BoundCheck out;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (size_t s = 0; s < times.size(); ++s) {
    const double excess = selected_error[s] - (bound[s] + slack);
    if (excess > out.max_excess) out.max_excess = excess;
    if (excess > 0 && out.ok) {
      out.ok = false;
      out.first_violation_time = times[s];
    }
  }
  return out;
}

}  // namespace secest
