#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "secest/observer.hpp"
#include "secest/system.hpp"

namespace secest {

/// Two-tier bank: tier 1 consumes N-M outputs, tier 2 consumes N-2M outputs.
/// Observers are stored in lexicographic order of their index sets.
struct ObserverBank {
  int sensor_count = 0;
  int attack_budget = 0;
  std::vector<ObserverState> tier1;
  std::vector<ObserverState> tier2;

  int tier1_index(const IndexSet& set) const;
  int tier2_index(const IndexSet& set) const;
  int total() const { return static_cast<int>(tier1.size() + tier2.size()); }
};

using GainProvider = std::function<std::optional<ObserverGains>(const IndexSet&)>;

/// Builds the full two-tier bank. Throws std::invalid_argument when
/// sensor_count <= 2 * attack_budget or when gains are missing (the message
/// lists the uncovered sets). All observers start at xhat0 unless an override
/// is supplied for their set.
ObserverBank build_bank(const LureSystem& sys, int attack_budget, const GainProvider& gains,
                        const Vector& xhat0,
                        const std::map<IndexSet, Vector>* per_set_init = nullptr);

/// Worst deviation (infinity norm) between the tier-1 estimate for `tier1_set`
/// and its tier-2 sub-estimates.
double consistency(const ObserverBank& bank, const IndexSet& tier1_set);

struct Selection {
  IndexSet chosen;          // the argmin set, lexicographically smallest on ties
  Vector estimate;          // tier-1 estimate of the chosen set
  std::vector<double> pis;  // aligned with bank.tier1
};

Selection select(const ObserverBank& bank);

/// Envelopes and initial errors for every observer in a bank, in bank order.
struct BankEnvelopes {
  std::vector<IndexSet> tier1_sets;
  std::vector<IndexSet> tier2_sets;
  std::vector<IssEnvelope> tier1;
  std::vector<IssEnvelope> tier2;
  std::vector<double> tier1_e0;
  std::vector<double> tier2_e0;

  /// Smallest decay rate across both tiers.
  double slowest_rate() const;
};

BankEnvelopes bank_envelopes(const ObserverBank& bank, const Vector& x0, double d_upper_max);

struct BoundCheck {
  bool ok = true;
  double max_excess = 0.0;
  double first_violation_time = -1.0;
};

/// Sample-wise three-term bound on the selected-estimate error: the attack-free
/// tier-2 envelope under sigma(t), plus the attack-free tier-1 envelope, plus
/// the worst attack-free tier-2 envelope below it.
std::vector<double> selected_error_bound_series(const std::vector<double>& times,
                                                const std::vector<int>& sigma_tier1_index,
                                                const BankEnvelopes& env,
                                                const IndexSet& true_support);

BoundCheck selected_error_bound(const std::vector<double>& times,
                                const std::vector<double>& selected_error,
                                const std::vector<int>& sigma_tier1_index,
                                const BankEnvelopes& env, const IndexSet& true_support,
                                double slack);

}  // namespace secest
