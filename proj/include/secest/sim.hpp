#pragma once

#include <cstdint>
#include <vector>

#include "secest/selector.hpp"
#include "secest/system.hpp"

namespace secest {

enum class IntegrationMethod { Rk4, Euler };

struct SimConfig {
  double step = 1e-3;
  double horizon = 10.0;
  IntegrationMethod method = IntegrationMethod::Rk4;
  int decimation = 10;           // record every k-th step
  std::uint64_t seed = 1;        // scenario randomization only; integration is seed-free
  double overflow_threshold = 1e12;
  void validate() const;
};

/// How the attack enters the measurements.
struct MeasurementModel {
  enum class Kind {
    Additive,        // y = z + a(t)
    SquaredVoltage,  // voltage-domain corruption mapped into Lur'e coordinates
  };
  Kind kind = Kind::Additive;
  double v_ref = 1.0;  // used by SquaredVoltage
};

/// Recorded run: one entry per recorded sample, observers in bank order.
struct SimTrace {
  std::vector<double> times;
  std::vector<Vector> x;
  std::vector<IndexSet> tier1_sets;
  std::vector<IndexSet> tier2_sets;
  std::vector<std::vector<Vector>> xhat1;        // [sample][observer]
  std::vector<std::vector<Vector>> xhat2;
  std::vector<Vector> y;
  std::vector<Vector> attack;                    // effective additive attack
  std::vector<std::vector<double>> attack_sup1;  // running sup of |a_J| per observer
  std::vector<std::vector<double>> attack_sup2;
  std::vector<std::vector<double>> pis;          // [sample][tier-1 set]
  std::vector<int> sigma;                        // tier-1 index of the selected set (-1: none)
  std::vector<Vector> selected;
  bool truncated = false;
  double truncated_at = 0.0;

  int samples() const { return static_cast<int>(times.size()); }
  /// |x - xhat|_inf series for one observer (tier 1 or 2).
  std::vector<double> observer_error(int tier, int index) const;
  /// |x - xhat_sigma|_inf series.
  std::vector<double> selected_error() const;
};

/// Couples the plant with the observer bank; fixed-step integration with
/// measurements evaluated at the stage times. Plant arithmetic never reads the
/// bank, so the plant trajectory is bit-identical with or without observers.
class Simulator {
 public:
  Simulator(LureSystem sys, ObserverBank bank, AttackScenario attack,
            MeasurementModel mm = {});

  /// One integration step from time t.
  void step(double t, double h, IntegrationMethod method);

  /// Full run from x0 (bank restored to its as-built states first).
  SimTrace run(const Vector& x0, const SimConfig& cfg);

  const Vector& state() const { return x_; }
  void set_state(const Vector& x0);
  const ObserverBank& bank() const { return bank_; }
  const LureSystem& system() const { return sys_; }

  /// Effective additive attack at output z and time t (see MeasurementModel).
  Vector effective_attack(const Vector& z, double t) const;

 private:
  struct Derivs {
    Vector dx;
    std::vector<Vector> dxh1;
    std::vector<Vector> dxh2;
  };
  Derivs derivs(double t, const Vector& x, const std::vector<Vector>& xh1,
                const std::vector<Vector>& xh2);
  void note_attack(const Vector& a);
  bool overflowed(double threshold) const;

  LureSystem sys_;
  ObserverBank bank_;
  ObserverBank bank_initial_;
  AttackScenario attack_;
  MeasurementModel mm_;
  Vector x_;
  std::vector<double> asup1_;
  std::vector<double> asup2_;
};

}  // namespace secest
