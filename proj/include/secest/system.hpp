#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "secest/index_set.hpp"
#include "secest/signal.hpp"
#include "secest/types.hpp"

namespace secest {

/// Static scalar nonlinearity (one per output channel).
class Nonlinearity {
 public:
  Nonlinearity();  // identically zero

  static Nonlinearity zero();
  static Nonlinearity linear(double gain);
  /// amplitude * tanh(rate * s); slope in (0, amplitude*rate].
  static Nonlinearity tanh_sigmoid(double amplitude, double rate);
  /// gain * clamp(s, -limit, limit); slope in [0, gain].
  static Nonlinearity saturation(double gain, double limit);
  static Nonlinearity custom(std::function<double(double)> fn, std::string name = "custom");

  double operator()(double s) const { return fn_(s); }
  const std::string& name() const { return name_; }

 private:
  std::function<double(double)> fn_;
  std::string name_;
};

/// Plant in Lur'e form: xdot = A x + phi(z), z_i = H_i x + w_i(t), y_i = z_i + a_i.
/// One scalar output per sensor; the stacked nonlinearity forces state_dim == sensor_count.
struct LureSystem {
  Matrix A;                        // n x n
  Matrix H;                        // N x n output rows
  std::vector<Nonlinearity> phi;   // one per sensor
  Vector d_lower;                  // slope restriction lower bounds
  Vector d_upper;                  // slope restriction upper bounds
  std::vector<Signal> input;       // known input channels; empty means w == 0

  int state_dim() const { return static_cast<int>(A.rows()); }
  int sensor_count() const { return static_cast<int>(H.rows()); }

  /// Throws std::invalid_argument on shape or slope-bound violations.
  void validate() const;

  Vector input_at(double t) const;
  /// z = H x + w(t)
  Vector output_linear(const Vector& x, double t) const;
  /// componentwise (phi_1(z_1), ..., phi_N(z_N))
  Vector apply_phi(const Vector& z) const;
};

/// xdot = A x + phi(H x + w(t))
Vector lure_dynamics(const LureSystem& sys, const Vector& x, double t);

/// General plant interface: xdot = f(x, z, w), z_i = h_i(x, w).
struct GeneralPlant {
  int state_dim = 0;
  int input_dim = 0;
  int sensor_count = 0;
  std::function<Vector(const Vector&, const Vector&, const Vector&)> dynamics;
  std::vector<std::function<double(const Vector&, const Vector&)>> outputs;
  void validate() const;
};

GeneralPlant as_general_plant(const LureSystem& sys);

/// Attack support and per-sensor additive signals; sensors off the support are
/// identically zero and the support is fixed over a run.
class AttackScenario {
 public:
  AttackScenario() = default;
  AttackScenario(IndexSet support, std::map<int, Signal> signals);

  const IndexSet& support() const { return support_; }
  bool admissible_for(int budget) const { return support_.size() <= budget; }
  /// a_i(t); exactly 0 for sensors off the support.
  double signal(int sensor, double t) const;
  /// Stacked attack vector of the given length.
  Vector evaluate(int sensor_count, double t) const;

 private:
  IndexSet support_;
  std::map<int, Signal> signals_;
};

/// y = H x + w(t) + a(t). Channels off the attack support are returned bit-exact.
Vector measure(const LureSystem& sys, const Vector& x, double t, const AttackScenario& attack);

/// Sampled slope-restriction check: all difference quotients over pairs of grid
/// points must lie in [d_lower - tol, d_upper + tol].
bool verify_slope(const std::function<double(double)>& fn, double d_lower, double d_upper,
                  const std::vector<double>& grid, double tol = 1e-9);

/// Dense grid on [lo, hi] plus `extra` seeded random points, for verify_slope.
std::vector<double> slope_grid(double lo, double hi, int dense, int extra, std::uint64_t seed);

}  // namespace secest
