#pragma once

#include <vector>

namespace secest {

/// Scalar time signal. Used both for attack channels and known-input channels.
class Signal {
 public:
  enum class Kind { Zero, Bias, Ramp, Sinusoid, Step, Table };

  Signal() = default;

  static Signal zero();
  static Signal bias(double value);
  /// rate * t (possibly unbounded).
  static Signal ramp(double rate);
  static Signal sinusoid(double amplitude, double omega, double phase = 0.0);
  /// 0 before at_time, value from at_time on.
  static Signal step(double value, double at_time);
  /// Piecewise-linear interpolation through (times, values); ends held constant.
  static Signal table(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::Zero; }

 private:
  Kind kind_ = Kind::Zero;
  double p0_ = 0.0;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

}  // namespace secest
