#include "secest/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace secest {

Signal Signal::zero() { return Signal(); }

Signal Signal::bias(double value) {
  Signal s;
  s.kind_ = Kind::Bias;
  s.p0_ = value;
  return s;
}

Signal Signal::ramp(double rate) {
  Signal s;
  s.kind_ = Kind::Ramp;
  s.p0_ = rate;
  return s;
}

Signal Signal::sinusoid(double amplitude, double omega, double phase) {
  Signal s;
  s.kind_ = Kind::Sinusoid;
  s.p0_ = amplitude;
  s.p1_ = omega;
  s.p2_ = phase;
  return s;
}

Signal Signal::step(double value, double at_time) {
  Signal s;
  s.kind_ = Kind::Step;
  s.p0_ = value;
  s.p1_ = at_time;
  return s;
}

Signal Signal::table(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.empty()) {
    throw std::invalid_argument("Signal::table: times/values must be nonempty and equal length");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("Signal::table: times must be sorted ascending");
  }
  Signal s;
  s.kind_ = Kind::Table;
  s.times_ = std::move(times);
  s.values_ = std::move(values);
  return s;
}

double Signal::operator()(double t) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Bias:
      return p0_;
    case Kind::Ramp:
      return p0_ * t;
    case Kind::Sinusoid:
      return p0_ * std::sin(p1_ * t + p2_);
    case Kind::Step:
      return t >= p1_ ? p0_ : 0.0;
    case Kind::Table: {
      if (t <= times_.front()) return values_.front();
      if (t >= times_.back()) return values_.back();
      auto it = std::upper_bound(times_.begin(), times_.end(), t);
      const size_t j = static_cast<size_t>(it - times_.begin());
      const double t0 = times_[j - 1], t1 = times_[j];
      const double v0 = values_[j - 1], v1 = values_[j];
      const double r = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
      return v0 + r * (v1 - v0);
    }
  }
  return 0.0;
}

}  // namespace secest
