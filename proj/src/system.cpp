#include "secest/system.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace secest {

Nonlinearity::Nonlinearity() : fn_([](double) { return 0.0; }), name_("zero") {}

Nonlinearity Nonlinearity::zero() { return Nonlinearity(); }

Nonlinearity Nonlinearity::linear(double gain) {
  Nonlinearity n;
  n.fn_ = [gain](double s) { return gain * s; };
  n.name_ = "linear";
  return n;
}

Nonlinearity Nonlinearity::tanh_sigmoid(double amplitude, double rate) {
  Nonlinearity n;
  n.fn_ = [amplitude, rate](double s) { return amplitude * std::tanh(rate * s); };
  n.name_ = "tanh";
  return n;
}

Nonlinearity Nonlinearity::saturation(double gain, double limit) {
  if (limit < 0) throw std::invalid_argument("Nonlinearity::saturation: limit must be >= 0");
  Nonlinearity n;
  n.fn_ = [gain, limit](double s) { return gain * std::clamp(s, -limit, limit); };
  n.name_ = "saturation";
  return n;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> fn, std::string name) {
  if (!fn) throw std::invalid_argument("Nonlinearity::custom: empty function");
  Nonlinearity n;
  n.fn_ = std::move(fn);
  n.name_ = std::move(name);
  return n;
}

void LureSystem::validate() const {
  const int n = state_dim();
  const int N = sensor_count();
  if (n < 1) throw std::invalid_argument("LureSystem: state dimension must be >= 1");
  if (A.cols() != n) throw std::invalid_argument("LureSystem: A must be square");
  if (H.cols() != n) throw std::invalid_argument("LureSystem: H must have state_dim columns");
  if (N != n) {
    throw std::invalid_argument(
        "LureSystem: the stacked nonlinearity requires sensor_count == state_dim");
  }
  if (static_cast<int>(phi.size()) != N) {
    throw std::invalid_argument("LureSystem: need one nonlinearity per sensor");
  }
  if (d_lower.size() != N || d_upper.size() != N) {
    throw std::invalid_argument("LureSystem: slope bound vectors must have one entry per sensor");
  }
  for (int i = 0; i < N; ++i) {
    if (!(0.0 <= d_lower(i) && d_lower(i) <= d_upper(i) && d_upper(i) > 0.0)) {
      throw std::invalid_argument("LureSystem: require 0 <= d_lower <= d_upper and d_upper > 0 (sensor " +
                                  std::to_string(i + 1) + ")");
    }
  }
  if (!input.empty() && static_cast<int>(input.size()) != N) {
    throw std::invalid_argument("LureSystem: input must be empty or one channel per sensor");
  }
  if (!all_finite(A) || !all_finite(H)) {
    throw std::invalid_argument("LureSystem: A and H must be finite");
  }
}

Vector LureSystem::input_at(double t) const {
  Vector w = Vector::Zero(sensor_count());
  for (size_t i = 0; i < input.size(); ++i) {
    if (!input[i].is_zero()) w(static_cast<int>(i)) = input[i](t);
  }
  return w;
}

Vector LureSystem::output_linear(const Vector& x, double t) const {
  return H * x + input_at(t);
}

Vector LureSystem::apply_phi(const Vector& z) const {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out(i) = phi[static_cast<size_t>(i)](z(i));
  return out;
}

Vector lure_dynamics(const LureSystem& sys, const Vector& x, double t) {
  return sys.A * x + sys.apply_phi(sys.output_linear(x, t));
}

void GeneralPlant::validate() const {
  if (state_dim < 1 || sensor_count < 1) {
    throw std::invalid_argument("GeneralPlant: require state_dim >= 1 and sensor_count >= 1");
  }
  if (!dynamics) throw std::invalid_argument("GeneralPlant: dynamics not set");
  if (static_cast<int>(outputs.size()) != sensor_count) {
    throw std::invalid_argument("GeneralPlant: need one output map per sensor");
  }
}

GeneralPlant as_general_plant(const LureSystem& sys) {
  GeneralPlant p;
  p.state_dim = sys.state_dim();
  p.input_dim = sys.sensor_count();
  p.sensor_count = sys.sensor_count();
  p.dynamics = [sys](const Vector& x, const Vector& z, const Vector&) {
    return sys.A * x + sys.apply_phi(z);
  };
  for (int i = 0; i < sys.sensor_count(); ++i) {
    p.outputs.push_back([sys, i](const Vector& x, const Vector& w) {
      return sys.H.row(i).dot(x) + (w.size() > i ? w(i) : 0.0);
    });
  }
  return p;
}

AttackScenario::AttackScenario(IndexSet support, std::map<int, Signal> signals)
    : support_(std::move(support)), signals_(std::move(signals)) {
  for (const auto& [sensor, sig] : signals_) {
    (void)sig;
    if (!support_.contains(sensor)) {
      throw std::invalid_argument("AttackScenario: signal on sensor " + std::to_string(sensor) +
                                  " outside the support set");
    }
  }
}

double AttackScenario::signal(int sensor, double t) const {
  auto it = signals_.find(sensor);
  if (it == signals_.end()) return 0.0;
  return it->second(t);
}

Vector AttackScenario::evaluate(int sensor_count, double t) const {
  Vector a = Vector::Zero(sensor_count);
  for (const auto& [sensor, sig] : signals_) {
    if (sensor >= 1 && sensor <= sensor_count) a(sensor - 1) = sig(t);
  }
  return a;
}

Vector measure(const LureSystem& sys, const Vector& x, double t, const AttackScenario& attack) {
  Vector y = sys.output_linear(x, t);
  for (int i : attack.support().members()) {
    if (i >= 1 && i <= y.size()) y(i - 1) += attack.signal(i, t);
  }
  return y;
}

bool verify_slope(const std::function<double(double)>& fn, double d_lower, double d_upper,
                  const std::vector<double>& grid, double tol) {
  if (grid.size() < 2) throw std::invalid_argument("verify_slope: need at least 2 grid points");
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const double fi = fn(grid[i]);
    for (size_t j = i + 1; j < grid.size(); ++j) {
      if (grid[j] == grid[i]) continue;
      const double q = (fn(grid[j]) - fi) / (grid[j] - grid[i]);
      if (q < d_lower - tol || q > d_upper + tol) return false;
    }
  }
  return true;
}

std::vector<double> slope_grid(double lo, double hi, int dense, int extra, std::uint64_t seed) {
  if (!(hi > lo) || dense < 2) throw std::invalid_argument("slope_grid: bad range or density");
  std::vector<double> g;
  g.reserve(static_cast<size_t>(dense + extra));
  for (int i = 0; i < dense; ++i) {
    g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(dense - 1));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (int i = 0; i < extra; ++i) g.push_back(u(rng));
  return g;
}

}  // namespace secest
