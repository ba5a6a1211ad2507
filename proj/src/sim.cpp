#include "secest/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace secest {

void SimConfig::validate() const {
  if (!(step > 0)) throw std::invalid_argument("SimConfig: step must be > 0");
  if (horizon < 0) throw std::invalid_argument("SimConfig: horizon must be >= 0");
  if (horizon > 0 && step > horizon) {
    throw std::invalid_argument("SimConfig: step must not exceed the horizon");
  }
  if (decimation < 1) throw std::invalid_argument("SimConfig: decimation must be >= 1");
  if (!(overflow_threshold > 0)) {
    throw std::invalid_argument("SimConfig: overflow threshold must be > 0");
  }
}

std::vector<double> SimTrace::observer_error(int tier, int index) const {
  const auto& xh = tier == 1 ? xhat1 : xhat2;
  std::vector<double> out(times.size());
  for (size_t s = 0; s < times.size(); ++s) {
    out[s] = inf_norm(Vector(x[s] - xh[s][static_cast<size_t>(index)]));
  }
  return out;
}

std::vector<double> SimTrace::selected_error() const {
  std::vector<double> out(times.size());
  for (size_t s = 0; s < times.size(); ++s) {
    out[s] = selected[s].size() ? inf_norm(Vector(x[s] - selected[s])) : 0.0;
  }
  return out;
}

Simulator::Simulator(LureSystem sys, ObserverBank bank, AttackScenario attack,
                     MeasurementModel mm)
    : sys_(std::move(sys)),
      bank_(std::move(bank)),
      bank_initial_(bank_),
      attack_(std::move(attack)),
      mm_(mm),
      x_(Vector::Zero(sys_.state_dim())),
      asup1_(bank_.tier1.size(), 0.0),
      asup2_(bank_.tier2.size(), 0.0) {
  sys_.validate();
}

void Simulator::set_state(const Vector& x0) {
  if (x0.size() != sys_.state_dim()) {
    throw std::invalid_argument("Simulator: state has the wrong dimension");
  }
  x_ = x0;
}

Vector Simulator::effective_attack(const Vector& z, double t) const {
  Vector a = Vector::Zero(z.size());
  for (int i : attack_.support().members()) {
    if (i < 1 || i > z.size()) continue;
    const double alpha = attack_.signal(i, t);
    if (mm_.kind == MeasurementModel::Kind::Additive) {
      a(i - 1) = alpha;
    } else {
      const double vref2 = mm_.v_ref * mm_.v_ref;
      const double v = std::sqrt(std::max(vref2 - z(i - 1), 0.0));
      a(i - 1) = vref2 - (v + alpha) * (v + alpha) - z(i - 1);
    }
  }
  return a;
}

void Simulator::note_attack(const Vector& a) {
  for (size_t b = 0; b < bank_.tier1.size(); ++b) {
    const double v = inf_norm(select_entries(a, bank_.tier1[b].gains.set));
    asup1_[b] = std::max(asup1_[b], v);
  }
  for (size_t b = 0; b < bank_.tier2.size(); ++b) {
    const double v = inf_norm(select_entries(a, bank_.tier2[b].gains.set));
    asup2_[b] = std::max(asup2_[b], v);
  }
}

Simulator::Derivs Simulator::derivs(double t, const Vector& x, const std::vector<Vector>& xh1,
                                    const std::vector<Vector>& xh2) {
  Derivs d;
  const Vector z = sys_.output_linear(x, t);
  d.dx = sys_.A * x + sys_.apply_phi(z);

  const Vector a = effective_attack(z, t);
  note_attack(a);
  const Vector y = z + a;

  d.dxh1.reserve(xh1.size());
  for (size_t b = 0; b < xh1.size(); ++b) {
    ObserverState obs{bank_.tier1[b].gains, xh1[b]};
    d.dxh1.push_back(observer_rhs(obs, sys_, select_entries(y, obs.gains.set), t));
  }
  d.dxh2.reserve(xh2.size());
  for (size_t b = 0; b < xh2.size(); ++b) {
    ObserverState obs{bank_.tier2[b].gains, xh2[b]};
    d.dxh2.push_back(observer_rhs(obs, sys_, select_entries(y, obs.gains.set), t));
  }
  return d;
}

void Simulator::step(double t, double h, IntegrationMethod method) {
  std::vector<Vector> xh1(bank_.tier1.size()), xh2(bank_.tier2.size());
  for (size_t b = 0; b < xh1.size(); ++b) xh1[b] = bank_.tier1[b].xhat;
  for (size_t b = 0; b < xh2.size(); ++b) xh2[b] = bank_.tier2[b].xhat;

  auto blend = [&](const Derivs& k, double c, std::vector<Vector>& o1, std::vector<Vector>& o2,
                   Vector& ox) {
    ox = x_ + c * h * k.dx;
    for (size_t b = 0; b < xh1.size(); ++b) o1[b] = xh1[b] + c * h * k.dxh1[b];
    for (size_t b = 0; b < xh2.size(); ++b) o2[b] = xh2[b] + c * h * k.dxh2[b];
  };

  if (method == IntegrationMethod::Euler) {
    const Derivs k1 = derivs(t, x_, xh1, xh2);
    x_ += h * k1.dx;
    for (size_t b = 0; b < xh1.size(); ++b) bank_.tier1[b].xhat = xh1[b] + h * k1.dxh1[b];
    for (size_t b = 0; b < xh2.size(); ++b) bank_.tier2[b].xhat = xh2[b] + h * k1.dxh2[b];
    return;
  }

  Vector xs;
  std::vector<Vector> s1(xh1.size()), s2(xh2.size());
  const Derivs k1 = derivs(t, x_, xh1, xh2);
  blend(k1, 0.5, s1, s2, xs);
  const Derivs k2 = derivs(t + 0.5 * h, xs, s1, s2);
  blend(k2, 0.5, s1, s2, xs);
  const Derivs k3 = derivs(t + 0.5 * h, xs, s1, s2);
  blend(k3, 1.0, s1, s2, xs);
  const Derivs k4 = derivs(t + h, xs, s1, s2);

  const double w = h / 6.0;
  x_ += w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  for (size_t b = 0; b < xh1.size(); ++b) {
    bank_.tier1[b].xhat =
        xh1[b] + w * (k1.dxh1[b] + 2.0 * k2.dxh1[b] + 2.0 * k3.dxh1[b] + k4.dxh1[b]);
  }
  for (size_t b = 0; b < xh2.size(); ++b) {
    bank_.tier2[b].xhat =
        xh2[b] + w * (k1.dxh2[b] + 2.0 * k2.dxh2[b] + 2.0 * k3.dxh2[b] + k4.dxh2[b]);
  }
}

bool Simulator::overflowed(double threshold) const {
  if (!all_finite(x_) || inf_norm(x_) > threshold) return true;
  for (const auto& o : bank_.tier1) {
    if (!all_finite(o.xhat) || inf_norm(o.xhat) > threshold) return true;
  }
  for (const auto& o : bank_.tier2) {
    if (!all_finite(o.xhat) || inf_norm(o.xhat) > threshold) return true;
  }
  return false;
}

SimTrace Simulator::run(const Vector& x0, const SimConfig& cfg) {
  cfg.validate();
  set_state(x0);
  bank_ = bank_initial_;
  std::fill(asup1_.begin(), asup1_.end(), 0.0);
  std::fill(asup2_.begin(), asup2_.end(), 0.0);

  SimTrace trace;
  for (const auto& o : bank_.tier1) trace.tier1_sets.push_back(o.gains.set);
  for (const auto& o : bank_.tier2) trace.tier2_sets.push_back(o.gains.set);

  auto record = [&](double t) {
    const Vector z = sys_.output_linear(x_, t);
    const Vector a = effective_attack(z, t);
    note_attack(a);
    trace.times.push_back(t);
    trace.x.push_back(x_);
    std::vector<Vector> xh1, xh2;
    for (const auto& o : bank_.tier1) xh1.push_back(o.xhat);
    for (const auto& o : bank_.tier2) xh2.push_back(o.xhat);
    trace.xhat1.push_back(std::move(xh1));
    trace.xhat2.push_back(std::move(xh2));
    trace.y.push_back(z + a);
    trace.attack.push_back(a);
    trace.attack_sup1.push_back(asup1_);
    trace.attack_sup2.push_back(asup2_);
    if (!bank_.tier1.empty()) {
      Selection sel = select(bank_);
      trace.pis.push_back(sel.pis);
      trace.sigma.push_back(bank_.tier1_index(sel.chosen));
      trace.selected.push_back(sel.estimate);
    } else {
      trace.pis.emplace_back();
      trace.sigma.push_back(-1);
      trace.selected.emplace_back();
    }
  };

  const long n_steps = std::llround(cfg.horizon / cfg.step);
  record(0.0);
  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * cfg.step;
    step(t, cfg.step, cfg.method);
    if (overflowed(cfg.overflow_threshold)) {
      trace.truncated = true;
      trace.truncated_at = static_cast<double>(k + 1) * cfg.step;
      break;
    }
    if ((k + 1) % cfg.decimation == 0 || k + 1 == n_steps) {
      record(static_cast<double>(k + 1) * cfg.step);
    }
  }
  return trace;
}

}  // namespace secest
