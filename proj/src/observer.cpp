#include "secest/observer.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace secest {

void ObserverGains::validate_shapes(int state_dim, int sensor_count) const {
  const int k = set.size();
  if (P.rows() != state_dim || P.cols() != state_dim) {
    throw std::invalid_argument("ObserverGains: P must be state_dim x state_dim");
  }
  if (L.rows() != state_dim || L.cols() != k) {
    throw std::invalid_argument("ObserverGains: L must be state_dim x #set");
  }
  if (K.rows() != sensor_count || K.cols() != k) {
    throw std::invalid_argument("ObserverGains: K must be sensor_count x #set");
  }
  if (nu < 0 || mu < 0) throw std::invalid_argument("ObserverGains: nu and mu must be >= 0");
  if (!set.empty() && set[k - 1] > sensor_count) {
    throw std::invalid_argument("ObserverGains: set member exceeds sensor count");
  }
}

double IssEnvelope::beta(double r, double t) const {
  return overshoot * std::exp(-0.5 * rate * t) * r;
}

double IssEnvelope::gamma(double r) const { return gain * r; }

double IssEnvelope::bound(double e0, double t, double attack_sup) const {
  return beta(e0, t) + gamma(attack_sup);
}

IssEnvelope iss_envelope(const ObserverGains& gains, double d_upper_max) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gains.P + gains.P.transpose()));
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  if (!(lmin > 0)) throw std::domain_error("iss_envelope: P is not positive definite");
  if (!(gains.nu > 0)) {
    throw std::domain_error("iss_envelope: non-strict certificate: no exponential rate");
  }
  IssEnvelope env;
  env.rate = gains.nu / lmax;
  env.overshoot = std::sqrt(lmax / lmin);
  const double nk = inf_norm(gains.K);
  const double nl = inf_norm(gains.L);
  env.alpha = 2.0 * gains.mu * (d_upper_max * d_upper_max * nk * nk + nl * nl) / lmax;
  env.gain = std::sqrt(env.alpha / (env.rate * lmin));
  return env;
}

Vector output_injection(const Matrix& gain, const Vector& y_sel, const Vector& xhat,
                        const Vector& w_sel, const Matrix& H_sel) {
  if (H_sel.rows() != y_sel.size() || H_sel.cols() != xhat.size() ||
      w_sel.size() != y_sel.size() || gain.cols() != y_sel.size()) {
    throw std::invalid_argument("output_injection: dimension mismatch");
  }
  return gain * (y_sel - (H_sel * xhat + w_sel));
}

Vector observer_rhs(const ObserverState& obs, const LureSystem& sys, const Vector& y_sel,
                    double t) {
  const ObserverGains& g = obs.gains;
  const Matrix H_sel = select_rows(sys.H, g.set);
  const Vector w = sys.input_at(t);
  const Vector w_sel = select_entries(w, g.set);
  const Vector residual = y_sel - (H_sel * obs.xhat + w_sel);
  const Vector xi = sys.H * obs.xhat + w + g.K * residual;
  return sys.A * obs.xhat + sys.apply_phi(xi) + g.L * residual;
}

EnvelopeCheck check_envelope(const std::vector<double>& times, const std::vector<double>& error,
                             const IssEnvelope& env, const std::vector<double>& attack_sup,
                             double slack) {
  if (times.size() != error.size() || times.size() != attack_sup.size()) {
    throw std::invalid_argument("check_envelope: series must share the time grid");
  }
  EnvelopeCheck out;
  if (times.empty()) return out;
  const double e0 = error.front();
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < times.size(); ++k) {
    const double bound = env.bound(e0, times[k] - times.front(), attack_sup[k]) + slack;
    const double excess = error[k] - bound;
    if (excess > out.max_excess) out.max_excess = excess;
    if (excess > 0 && out.ok) {
      out.ok = false;
      out.first_violation_time = times[k];
    }
  }
  return out;
}

}  // namespace secest
