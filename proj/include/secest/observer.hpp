#pragma once

#include <vector>

#include "secest/index_set.hpp"
#include "secest/system.hpp"
#include "secest/types.hpp"

namespace secest {

/// Circle-criterion observer gains certified for one index set.
struct ObserverGains {
  IndexSet set;  // sensors consumed by this observer
  Matrix P;      // n x n symmetric positive definite certificate
  Matrix L;      // n x k injection gain into the dynamics
  Matrix K;      // N x k injection gain into the nonlinearity argument
  double nu = 0.0;
  double mu = 0.0;

  void validate_shapes(int state_dim, int sensor_count) const;
};

/// Exponential ISS envelope: |e(t)| <= overshoot * exp(-rate/2 * t) * |e(0)| + gain * sup|a|.
struct IssEnvelope {
  double rate = 0.0;       // nu / lambda_max(P)
  double overshoot = 1.0;  // sqrt(lambda_max(P) / lambda_min(P))
  double alpha = 0.0;      // 2 mu (d_upper_max^2 |K|^2 + |L|^2) / lambda_max(P)
  double gain = 0.0;       // sqrt(alpha / (rate * lambda_min(P)))

  double beta(double r, double t) const;
  double gamma(double r) const;
  double bound(double e0, double t, double attack_sup) const;
};

/// Envelope constants from a certificate. Throws std::domain_error when nu == 0
/// (no exponential rate). Does not re-verify the matrix inequality.
IssEnvelope iss_envelope(const ObserverGains& gains, double d_upper_max);

struct ObserverState {
  ObserverGains gains;
  Vector xhat;
};

/// gain * (y_sel - (H_sel xhat + w_sel))
Vector output_injection(const Matrix& gain, const Vector& y_sel, const Vector& xhat,
                        const Vector& w_sel, const Matrix& H_sel);

/// A xhat + phi(xi) + L (y_J - (H_J xhat + w_J)) with
/// xi = H xhat + w(t) + K (y_J - (H_J xhat + w_J)); the first two xi terms use
/// the full H and the full known input.
Vector observer_rhs(const ObserverState& obs, const LureSystem& sys, const Vector& y_sel,
                    double t);

struct EnvelopeCheck {
  bool ok = true;
  double max_excess = 0.0;          // worst error minus bound (negative when ok)
  double first_violation_time = -1.0;
};

/// error[k] <= beta(error[0], times[k]) + gamma(attack_sup[k]) + slack, all k.
EnvelopeCheck check_envelope(const std::vector<double>& times, const std::vector<double>& error,
                             const IssEnvelope& env, const std::vector<double>& attack_sup,
                             double slack = 1e-6);

}  // namespace secest
