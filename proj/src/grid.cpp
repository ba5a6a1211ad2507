#include "secest/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace secest::grid {

namespace {

void require_size(const Vector& v, int n, const char* name) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string("GridTopology: ") + name + " needs one entry per customer");
  }
}

}  // namespace

double GridTopology::q_limit(int customer) const {
  const double s = s_max(customer);
  const double g = rho_g(customer);
  return std::sqrt(s * s - g * g);
}

void GridTopology::validate() const {
  const int n = customers();
  if (n < 1) throw std::invalid_argument("GridTopology: need at least one customer");
  require_size(line_resistance, n, "line_resistance");
  require_size(line_reactance, n, "line_reactance");
  require_size(drop_resistance, n, "drop_resistance");
  require_size(drop_reactance, n, "drop_reactance");
  require_size(s_max, n, "s_max");
  require_size(rho_g, n, "rho_g");
  require_size(rho_c, n, "rho_c");
  require_size(q_c, n, "q_c");
  require_size(w_min, n, "w_min");
  require_size(w_m, n, "w_m");
  require_size(w_n, n, "w_n");
  require_size(w_max, n, "w_max");
  for (int i = 0; i < n; ++i) {
    if (line_resistance(i) < 0 || line_reactance(i) < 0 || drop_resistance(i) < 0 ||
        drop_reactance(i) < 0) {
      throw std::invalid_argument("GridTopology: impedances must be >= 0");
    }
    if (!(tau(i) > 0)) throw std::invalid_argument("GridTopology: tau must be > 0");
    if (s_max(i) * s_max(i) < rho_g(i) * rho_g(i)) {
      throw std::invalid_argument("GridTopology: require s_max^2 >= rho_g^2 (customer " +
                                  std::to_string(i + 1) + ")");
    }
    if (!(w_min(i) <= w_m(i) && w_m(i) <= 0.0 && 0.0 <= w_n(i) && w_n(i) <= w_max(i))) {
      throw std::invalid_argument(
          "GridTopology: breakpoints must satisfy w_min <= w_m <= 0 <= w_n <= w_max (customer " +
          std::to_string(i + 1) + ")");
    }
  }
  if (!(v_ref > 0) || !(delta > 0) || !(v_head > 0)) {
    throw std::invalid_argument("GridTopology: v_ref, delta and v_head must be > 0");
  }
}

double droop(const GridTopology& topo, int customer, double w) {
  const double qbar = topo.q_limit(customer);
  const double wmin = topo.w_min(customer);
  const double wm = topo.w_m(customer);
  const double wn = topo.w_n(customer);
  const double wmax = topo.w_max(customer);
  if (w <= wmin) return -qbar;
  if (w <= wm) return -(1.0 - (w - wmin) / (wm - wmin)) * qbar;
  if (w <= wn) return 0.0;
  if (w <= wmax) return (w - wn) / (wmax - wn) * qbar;
  return qbar;
}

double droop_slope_bound(const GridTopology& topo, int customer) {
  const double qbar = topo.q_limit(customer);
  const double up = topo.w_max(customer) - topo.w_n(customer);
  const double down = topo.w_m(customer) - topo.w_min(customer);
  if (!(up > 0) || !(down > 0)) {
    throw std::invalid_argument("droop_slope_bound: degenerate droop breakpoints (customer " +
                                std::to_string(customer + 1) + ")");
  }
  return std::min(qbar / up, qbar / down);
}

GridState distflow_solve(const GridTopology& topo, const Vector& q_g) {
  topo.validate();
  const int n = topo.customers();
  if (q_g.size() != n) throw std::invalid_argument("distflow_solve: q_g has the wrong dimension");

  GridState st;
  st.q_g = q_g;
  st.flow_p = Vector::Zero(n);
  st.flow_q = Vector::Zero(n);
  // head flow accumulates every downstream net injection; forward recursion
  // P_{k+1} = P_k + rho_{k+1} then ends at zero
  double sum_rho = 0.0, sum_q = 0.0;
  for (int i = 0; i < n; ++i) {
    sum_rho += topo.rho_g(i) - topo.rho_c(i);
    sum_q += q_g(i) - topo.q_c(i);
  }
  st.flow_p(0) = -sum_rho;
  st.flow_q(0) = -sum_q;
  for (int k = 0; k + 1 < n; ++k) {
    st.flow_p(k + 1) = st.flow_p(k) + (topo.rho_g(k) - topo.rho_c(k));
    st.flow_q(k + 1) = st.flow_q(k) + (q_g(k) - topo.q_c(k));
  }

  st.vp_sq = Vector::Zero(n + 1);
  st.vp_sq(0) = topo.v_head * topo.v_head;
  for (int k = 0; k < n; ++k) {
    st.vp_sq(k + 1) = st.vp_sq(k) - 2.0 * (topo.line_resistance(k) * st.flow_p(k) +
                                           topo.line_reactance(k) * st.flow_q(k));
  }

  st.v_sq = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double rho_i = topo.rho_g(i) - topo.rho_c(i);
    const double q_i = q_g(i) - topo.q_c(i);
    st.v_sq(i) = st.vp_sq(i + 1) +
                 2.0 * (topo.drop_resistance(i) * rho_i + topo.drop_reactance(i) * q_i);
  }
  return st;
}

Matrix coupling_matrix(const GridTopology& topo) {
  const int n = topo.customers();
  Matrix H = Matrix::Zero(n, n);
  // cumulative reactance up the shared path, plus the service drop on the diagonal
  std::vector<double> cum(static_cast<size_t>(n) + 1, 0.0);
  for (int k = 0; k < n; ++k) cum[static_cast<size_t>(k) + 1] = cum[static_cast<size_t>(k)] + topo.line_reactance(k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      H(i, j) = -2.0 * cum[static_cast<size_t>(std::min(i, j)) + 1];
    }
    H(i, i) -= 2.0 * topo.drop_reactance(i);
  }
  return H;
}

Vector input_offset(const GridTopology& topo) {
  const int n = topo.customers();
  Vector g = Vector::Zero(n);
  // suffix sums of net active injections and consumed reactive power
  std::vector<double> suffix_rho(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> suffix_qc(static_cast<size_t>(n) + 1, 0.0);
  for (int j = n - 1; j >= 0; --j) {
    suffix_rho[static_cast<size_t>(j)] =
        suffix_rho[static_cast<size_t>(j) + 1] + (topo.rho_g(j) - topo.rho_c(j));
    suffix_qc[static_cast<size_t>(j)] = suffix_qc[static_cast<size_t>(j) + 1] + topo.q_c(j);
  }
  double feeder = 0.0;
  for (int i = 0; i < n; ++i) {
    // segment i-1 joins the shared path for customer i (0-based: segment i)
    feeder += -2.0 * topo.line_resistance(i) * suffix_rho[static_cast<size_t>(i)] +
              2.0 * topo.line_reactance(i) * suffix_qc[static_cast<size_t>(i)];
    const double rho_i = topo.rho_g(i) - topo.rho_c(i);
    g(i) = feeder - 2.0 * topo.drop_resistance(i) * rho_i + 2.0 * topo.drop_reactance(i) * topo.q_c(i);
  }
  return g;
}

LureSystem compile_lure(const GridTopology& topo) {
  topo.validate();
  const int n = topo.customers();
  LureSystem sys;
  sys.A = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) sys.A(i, i) = -1.0 / topo.tau(i);
  sys.H = coupling_matrix(topo);
  sys.d_lower = Vector::Zero(n);
  sys.d_upper = Vector::Zero(n);
  const Vector offset = input_offset(topo);
  const double vref2 = topo.v_ref * topo.v_ref;
  const double head2 = topo.v_head * topo.v_head;
  for (int i = 0; i < n; ++i) {
    const double d_i = droop_slope_bound(topo, i);
    const double tau_i = topo.tau(i);
    sys.d_upper(i) = d_i / tau_i;
    GridTopology copy = topo;
    sys.phi.push_back(Nonlinearity::custom(
        [copy, i, tau_i](double s) { return droop(copy, i, s) / tau_i; }, "droop"));
    sys.input.push_back(Signal::bias(offset(i) + vref2 - head2));

    // the declared slope bound must actually dominate both linear branches
    const double qbar = topo.q_limit(i);
    const double up = qbar / (topo.w_max(i) - topo.w_n(i));
    const double down = qbar / (topo.w_m(i) - topo.w_min(i));
    if (std::max(up, down) > d_i * (1.0 + 1e-9)) {
      throw std::invalid_argument(
          "compile_lure: droop branch slopes exceed the breakpoint slope constant (customer " +
          std::to_string(i + 1) + "); use slope-symmetric breakpoints");
    }
  }
  sys.validate();
  return sys;
}

double attack_transform(double v, double alpha) {
  // v_ref^2 - (v + alpha)^2 = (v_ref^2 - v^2) + a  with  a = -(2 v alpha + alpha^2)
  return -(2.0 * v * alpha + alpha * alpha);
}

VoltageEstimate reconstruct_voltage(const GridTopology& topo, const Vector& xhat) {
  const int n = topo.customers();
  if (xhat.size() != n) {
    throw std::invalid_argument("reconstruct_voltage: xhat has the wrong dimension");
  }
  const Matrix H = coupling_matrix(topo);
  const Vector offset = input_offset(topo);
  const double vref2 = topo.v_ref * topo.v_ref;
  const double head2 = topo.v_head * topo.v_head;
  VoltageEstimate out;
  out.v_sq = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double w_i = offset(i) + vref2 - head2;
    const double est = vref2 - (H.row(i).dot(xhat) + w_i);
    if (est < 0.0) {
      out.v_sq(i) = 0.0;
      out.clamped = true;
    } else {
      out.v_sq(i) = est;
    }
  }
  return out;
}

std::vector<std::vector<bool>> safety_monitor(const std::vector<Vector>& v_sq_series,
                                              double v_ref, double delta) {
  if (v_ref - delta < 0) {
    throw std::invalid_argument("safety_monitor: require v_ref - delta >= 0");
  }
  const double lo = (v_ref - delta) * (v_ref - delta);
  const double hi = (v_ref + delta) * (v_ref + delta);
  std::vector<std::vector<bool>> flags;
  flags.reserve(v_sq_series.size());
  for (const Vector& v_sq : v_sq_series) {
    std::vector<bool> row(static_cast<size_t>(v_sq.size()));
    for (Eigen::Index i = 0; i < v_sq.size(); ++i) {
      row[static_cast<size_t>(i)] = lo <= v_sq(i) && v_sq(i) <= hi;
    }
    flags.push_back(std::move(row));
  }
  return flags;
}

}  // namespace secest::grid
