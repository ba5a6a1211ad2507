#pragma once

#include <vector>

#include "secest/system.hpp"
#include "secest/types.hpp"

namespace secest::grid {

/// Radial low-voltage feeder: N customers in a line, customer i attached to
/// connection point i through a service drop; segment k joins points k and k+1
/// (point 0 is the substation head). Per-unit quantities throughout.
/// Customer arguments in this namespace are 0-based.
struct GridTopology {
  Vector line_resistance;  // R_k, one per segment (N entries)
  Vector line_reactance;   // X_k
  Vector drop_resistance;  // R'_k, customer k+1's service drop
  Vector drop_reactance;   // X'_k
  Vector tau;              // inverter response time constants (s)
  Vector s_max;            // apparent power limits
  Vector rho_g;            // generated active power
  Vector rho_c;            // consumed active power
  Vector q_c;              // consumed reactive power
  Vector w_min, w_m, w_n, w_max;  // droop breakpoints (squared-voltage units)
  double v_ref = 1.0;      // set-point voltage
  double delta = 0.05;     // safety band half width
  double v_head = 1.0;     // substation head voltage v'_0

  int customers() const { return static_cast<int>(tau.size()); }
  /// Saturation limit Qbar_i = sqrt(s_max^2 - rho_g^2).
  double q_limit(int customer) const;
  void validate() const;
};

/// Piecewise-saturating droop map from squared-voltage deviation to the
/// reactive-power set-point. Continuous and nondecreasing.
double droop(const GridTopology& topo, int customer, double w);

/// Breakpoint slope constant d_i = min{Qbar/(w_max - w_n), Qbar/(w_m - w_min)}.
/// Throws on degenerate (flat) breakpoints.
double droop_slope_bound(const GridTopology& topo, int customer);

/// Power flows and squared voltages from the linearized DistFlow recursion.
/// Flow convention: flow_p[k]/flow_q[k] run from point k toward k+1 and the
/// terminal flow is zero, so the head flow carries minus the sum of all
/// downstream net injections.
struct GridState {
  Vector q_g;
  Vector flow_p;  // N entries, segment flows
  Vector flow_q;
  Vector vp_sq;   // N+1 entries, connection-point squared voltages (0 = head)
  Vector v_sq;    // N entries, customer squared voltages
};

GridState distflow_solve(const GridTopology& topo, const Vector& q_g);

/// Output coupling matrix for z_i = v_ref^2 - v_i^2 as a function of q_g.
Matrix coupling_matrix(const GridTopology& topo);

/// Load-dependent part of the known input (feeder drops from loads and fixed
/// injections); w_i = input_offset_i + v_ref^2 - v_head^2.
Vector input_offset(const GridTopology& topo);

/// The feeder as a Lur'e plant: A = diag(-1/tau), phi_i = droop_i / tau_i,
/// constant known input. Validates the droop slope against the declared bound.
LureSystem compile_lure(const GridTopology& topo);

/// Additive attack on the squared-voltage measurement induced by a voltage
/// corruption y = v + alpha.
double attack_transform(double v, double alpha);

struct VoltageEstimate {
  Vector v_sq;
  bool clamped = false;  // a negative squared-voltage transient was clamped to 0
};

/// Squared-voltage estimates from a state estimate.
VoltageEstimate reconstruct_voltage(const GridTopology& topo, const Vector& xhat);

/// Per-sample, per-customer in-band flags in the squared domain:
/// (v_ref - delta)^2 <= v^2 <= (v_ref + delta)^2. Requires v_ref - delta >= 0.
std::vector<std::vector<bool>> safety_monitor(const std::vector<Vector>& v_sq_series,
                                              double v_ref, double delta);

}  // namespace secest::grid
