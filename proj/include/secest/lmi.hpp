#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "secest/index_set.hpp"
#include "secest/observer.hpp"
#include "secest/types.hpp"

namespace secest::lmi {

/// Data defining the observer-design matrix inequality for one index set.
struct LmiProblem {
  Matrix A;        // n x n
  Matrix H;        // N x n (square for the Lur'e class)
  IndexSet set;    // sensors available to the observer
  Vector d_upper;  // all N upper slope bounds (the diagonal block uses every sensor)

  int state_dim() const { return static_cast<int>(A.rows()); }
  int sensor_count() const { return static_cast<int>(H.rows()); }
  Matrix selected_rows() const { return select_rows(H, set); }
  void validate() const;
};

/// Decision variables in the linearizing coordinates Y = P L.
struct LmiCandidate {
  Matrix P;  // n x n symmetric
  Matrix Y;  // n x k
  Matrix K;  // N x k
  double nu = 0.0;
  double mu = 0.0;
};

/// The symmetric block matrix
///   [ P(A-LH_J) + (A-LH_J)'P + nu I    P + (H - K H_J)'    -P        ]
///   [ (P + (H - K H_J)')'              -2 diag(1/d_upper)   0        ]
///   [ -P                                0                  -mu I     ]
/// in the Y = P L variables. Throws on dimension mismatch or ill-conditioned P.
Matrix assemble(const LmiProblem& prob, const LmiCandidate& cand);

struct Verification {
  bool ok = false;
  double lambda_max = std::numeric_limits<double>::infinity();
  double p_min_eig = 0.0;
};

/// Negative-semidefiniteness of the assembled matrix (eigenvalue route) plus a
/// strict positive-definiteness floor on P.
Verification verify(const LmiProblem& prob, const LmiCandidate& cand, double tol = 1e-8,
                    double pd_floor = 1e-10);

/// Independent NSD decision for a symmetric matrix: symmetric Gaussian
/// elimination with diagonal pivoting (pivot signs are the signs of nested
/// principal minors in pivoted order). Used to cross-check verify.
bool sylvester_oracle(const Matrix& sym, double tol = 1e-9);

struct SynthesisOptions {
  std::uint64_t seed = 7;
  int restarts = 16;
  int max_iter = 1500;
  double tol = 1e-8;            // certificate acceptance: lambda_max <= tol
  double pd_floor = 1e-10;      // certificate acceptance: lambda_min(P) >= pd_floor
  double projection_floor = 1e-3;  // descent keeps P >= floor * I
  double nu_backoff = 0.95;
  int nu_rounds = 2;
  int size_cap = 60;            // assembled-size guard
  double p_scale_cap = 1.0;     // soft penalty above lambda_max(P) > cap
  double target_margin = 1e-4;  // stop descent once lambda_max below -margin
};

struct SynthesisResult {
  bool feasible = false;
  ObserverGains gains;
  double lambda_max = std::numeric_limits<double>::infinity();  // achieved best
  int restarts_used = 0;
  std::string message;
};

/// Projected subgradient descent on lambda_max of the assembled matrix with a
/// PSD-floor projection on P, followed by a greedy bisection maximizing nu.
/// Deterministic for a fixed seed.
SynthesisResult synthesize(const LmiProblem& prob, const SynthesisOptions& opts = {});

/// Recover L = P^{-1} Y. Throws if P is too ill-conditioned (cond > 1e12).
ObserverGains candidate_to_gains(const LmiProblem& prob, const LmiCandidate& cand);
LmiCandidate gains_to_candidate(const ObserverGains& gains);

}  // namespace secest::lmi
