#include "secest/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace secest::lmi {

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

struct TopEig {
  double lambda_max = 0.0;
  Vector vector_max;
};

TopEig top_eig(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  TopEig e;
  const Eigen::Index last = es.eigenvalues().size() - 1;
  e.lambda_max = es.eigenvalues()(last);
  e.vector_max = es.eigenvectors().col(last);
  return e;
}

Matrix clamp_eigs(const Matrix& sym, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sym));
  Vector vals = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

// Solve A'P + PA = -Q (dense Kronecker route; desk-scale n).
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  const int n = static_cast<int>(A.rows());
  Matrix big = Matrix::Zero(n * n, n * n);
  const Matrix At = A.transpose();
  for (int b = 0; b < n; ++b) big.block(b * n, b * n, n, n) += At;
  for (int bi = 0; bi < n; ++bi) {
    for (int bj = 0; bj < n; ++bj) {
      big.block(bi * n, bj * n, n, n) += At(bi, bj) * Matrix::Identity(n, n);
    }
  }
  Vector rhs(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) rhs(j * n + i) = -Q(i, j);
  }
  Vector sol = big.fullPivLu().solve(rhs);
  Matrix P(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) P(i, j) = sol(j * n + i);
  }
  return symmetrize(P);
}

}  // namespace

void LmiProblem::validate() const {
  const int n = state_dim();
  const int N = sensor_count();
  if (n < 1 || A.cols() != n) throw std::invalid_argument("LmiProblem: A must be square");
  if (H.cols() != n) throw std::invalid_argument("LmiProblem: H must have state_dim columns");
  if (N != n) {
    throw std::invalid_argument("LmiProblem: the Lur'e class requires sensor_count == state_dim");
  }
  if (d_upper.size() != N) {
    throw std::invalid_argument("LmiProblem: d_upper needs one entry per sensor");
  }
  for (int i = 0; i < N; ++i) {
    if (!(d_upper(i) > 0)) {
      throw std::invalid_argument("LmiProblem: d_upper must be > 0 (sensor " +
                                  std::to_string(i + 1) + ")");
    }
  }
  if (set.empty()) throw std::invalid_argument("LmiProblem: index set must be nonempty");
  if (set[set.size() - 1] > N) {
    throw std::invalid_argument("LmiProblem: index set member exceeds sensor count");
  }
}

Matrix assemble(const LmiProblem& prob, const LmiCandidate& cand) {
  prob.validate();
  const int n = prob.state_dim();
  const int N = prob.sensor_count();
  const int k = prob.set.size();
  if (cand.P.rows() != n || cand.P.cols() != n) {
    throw std::invalid_argument("assemble: P must be state_dim x state_dim");
  }
  if (cand.Y.rows() != n || cand.Y.cols() != k) {
    throw std::invalid_argument("assemble: Y must be state_dim x #set");
  }
  if (cand.K.rows() != N || cand.K.cols() != k) {
    throw std::invalid_argument("assemble: K must be sensor_count x #set");
  }
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(cand.P));
    const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double amin = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(amin > 0.0) || amax / amin > 1e12) {
      throw std::invalid_argument("assemble: P is singular to working precision (cond > 1e12)");
    }
  }
  const Matrix P = symmetrize(cand.P);
  const Matrix Hs = prob.selected_rows();
  const Matrix YH = cand.Y * Hs;
  Matrix blockA = P * prob.A + prob.A.transpose() * P - YH - YH.transpose();
  blockA.diagonal().array() += cand.nu;
  const Matrix E = prob.H - cand.K * Hs;    // N x n
  const Matrix blockB = P + E.transpose();  // n x N

  const int size = n + N + n;
  Matrix M = Matrix::Zero(size, size);
  M.block(0, 0, n, n) = blockA;
  M.block(0, n, n, N) = blockB;
  M.block(n, 0, N, n) = blockB.transpose();
  for (int i = 0; i < N; ++i) M(n + i, n + i) = -2.0 / prob.d_upper(i);
  M.block(0, n + N, n, n) = -P;
  M.block(n + N, 0, n, n) = -P;
  M.block(n + N, n + N, n, n) = -cand.mu * Matrix::Identity(n, n);
  return symmetrize(M);
}

Verification verify(const LmiProblem& prob, const LmiCandidate& cand, double tol,
                    double pd_floor) {
  Verification v;
  const Matrix M = assemble(prob, cand);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  v.lambda_max = es.eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> ep(symmetrize(cand.P));
  v.p_min_eig = ep.eigenvalues().minCoeff();
  v.ok = v.lambda_max <= tol && v.p_min_eig >= pd_floor && cand.nu >= 0.0 && cand.mu >= 0.0;
  return v;
}

bool sylvester_oracle(const Matrix& sym, double tol) {
  if (sym.rows() != sym.cols()) {
    throw std::invalid_argument("sylvester_oracle: matrix must be square");
  }
  const double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
  const double scale0 = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (asym > 1e-9 * scale0) {
    throw std::invalid_argument("sylvester_oracle: matrix must be symmetric");
  }
  // Test -M >= 0 by symmetric elimination with diagonal pivoting; the pivot
  // sequence carries the signs of nested principal minors in pivoted order.
  Matrix X = -symmetrize(sym);
  const int nn = static_cast<int>(X.rows());
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  for (int step = 0; step < nn; ++step) {
    int p = step;
    for (int i = step; i < nn; ++i) {
      if (X(i, i) > X(p, p)) p = i;
    }
    if (p != step) {
      X.row(p).swap(X.row(step));
      X.col(p).swap(X.col(step));
    }
    const double piv = X(step, step);
    if (piv < -tol * scale) return false;
    if (piv <= tol * scale) {
      // the largest remaining diagonal entry is ~0: PSD requires the whole
      // trailing block to vanish
      double off = 0.0;
      for (int i = step; i < nn; ++i) {
        for (int j = step; j < nn; ++j) off = std::max(off, std::abs(X(i, j)));
      }
      return off <= tol * scale;
    }
    const int rem = nn - step - 1;
    if (rem > 0) {
      const Vector c = X.block(step + 1, step, rem, 1);
      X.block(step + 1, step + 1, rem, rem) -= (c * c.transpose()) / piv;
    }
  }
  return true;
}

ObserverGains candidate_to_gains(const LmiProblem& prob, const LmiCandidate& cand) {
  const Matrix P = symmetrize(cand.P);
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  const double amax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double amin = es.eigenvalues().cwiseAbs().minCoeff();
  if (!(amin > 0.0) || amax / amin > 1e12) {
    throw std::invalid_argument("candidate_to_gains: P is singular to working precision");
  }
  ObserverGains g;
  g.set = prob.set;
  g.P = P;
  g.L = P.ldlt().solve(cand.Y);
  g.K = cand.K;
  g.nu = cand.nu;
  g.mu = cand.mu;
  g.validate_shapes(prob.state_dim(), prob.sensor_count());
  return g;
}

LmiCandidate gains_to_candidate(const ObserverGains& gains) {
  LmiCandidate c;
  c.P = symmetrize(gains.P);
  c.Y = c.P * gains.L;
  c.K = gains.K;
  c.nu = gains.nu;
  c.mu = gains.mu;
  return c;
}

namespace {

struct DescentScratch {
  const LmiProblem& prob;
  const SynthesisOptions& opts;
  Matrix Hs;

  explicit DescentScratch(const LmiProblem& p, const SynthesisOptions& o)
      : prob(p), opts(o), Hs(p.selected_rows()) {}

  double objective(const LmiCandidate& cand, TopEig* eig_out = nullptr) const {
    const Matrix M = assemble(prob, cand);
    TopEig e = top_eig(M);
    if (eig_out) *eig_out = e;
    return e.lambda_max;
  }

  // One projected subgradient step on lambda_max + the P-scale penalty.
  void step(LmiCandidate& cand, double step_len, const TopEig& e) const {
    const int n = prob.state_dim();
    const int N = prob.sensor_count();
    const Vector u1 = e.vector_max.segment(0, n);
    const Vector u2 = e.vector_max.segment(n, N);
    const Vector u3 = e.vector_max.segment(n + N, n);

    const Vector Au1 = prob.A * u1;
    const Vector Hsu1 = Hs * u1;
    Matrix gP = u1 * Au1.transpose() + Au1 * u1.transpose();
    gP += u1 * u2.transpose() + u2 * u1.transpose();
    gP -= u1 * u3.transpose() + u3 * u1.transpose();
    Matrix gY = -2.0 * (u1 * Hsu1.transpose());
    Matrix gK = -2.0 * (u2 * Hsu1.transpose());
    double gMu = -u3.squaredNorm();

    // soft cap on lambda_max(P) keeps the envelope constants honest
    Eigen::SelfAdjointEigenSolver<Matrix> ep(symmetrize(cand.P));
    const double pmax = ep.eigenvalues().maxCoeff();
    if (pmax > opts.p_scale_cap) {
      const Vector vp = ep.eigenvectors().col(ep.eigenvalues().size() - 1);
      gP += 0.05 * (vp * vp.transpose());
    }

    const double gnorm = std::sqrt(gP.squaredNorm() + gY.squaredNorm() + gK.squaredNorm() +
                                   gMu * gMu);
    if (gnorm < 1e-14) return;
    const double s = step_len / gnorm;
    cand.P -= s * gP;
    cand.Y -= s * gY;
    cand.K -= s * gK;
    cand.mu -= s * gMu;

    cand.P = clamp_eigs(cand.P, opts.projection_floor, 1e8 * opts.projection_floor);
    cand.mu = std::clamp(cand.mu, 0.0, 1e8);
  }
};

// Minimize lambda_max at fixed nu; returns the best candidate seen.
LmiCandidate descend(const DescentScratch& d, LmiCandidate cand, int iters) {
  TopEig e;
  double best_val = d.objective(cand, &e);
  LmiCandidate best = cand;
  double step = 0.2 * std::max(1.0, inf_norm(d.prob.A));
  int since_improved = 0;
  for (int it = 0; it < iters; ++it) {
    if (best_val <= -d.opts.target_margin) break;
    d.step(cand, step, e);
    const double val = d.objective(cand, &e);
    if (val < best_val - 1e-14) {
      best_val = val;
      best = cand;
      since_improved = 0;
    } else {
      ++since_improved;
    }
    if (since_improved >= 60) {
      step *= 0.5;
      cand = best;
      (void)d.objective(cand, &e);
      since_improved = 0;
      if (step < 1e-7) break;
    }
  }
  return best;
}

double max_feasible_nu(const DescentScratch& d, const LmiCandidate& cand, double lo) {
  auto lam = [&](double nu) {
    LmiCandidate c = cand;
    c.nu = nu;
    return d.objective(c);
  };
  if (lam(lo) > 0.0) return lo;
  double hi = std::max(1.0, 2.0 * std::max(lo, 1e-6));
  int guard = 0;
  while (lam(hi) <= 0.0 && guard++ < 60) hi *= 2.0;
  double lo2 = lo;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo2 + hi);
    if (lam(mid) <= 0.0) {
      lo2 = mid;
    } else {
      hi = mid;
    }
  }
  return lo2;
}

}  // namespace

SynthesisResult synthesize(const LmiProblem& prob, const SynthesisOptions& opts) {
  prob.validate();
  const int n = prob.state_dim();
  const int N = prob.sensor_count();
  const int size = n + N + n;
  if (size > opts.size_cap) {
    throw std::invalid_argument("synthesize: assembled size " + std::to_string(size) +
                                " exceeds the desk-scale cap " + std::to_string(opts.size_cap));
  }

  DescentScratch d(prob, opts);
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // structured starting point: ridge least-squares K, Lyapunov P, L = 0
  const Matrix Hs = prob.selected_rows();
  const Matrix G = Hs * Hs.transpose();
  const double ridge = 1e-9 * std::max(1.0, G.trace()) + 1e-12;
  Matrix K0 = (G + ridge * Matrix::Identity(G.rows(), G.cols()))
                  .ldlt()
                  .solve(Hs * prob.H.transpose())
                  .transpose();
  Matrix P0;
  {
    Eigen::EigenSolver<Matrix> ea(prob.A);
    const double max_re = ea.eigenvalues().real().maxCoeff();
    if (max_re < -1e-9) {
      P0 = solve_lyapunov(prob.A, Matrix::Identity(n, n));
    } else {
      P0 = Matrix::Identity(n, n);
    }
    P0 = clamp_eigs(P0, opts.projection_floor, 1e8 * opts.projection_floor);
    Eigen::SelfAdjointEigenSolver<Matrix> ep(P0);
    const double pmax = ep.eigenvalues().maxCoeff();
    if (pmax > opts.p_scale_cap) P0 *= opts.p_scale_cap / pmax;
    P0 = clamp_eigs(P0, opts.projection_floor, 1e8 * opts.projection_floor);
  }

  SynthesisResult res;
  bool have_best = false;
  LmiCandidate best_cand;
  double best_nu = -1.0;
  double best_lambda = std::numeric_limits<double>::infinity();
  double best_infeasible_lambda = std::numeric_limits<double>::infinity();

  for (int r = 0; r < opts.restarts; ++r) {
    LmiCandidate cand;
    if (r == 0) {
      cand.P = P0;
      cand.Y = Matrix::Zero(n, prob.set.size());
      cand.K = K0;
      cand.mu = 5.0;
    } else {
      Matrix dP(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) dP(i, j) = gauss(rng);
      }
      cand.P = clamp_eigs(P0 + 0.3 * symmetrize(dP), opts.projection_floor,
                          1e8 * opts.projection_floor);
      cand.Y = Matrix::Zero(n, prob.set.size());
      cand.K = K0;
      for (int i = 0; i < cand.K.rows(); ++i) {
        for (int j = 0; j < cand.K.cols(); ++j) cand.K(i, j) += 0.3 * gauss(rng);
      }
      for (int i = 0; i < cand.Y.rows(); ++i) {
        for (int j = 0; j < cand.Y.cols(); ++j) cand.Y(i, j) = 0.05 * gauss(rng);
      }
      cand.mu = 5.0 * std::exp(unif(rng) * 4.0 - 1.0);
    }
    cand.nu = 0.0;

    cand = descend(d, cand, opts.max_iter);
    Verification v0 = verify(prob, cand, opts.tol, opts.pd_floor);
    if (!v0.ok) {
      best_infeasible_lambda = std::min(best_infeasible_lambda, v0.lambda_max);
      res.restarts_used = r + 1;
      continue;
    }

    for (int round = 0; round < opts.nu_rounds; ++round) {
      const double nu_star = max_feasible_nu(d, cand, cand.nu);
      if (nu_star > cand.nu) cand.nu = opts.nu_backoff * nu_star;
      if (round + 1 < opts.nu_rounds) cand = descend(d, cand, opts.max_iter / 2);
    }

    Verification v = verify(prob, cand, opts.tol, opts.pd_floor);
    if (!v.ok) {
      // nu push overshot; fall back to the pre-push certificate
      cand.nu = 0.0;
      v = verify(prob, cand, opts.tol, opts.pd_floor);
      if (!v.ok) {
        best_infeasible_lambda = std::min(best_infeasible_lambda, v.lambda_max);
        res.restarts_used = r + 1;
        continue;
      }
    }
    if (!have_best || cand.nu > best_nu + 1e-12 ||
        (std::abs(cand.nu - best_nu) <= 1e-12 && v.lambda_max < best_lambda)) {
      have_best = true;
      best_cand = cand;
      best_nu = cand.nu;
      best_lambda = v.lambda_max;
    }
    res.restarts_used = r + 1;
  }

  if (have_best) {
    res.feasible = true;
    res.gains = candidate_to_gains(prob, best_cand);
    res.lambda_max = best_lambda;
    res.message = "certificate found (nu = " + std::to_string(best_nu) + ")";
  } else {
    res.feasible = false;
    res.lambda_max = best_infeasible_lambda;
    res.message = "infeasible-after-budget: best lambda_max = " +
                  std::to_string(best_infeasible_lambda);
  }
  return res;
}

}  // namespace secest::lmi
