#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace secest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Vector norm: max absolute entry.
inline double inf_norm(const Vector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Induced matrix norm: max absolute row sum.
inline double inf_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// FNV-1a 64-bit content hash (gains cache keys).
std::uint64_t fnv1a64(const std::string& data);

/// Canonical text form of a matrix (17 significant digits), used for hashing.
std::string matrix_repr(const Matrix& m);

}  // namespace secest
