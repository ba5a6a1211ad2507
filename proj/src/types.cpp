#include "secest/types.hpp"

#include <cstdio>

namespace secest {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string matrix_repr(const Matrix& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 24 + 32);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%ldx%ld:", static_cast<long>(m.rows()),
                static_cast<long>(m.cols()));
  out += buf;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", m(i, j));
      out += buf;
    }
    out += ';';
  }
  return out;
}

}  // namespace secest
