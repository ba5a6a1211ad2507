#include "secest/index_set.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace secest {

IndexSet::IndexSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("IndexSet: duplicate member");
  }
  if (!members_.empty() && members_.front() < 1) {
    throw std::invalid_argument("IndexSet: members must be >= 1");
  }
}

IndexSet IndexSet::full(int n) {
  if (n < 0) throw std::invalid_argument("IndexSet::full: n must be >= 0");
  std::vector<int> m(static_cast<size_t>(n));
  std::iota(m.begin(), m.end(), 1);
  return IndexSet(std::move(m));
}

bool IndexSet::contains(int i) const {
  return std::binary_search(members_.begin(), members_.end(), i);
}

bool IndexSet::subset_of(const IndexSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                       members_.end());
}

bool IndexSet::intersects(const IndexSet& other) const {
  for (int i : members_) {
    if (other.contains(i)) return true;
  }
  return false;
}

IndexSet IndexSet::complement(int n) const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

std::string IndexSet::label() const {
  if (members_.empty()) return "empty";
  std::string s;
  for (size_t i = 0; i < members_.size(); ++i) {
    if (i > 0) s += '-';
    s += std::to_string(members_[i]);
  }
  return s;
}

std::vector<IndexSet> k_subsets(int n, int k) {
  return k_subsets_of(IndexSet::full(n), k);
}

std::vector<IndexSet> k_subsets_of(const IndexSet& base, int k) {
  const int n = base.size();
  if (k < 0 || k > n) {
    throw std::invalid_argument("k_subsets: require 0 <= k <= n, got k=" + std::to_string(k) +
                                ", n=" + std::to_string(n));
  }
  std::vector<IndexSet> out;
  std::vector<int> idx(static_cast<size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<int> members(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) members[static_cast<size_t>(i)] = base[idx[static_cast<size_t>(i)]];
    out.emplace_back(std::move(members));
    // advance the combination counters, rightmost first
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
  }
  return out;
}

Matrix select_rows(const Matrix& m, const IndexSet& set) {
  Matrix out(set.size(), m.cols());
  for (int i = 0; i < set.size(); ++i) {
    const int r = set[i] - 1;
    if (r < 0 || r >= m.rows()) throw std::invalid_argument("select_rows: index out of range");
    out.row(i) = m.row(r);
  }
  return out;
}

Vector select_entries(const Vector& v, const IndexSet& set) {
  Vector out(set.size());
  for (int i = 0; i < set.size(); ++i) {
    const int r = set[i] - 1;
    if (r < 0 || r >= v.size()) throw std::invalid_argument("select_entries: index out of range");
    out(i) = v(r);
  }
  return out;
}

}  // namespace secest
