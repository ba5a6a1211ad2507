#pragma once

#include <string>
#include <vector>

#include "secest/types.hpp"

namespace secest {

/// Sorted set of sensor indices, 1-based.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> members);

  static IndexSet full(int n);

  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int i) const;
  bool subset_of(const IndexSet& other) const;
  bool intersects(const IndexSet& other) const;
  IndexSet complement(int n) const;
  const std::vector<int>& members() const { return members_; }
  int operator[](int pos) const { return members_[pos]; }

  /// Members joined by '-', e.g. "1-3-4". Empty set -> "empty".
  std::string label() const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.members_ == b.members_;
  }
  friend bool operator!=(const IndexSet& a, const IndexSet& b) { return !(a == b); }
  /// Lexicographic order on the sorted member lists.
  friend bool operator<(const IndexSet& a, const IndexSet& b) {
    return a.members_ < b.members_;
  }

 private:
  std::vector<int> members_;
};

/// All k-element subsets of {1..n}, lexicographically ordered.
std::vector<IndexSet> k_subsets(int n, int k);

/// All k-element subsets of an arbitrary base set, lexicographic.
std::vector<IndexSet> k_subsets_of(const IndexSet& base, int k);

/// Rows of m selected by the (1-based) index set.
Matrix select_rows(const Matrix& m, const IndexSet& set);

/// Entries of v selected by the (1-based) index set.
Vector select_entries(const Vector& v, const IndexSet& set);

}  // namespace secest
