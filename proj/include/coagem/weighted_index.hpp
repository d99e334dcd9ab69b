#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace coagem {

/// Binary-indexed tree over size slots 1..capacity holding integer weights
/// w_n = n * U_n.  Supports O(log S) point update, prefix sum, and sampling
/// by cumulative weight; capacity doubles on demand with an O(S) rebuild.
class WeightedSizeIndex {
public:
  explicit WeightedSizeIndex(int capacity = 64) { reset_capacity(capacity); }

  int capacity() const { return cap_; }
  std::int64_t total() const { return total_; }

  void add(int size, std::int64_t delta) {
    if (size > cap_) grow(size);
    for (int i = size; i <= cap_; i += i & -i) tree_[static_cast<size_t>(i)] += delta;
    total_ += delta;
  }

  /// Sum of weights over sizes <= size.
  std::int64_t prefix(int size) const {
    if (size <= 0) return 0;
    if (size > cap_) size = cap_;
    std::int64_t s = 0;
    for (int i = size; i > 0; i -= i & -i) s += tree_[static_cast<size_t>(i)];
    return s;
  }

  std::int64_t weight(int size) const { return prefix(size) - prefix(size - 1); }

  /// Smallest size whose cumulative weight exceeds r; requires
  /// 0 <= r < prefix(limit or total).  Sampling restricted below a size
  /// threshold is done by drawing r < prefix(threshold - 1).
  int find(std::int64_t r) const {
    int pos = 0;
    for (int step = top_; step > 0; step >>= 1) {
      const int next = pos + step;
      if (next <= cap_ && tree_[static_cast<size_t>(next)] <= r) {
        pos = next;
        r -= tree_[static_cast<size_t>(next)];
      }
    }
    if (pos >= cap_) throw std::out_of_range("weighted index: r beyond total");
    return pos + 1;
  }

private:
  void reset_capacity(int capacity) {
    cap_ = 1;
    while (cap_ < capacity) cap_ <<= 1;
    top_ = cap_;
    tree_.assign(static_cast<size_t>(cap_) + 1, 0);
    total_ = 0;
  }

  void grow(int needed) {
    std::vector<std::int64_t> weights(static_cast<size_t>(cap_) + 1);
    for (int n = 1; n <= cap_; ++n) weights[static_cast<size_t>(n)] = weight(n);
    const int old_cap = cap_;
    reset_capacity(std::max(needed, old_cap * 2));
    for (int n = 1; n <= old_cap; ++n)
      if (weights[static_cast<size_t>(n)] != 0) add(n, weights[static_cast<size_t>(n)]);
  }

  int cap_ = 0;
  int top_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> tree_;
};

}  // namespace coagem
