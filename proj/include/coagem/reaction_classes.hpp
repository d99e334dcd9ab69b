#pragma once

#include <optional>
#include <set>
#include <vector>

#include "coagem/errors.hpp"

namespace coagem {

/// Level sets of the reachability closure under n1 + n2 - ell: class k holds
/// the sizes first producible after k rounds of reactions from the initial
/// support.  Sizes above n_max are not tracked, not even as intermediates;
/// callers needing deeper closures raise n_max.
struct ReactionClassTable {
  int ell = 1;
  std::set<int> support0;
  int n_max = 0;
  std::vector<std::set<int>> classes;  // classes[k] = S_k, restricted to <= n_max
  std::vector<int> s;                  // s[n] = reaction number, -1 if unattainable

  bool attainable(int n) const {
    return n >= 1 && n <= n_max && s[static_cast<size_t>(n)] >= 0;
  }
};

ReactionClassTable compute_classes(const std::set<int>& support0, int ell, int n_max);

/// Reaction number s_n, or nullopt when n is outside the table range or not
/// attainable within it.
std::optional<int> reaction_number(const ReactionClassTable& table, int n);

}  // namespace coagem
