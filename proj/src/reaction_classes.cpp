#include "coagem/reaction_classes.hpp"

#include <algorithm>
#include <string>

namespace coagem {

ReactionClassTable compute_classes(const std::set<int>& support0, int ell, int n_max) {
  if (support0.empty())
    throw InvalidInitialDistribution("empty initial support");
  if (ell < 1) throw InvalidInitialDistribution("emission size must be >= 1");
  const int top = *support0.rbegin();
  if (*support0.begin() < 1)
    throw InvalidInitialDistribution("sizes must be positive");
  if (n_max < top)
    throw InvalidInitialDistribution("n_max below max(support0)");

  ReactionClassTable t;
  t.ell = ell;
  t.support0 = support0;
  t.n_max = n_max;
  t.s.assign(static_cast<size_t>(n_max) + 1, -1);
  t.classes.push_back(support0);
  for (int n : support0) t.s[static_cast<size_t>(n)] = 0;

  // fixed point: each round pairs everything attained so far (multiset
  // pairs, so n1 == n2 is allowed) and keeps new sizes within n_max
  std::vector<int> attained(support0.begin(), support0.end());
  while (true) {
    std::set<int> fresh;
    for (size_t a = 0; a < attained.size(); ++a) {
      for (size_t b = a; b < attained.size(); ++b) {
        const int n = attained[a] + attained[b] - ell;
        if (n >= 1 && n <= n_max && t.s[static_cast<size_t>(n)] < 0)
          fresh.insert(n);
      }
    }
    if (fresh.empty()) break;
    const int k = static_cast<int>(t.classes.size());
    for (int n : fresh) {
      t.s[static_cast<size_t>(n)] = k;
      attained.push_back(n);
    }
    t.classes.push_back(std::move(fresh));
  }
  return t;
}

std::optional<int> reaction_number(const ReactionClassTable& table, int n) {
  if (n < 1 || n > table.n_max) return std::nullopt;
  const int k = table.s[static_cast<size_t>(n)];
  if (k < 0) return std::nullopt;
  return k;
}

}  // namespace coagem
