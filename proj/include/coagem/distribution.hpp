#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "coagem/errors.hpp"

namespace coagem {

/// Absolute threshold below which the interaction mass counts as exhausted.
inline constexpr double kExhaustionEps = 1e-12;

/// Negative values above this magnitude are integration artifacts and are
/// clamped to zero; anything more negative is treated as a real failure.
inline constexpr double kClampTol = 1e-9;

/// Tolerance on sum(u) == 1 for freshly constructed initial conditions.
inline constexpr double kInitNormTol = 1e-12;

enum class SystemKind { Full, Small, Large, Truncated };

inline const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::Full: return "full";
    case SystemKind::Small: return "small";
    case SystemKind::Large: return "large";
    case SystemKind::Truncated: return "truncated";
  }
  return "?";
}

/// Finitely supported cluster-fraction state u_n, n >= 1.  Values are
/// normalized to the initial cluster count, so a fresh initial condition
/// sums to one; evolved states sum to less.  Storage is sparse with a hard
/// support cap `s_max` (post-gelation states mix one huge size with many
/// small ones, so dense storage over [1, max size] is wasteful).
class ClusterDistribution {
public:
  /// General state constructor: entries must be >= -kClampTol (small
  /// negatives are clamped to zero), sizes must be positive.
  ClusterDistribution(int ell, std::map<int, double> u, int s_max = 0)
      : ell_(ell), u_(std::move(u)) {
    if (ell_ < 1) throw InvalidInitialDistribution("emission size must be >= 1");
    for (auto it = u_.begin(); it != u_.end();) {
      auto [n, v] = *it;
      if (n < 1 || !std::isfinite(v))
        throw InvalidInitialDistribution("bad entry at size " + std::to_string(n));
      if (v < -kClampTol)
        throw InvalidInitialDistribution("negative fraction at size " + std::to_string(n));
      if (v <= 0.0)
        it = u_.erase(it);
      else
        ++it;
    }
    const int top = max_size();
    s_max_ = s_max > 0 ? s_max : std::max(64, 4 * top + 2 * ell_);
    if (top > s_max_)
      throw InvalidInitialDistribution("support exceeds s_max");
  }

  /// Initial-condition constructor: additionally requires sum(u) == 1.
  static ClusterDistribution initial(int ell, std::map<int, double> u, int s_max = 0) {
    ClusterDistribution d(ell, std::move(u), s_max);
    if (d.u_.empty()) throw InvalidInitialDistribution("empty support");
    double s = 0.0;
    for (const auto& [n, v] : d.u_) s += v;
    if (std::abs(s - 1.0) > kInitNormTol)
      throw InvalidInitialDistribution("initial fractions sum to " + std::to_string(s));
    return d;
  }

  int ell() const { return ell_; }
  int s_max() const { return s_max_; }
  const std::map<int, double>& values() const { return u_; }
  bool empty() const { return u_.empty(); }
  int max_size() const { return u_.empty() ? 0 : u_.rbegin()->first; }
  int min_size() const { return u_.empty() ? 0 : u_.begin()->first; }

  double operator[](int n) const {
    auto it = u_.find(n);
    return it == u_.end() ? 0.0 : it->second;
  }

  bool is_small() const { return u_.empty() || max_size() <= ell_; }
  bool is_large() const { return u_.empty() || min_size() > ell_; }

private:
  int ell_;
  std::map<int, double> u_;
  int s_max_;
};

/// Emission size plus the structural specialization of the kinetic
/// equations that applies to a state.
struct EmissionParams {
  int ell = 1;
  SystemKind kind = SystemKind::Full;
  int truncation = 0;  // only meaningful for SystemKind::Truncated

  static EmissionParams full(int ell) { return {ell, SystemKind::Full, 0}; }
  static EmissionParams small(int ell) { return {ell, SystemKind::Small, 0}; }
  static EmissionParams large(int ell) { return {ell, SystemKind::Large, 0}; }
  static EmissionParams truncated(int ell, int n) {
    return {ell, SystemKind::Truncated, n};
  }

  /// Checks that `u` is admissible for this kind.  Truncated systems need
  /// n >= 2L + ell where L is the largest initially occupied size.
  void validate(const ClusterDistribution& u) const {
    if (ell < 1) throw InvalidInitialDistribution("emission size must be >= 1");
    if (u.ell() != ell)
      throw InvalidInitialDistribution("emission size mismatch");
    switch (kind) {
      case SystemKind::Small:
        if (!u.is_small())
          throw InvalidInitialDistribution("small system has support above ell");
        break;
      case SystemKind::Large:
        if (!u.is_large())
          throw InvalidInitialDistribution("large system has support at or below ell");
        break;
      case SystemKind::Truncated:
        if (!u.is_large())
          throw InvalidInitialDistribution("truncated system has support at or below ell");
        if (truncation < 2 * u.max_size() + ell)
          throw InvalidInitialDistribution("truncation below 2L + ell");
        break;
      case SystemKind::Full:
        break;
    }
  }
};

/// Moments m_0..m_kmax of a cluster distribution, m_k = sum n^k u_n.
struct MomentVector {
  std::vector<double> m;
  double operator[](int k) const { return m.at(static_cast<size_t>(k)); }
  int kmax() const { return static_cast<int>(m.size()) - 1; }
};

}  // namespace coagem
