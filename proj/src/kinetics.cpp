#include "coagem/kinetics.hpp"

#include <cmath>

namespace coagem {

double moment(const ClusterDistribution& u, int k) {
  double s = 0.0;
  for (const auto& [n, v] : u.values()) s += std::pow(static_cast<double>(n), k) * v;
  return s;
}

double interaction_mass(const ClusterDistribution& u) {
  const int ell = u.ell();
  double m1 = 0.0;
  for (const auto& [n, v] : u.values()) m1 += n * v;
  double forbidden = 0.0;
  // pairs with i + j <= ell; both sizes are then < ell
  for (const auto& [i, ui] : u.values()) {
    if (i >= ell) break;
    for (const auto& [j, uj] : u.values()) {
      if (i + j > ell) break;
      forbidden += static_cast<double>(i) * j * ui * uj;
    }
  }
  const double m = m1 * m1 - forbidden;
  return m > 0.0 ? m : 0.0;
}

double interaction_mass(const ClusterDistribution& u, const EmissionParams& params) {
  if (params.kind != SystemKind::Truncated) return interaction_mass(u);
  const int ell = params.ell, cap = params.truncation;
  // M^(N): ordered pairs of large sizes whose product i + j - ell stays <= N
  double m = 0.0;
  for (const auto& [i, ui] : u.values()) {
    if (i <= ell) continue;
    double partner = 0.0;
    for (const auto& [j, uj] : u.values()) {
      if (j <= ell) continue;
      if (i + j - ell > cap) break;
      partner += j * uj;
    }
    m += i * ui * partner;
  }
  return m;
}

namespace {

// Partner interval [lo, hi] for the death term of size n; hi < 0 means open.
struct PartnerRange {
  long lo;
  long hi;  // -1: unbounded
};

PartnerRange partner_range(int n, const EmissionParams& p) {
  switch (p.kind) {
    case SystemKind::Small:
      return {std::max(1, 1 + p.ell - n), p.ell};
    case SystemKind::Large:
      return {p.ell + 1, -1};
    case SystemKind::Truncated:
      return {p.ell + 1, p.truncation - n + p.ell};
    case SystemKind::Full:
    default:
      return {std::max(1, 1 + p.ell - n), -1};
  }
}

bool pair_permissible(int i, int j, const EmissionParams& p) {
  if (i + j < p.ell + 1) return false;
  if (p.kind == SystemKind::Truncated && i + j - p.ell > p.truncation) return false;
  return true;
}

}  // namespace

std::map<int, double> rhs(const ClusterDistribution& u, const EmissionParams& params) {
  params.validate(u);
  const int ell = params.ell;
  const double big_m = interaction_mass(u, params);
  if (big_m < kExhaustionEps)
    throw DivisionByExhaustion("interaction mass " + std::to_string(big_m));

  std::map<int, double> flux;
  // birth: every ordered reactant pair feeds the product size i + j - ell
  for (const auto& [i, ui] : u.values()) {
    for (const auto& [j, uj] : u.values()) {
      if (!pair_permissible(i, j, params)) continue;
      flux[i + j - ell] += static_cast<double>(i) * j * ui * uj / big_m;
    }
  }
  // death: 2 n u_n times the weight of admissible partners
  for (const auto& [n, un] : u.values()) {
    const auto [lo, hi] = partner_range(n, params);
    double partner = 0.0;
    for (const auto& [j, uj] : u.values()) {
      if (j < lo) continue;
      if (hi >= 0 && j > hi) break;
      partner += j * uj;
    }
    flux[n] -= 2.0 * n * un * partner / big_m;
  }
  return flux;
}

SplitMoments split_moments(const ClusterDistribution& u) {
  SplitMoments s;
  const int ell = u.ell();
  for (const auto& [n, v] : u.values()) {
    if (n <= ell) {
      s.m0s += v;
      s.m1s += n * v;
    } else {
      s.m0b += v;
      s.m1b += n * v;
    }
  }
  return s;
}

SplitMoments split_moment_rates(const ClusterDistribution& u) {
  const int ell = u.ell();
  const double big_m = interaction_mass(u);
  if (big_m < kExhaustionEps)
    throw DivisionByExhaustion("interaction mass " + std::to_string(big_m));

  // permissible small-small pair weight (the plain square would also count
  // pairs with i + j <= ell, which never react)
  double ss = 0.0;
  for (const auto& [i, ui] : u.values()) {
    if (i > ell) break;
    for (const auto& [j, uj] : u.values()) {
      if (j > ell) break;
      if (i + j >= ell + 1) ss += static_cast<double>(i) * j * ui * uj;
    }
  }
  double m1b = 0.0;
  for (const auto& [n, v] : u.values())
    if (n > ell) m1b += n * v;

  // cross terms: k large, j small, split by which side of the product the
  // small reactant lands on
  double c_mid_low = 0.0;   // ell < k < 2 ell, j <= 2 ell - k   (product small)
  double c_mid_high = 0.0;  // ell < k < 2 ell, j >  2 ell - k   (product large)
  double c_big = 0.0;       // k >= 2 ell, any small j           (product large)
  double p_mid_low = 0.0, p_mid_high = 0.0, p_big = 0.0;   // j-weighted (kj^2)
  double q_mid_low = 0.0;                                  // k-weighted (k^2 j)
  double r_mid_high = 0.0, r_big = 0.0;                    // (ell - j) k j
  for (const auto& [k, uk] : u.values()) {
    if (k <= ell) continue;
    for (const auto& [j, uj] : u.values()) {
      if (j > ell) break;
      const double w = static_cast<double>(k) * j * uk * uj;
      if (k < 2 * ell && j <= 2 * ell - k) {
        c_mid_low += w;
        p_mid_low += w * j;
        q_mid_low += w * k;
      } else if (k < 2 * ell) {
        c_mid_high += w;
        p_mid_high += w * j;
        r_mid_high += w * (ell - j);
      } else {
        c_big += w;
        p_big += w * j;
        r_big += w * (ell - j);
      }
    }
  }

  SplitMoments d;
  d.m0s = -(ss + 2.0 * (c_big + c_mid_high)) / big_m;
  d.m0b = -(m1b * m1b + 2.0 * c_mid_low) / big_m;
  d.m1s = -(ell * ss + 2.0 * ((ell * c_mid_low - q_mid_low) + p_mid_high + p_big)) / big_m;
  d.m1b = -(ell * m1b * m1b + 2.0 * (q_mid_low + r_mid_high + r_big)) / big_m;
  return d;
}

ClusterDistribution to_q(const ClusterDistribution& u) {
  const double m1 = moment(u, 1);
  if (m1 <= 0.0) throw DomainError("total mass is not positive");
  std::map<int, double> q;
  for (const auto& [n, v] : u.values()) q[n] = v / m1;
  return ClusterDistribution(u.ell(), std::move(q), u.s_max());
}

ClusterDistribution from_q(const ClusterDistribution& q, double m1) {
  if (m1 <= 0.0) throw DomainError("total mass is not positive");
  std::map<int, double> u;
  for (const auto& [n, v] : q.values()) u[n] = v * m1;
  return ClusterDistribution(q.ell(), std::move(u), q.s_max());
}

std::vector<double> catalan_bound_sequence(int big_l, int ell, int n_max) {
  const int base = 2 * big_l + ell;
  if (big_l < 1 || ell < 1 || n_max < base)
    throw DomainError("catalan_bound_sequence needs n_max >= 2L + ell");
  const int productive = 4 * big_l + ell;
  std::vector<double> a(static_cast<size_t>(n_max) + 1, 0.0);
  for (int n = base; n <= std::min(n_max, productive - 1); ++n)
    a[static_cast<size_t>(n)] = n;
  for (int np1 = std::max(productive, base + 1); np1 <= n_max; ++np1) {
    const int n = np1 - 1;
    double conv = 0.0;
    for (int k = base; k <= n - base + ell + 1; ++k) {
      const int partner = n - k + ell + 1;
      if (partner >= base) conv += a[static_cast<size_t>(k)] * a[static_cast<size_t>(partner)];
    }
    a[static_cast<size_t>(np1)] =
        np1 * (2.0 * big_l / (np1 - ell - 2 * big_l)) * conv;
  }
  return a;
}

}  // namespace coagem
