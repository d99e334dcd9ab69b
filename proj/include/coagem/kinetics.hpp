#pragma once

#include <map>
#include <vector>

#include "coagem/distribution.hpp"

namespace coagem {

/// k-th moment, m_k = sum_n n^k u_n (exact finite sum over the support).
double moment(const ClusterDistribution& u, int k);

/// Interaction mass M = sum over ordered pairs (i, j) with i + j >= ell + 1
/// of i j u_i u_j.  Computed as m_1^2 minus the forbidden block
/// sum_{i+j<=ell} i j u_i u_j, which costs O(ell^2) instead of O(S^2).
/// Returns 0 for an exhausted or empty state.
double interaction_mass(const ClusterDistribution& u);

/// Kind-aware normalizer: the plain interaction mass for Full/Small/Large,
/// and the truncation-restricted M^(N) (pairs whose product stays within the
/// truncation) for Truncated systems.
double interaction_mass(const ClusterDistribution& u, const EmissionParams& params);

/// Birth-minus-death flux du_n/dt for every size with a nonzero rate, in the
/// kind-appropriate specialization of the kinetic equations.  The returned
/// map includes product sizes beyond the current support, so the fluxes sum
/// to -1 (cluster loss) and their mass-weighted sum to -ell (particle loss)
/// up to roundoff.  Throws DivisionByExhaustion when the normalizer is below
/// kExhaustionEps.
std::map<int, double> rhs(const ClusterDistribution& u, const EmissionParams& params);

struct SplitMoments {
  double m0s = 0.0;  // clusters of size <= ell
  double m0b = 0.0;  // clusters of size >  ell
  double m1s = 0.0;  // particles in small clusters
  double m1b = 0.0;  // particles in large clusters
};

SplitMoments split_moments(const ClusterDistribution& u);

/// Instantaneous rates of the four split moments.  Closed-form expectation
/// over reactant-pair cases: dm0s + dm0b = -1 and dm1s + dm1b = -ell exactly,
/// and dm0s, dm0b, dm1b are always nonpositive.  Throws DivisionByExhaustion
/// when no permissible pair carries weight.
SplitMoments split_moment_rates(const ClusterDistribution& u);

/// q-coordinates q_n = u_n / m_1.
ClusterDistribution to_q(const ClusterDistribution& u);
ClusterDistribution from_q(const ClusterDistribution& q, double m1);

/// Majorant sequence A_n for truncated-system cluster fractions:
/// u_i(t) <= (A_i / i) t^{(i-ell)/2L - 1} for i >= 2L + ell on the uniform
/// window [0, ell/(2(ell+1))].  Returns A indexed by size, valid for
/// n in [2L+ell, n_max]; entries below 2L+ell are zero.
///
/// The defining recursion
///   A_{n+1}/(n+1) = 2L/(n+1-ell-2L) * sum_{k} A_k A_{n-k+ell+1}
/// is anchored at A_{2L+ell} = 2L+ell.  The convolution only becomes
/// productive once both factors can sit at or above 2L+ell, i.e. from
/// n+1 = 4L+ell on; across the gap the anchor extends as A_n = n.
std::vector<double> catalan_bound_sequence(int big_l, int ell, int n_max);

}  // namespace coagem
