#pragma once

#include <functional>
#include <vector>

#include "coagem/distribution.hpp"
#include "coagem/ode.hpp"
#include "coagem/rational_poly.hpp"

namespace coagem {

/// Exact cluster-fraction polynomials u_2..u_n_max in m_1 for ell = 1 and
/// pure dimer initial data, generated by iterating the convolution map and
/// the integrating-factor map in exact rational arithmetic.  Element i of
/// the result is u_{i+2}.
std::vector<RationalPoly> polynomial_family(int n_max);

/// Evaluates the family at m_1 = 2 - t into a Large-kind state (ell = 1).
ClusterDistribution eval_family(const std::vector<RationalPoly>& polys, double t);

/// Minimal-size cluster fraction
/// u_{ell+1}(t) = u_{ell+1}(0) (m_1(t)/m_1(0))^{2(ell+1)/ell},
/// with m_1(t) = m1_0 - ell t.  Throws DomainError once m_1(t) <= 0.
double min_cluster_closed_form(double u0_min, double m1_0, int ell, double t);

/// Recursive integral solution for u_n given callables for u_{ell+1}..u_{n-1}
/// (`lower[i]` is u_{ell+1+i}).  The returned callable evaluates
///   u_n(t) = m^{2n/l} [ int_0^t m(s)^{-2n/l-2} sum_i i(n+l-i) u_i u_{n+l-i} ds
///            + u_n(0) m(0)^{-2n/l} ]
/// by adaptive quadrature to `quad_tol`.
std::function<double(double)> iterate_numeric(
    std::vector<std::function<double(double)>> lower, double u_n0, int ell,
    double m1_0, int n, double quad_tol = 1e-10);

/// Bottom-up chain of iterate_numeric solutions for sizes ell+1..n_max from
/// a Large-kind initial state, each level cached on a Chebyshev grid over
/// [0, t_max] so deeper levels stay cheap.  Element i is u_{ell+1+i}.
std::vector<std::function<double(double)>> build_numeric_family(
    const ClusterDistribution& u0, int n_max, double t_max,
    double quad_tol = 1e-10, int nodes = 96);

/// The ell = 1, u_1(0) = u_2(0) = 1/2 closed forms (m_1 = 3/2 - t).
struct MixedMonomerDimer {
  double u1, u2, u3;
};
MixedMonomerDimer mixed_monomer_dimer_closed_forms(double t);

/// Closed second and third moments for monodisperse k-mer initial data,
/// valid for t < k/(2k - ell).
double closed_m2(int k, int ell, double t);
double closed_m3(int k, int ell, double t);

/// t_gel = k/(2k - ell) and t_ex = k/ell for monodisperse k-mers.
double gelation_time(int k, int ell);
double exhaustion_time_kmer(int k, int ell);

/// Time series of m_0..m_kmax from the closed moment hierarchy, with m_0 and
/// m_1 substituted analytically and m_2..m_kmax integrated by the stiff
/// solver.  Throws GelationReached on second-moment blow-up before t_end.
struct MomentSeries {
  std::vector<double> t;
  std::vector<std::vector<double>> m;  // m[row][k], k = 0..kmax
};
MomentSeries moment_hierarchy(const MomentVector& m_init, int ell, int k_max,
                              double t_end, const IntegratorConfig& cfg,
                              double record_dt);

}  // namespace coagem
