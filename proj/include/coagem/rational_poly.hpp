#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>

namespace coagem {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact-rational polynomial in the total mass m_1.  For the dimer family
/// u_n the exponents live in [2n, 3n-2], the lowest coefficient is positive
/// and the highest has sign (-1)^n; floating-point convolution loses that
/// structure around n = 15, exact arithmetic keeps it for free.
struct RationalPoly {
  std::map<int, Rational> coeff;  // exponent of m_1 -> coefficient

  bool empty() const { return coeff.empty(); }
  int lowest() const { return coeff.empty() ? 0 : coeff.begin()->first; }
  int highest() const { return coeff.empty() ? 0 : coeff.rbegin()->first; }

  Rational at(int p) const {
    auto it = coeff.find(p);
    return it == coeff.end() ? Rational(0) : it->second;
  }

  void add(int p, const Rational& a) {
    auto [it, fresh] = coeff.try_emplace(p, a);
    if (!fresh) {
      it->second += a;
      if (it->second == 0) coeff.erase(it);
    } else if (it->second == 0) {
      coeff.erase(it);
    }
  }

  double eval_m(double m1) const {
    double s = 0.0;
    for (const auto& [p, a] : coeff)
      s += static_cast<double>(a) * std::pow(m1, p);
    return s;
  }
};

inline RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly out;
  for (const auto& [pa, ca] : a.coeff)
    for (const auto& [pb, cb] : b.coeff) out.add(pa + pb, ca * cb);
  return out;
}

}  // namespace coagem
