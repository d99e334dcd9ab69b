#pragma once

#include <functional>

namespace coagem {

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b] to the given
/// absolute tolerance.  Throws QuadratureFailure if the interval budget is
/// exhausted before the tolerance is met.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-10,
                          int max_intervals = 2000);

}  // namespace coagem
