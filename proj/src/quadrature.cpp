#include "coagem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "coagem/errors.hpp"

namespace coagem {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants)
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value;
  double error;
};

PanelResult kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    kronrod += kWgk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

struct Panel {
  double error;
  double a, b, value;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int max_intervals) {
  if (a == b) return 0.0;
  auto first = kronrod15(f, a, b);
  std::priority_queue<Panel> panels;
  panels.push({first.error, a, b, first.value});
  double total = first.value;
  double total_err = first.error;
  int used = 1;
  while (total_err > abs_tol) {
    if (used >= max_intervals)
      throw QuadratureFailure("tolerance not reached after " +
                              std::to_string(used) + " panels");
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = kronrod15(f, worst.a, mid);
    const auto right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    panels.push({left.error, worst.a, mid, left.value});
    panels.push({right.error, mid, worst.b, right.value});
    ++used;
  }
  return total;
}

}  // namespace coagem
