#include "coagem/ode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "coagem/kinetics.hpp"

namespace coagem {

namespace {

// Alexander's 3-stage stiffly accurate SDIRK, order 3, L-stable, with a
// second-order embedded estimate.
constexpr double kGamma = 0.43586652150845899942;
constexpr double kA21 = (1.0 - kGamma) / 2.0;
constexpr double kB1 = 1.2084966491760100703;
constexpr double kB2 = -0.64436317068446906975;
constexpr double kC2 = (1.0 + kGamma) / 2.0;
constexpr double kBh1 = 0.77263012766755107092;
constexpr double kBh2 = 0.22736987233244892908;

double wrms(const Eigen::VectorXd& v, const Eigen::VectorXd& scale) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double r = v[i] / scale[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

// cubic Hermite interpolant over one accepted step
Eigen::VectorXd hermite(double theta, double h, const Eigen::VectorXd& y0,
                        const Eigen::VectorXd& f0, const Eigen::VectorXd& y1,
                        const Eigen::VectorXd& f1) {
  const double t2 = theta * theta;
  const double h00 = (1 + 2 * theta) * (1 - theta) * (1 - theta);
  const double h10 = theta * (1 - theta) * (1 - theta);
  const double h01 = t2 * (3 - 2 * theta);
  const double h11 = t2 * (theta - 1);
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

}  // namespace

StepperOutcome sdirk_integrate(
    const ImplicitSystem& system, Eigen::VectorXd& y, double t0, double t_end,
    const IntegratorConfig& cfg, const std::vector<double>& record_times,
    const std::function<void(double, const Eigen::VectorXd&)>& on_record,
    const std::function<double(const Eigen::VectorXd&)>& event_measure,
    double event_eps, bool nonnegative) {
  cfg.validate();
  const int n = system.dim();
  StepperOutcome out;

  Eigen::VectorXd f(n), k1(n), k2(n), k3(n), g(n), resid(n), delta(n), err(n);
  Eigen::MatrixXd jac(n, n), newton_mat(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  bool have_jac = false;
  double h_factored = -1.0;

  size_t next_record = 0;
  auto emit_records_upto = [&](double t_lo, double h, const Eigen::VectorXd& y0,
                               const Eigen::VectorXd& f0, const Eigen::VectorXd& y1,
                               const Eigen::VectorXd& f1, double t_cap) {
    while (next_record < record_times.size() &&
           record_times[next_record] <= t_cap + 1e-14) {
      const double tr = record_times[next_record];
      const double theta = std::clamp((tr - t_lo) / h, 0.0, 1.0);
      on_record(tr, hermite(theta, h, y0, f0, y1, f1));
      ++next_record;
    }
  };

  double t = t0;
  system.rhs(t, y, f);
  if (!record_times.empty() && record_times[0] <= t + 1e-14) {
    on_record(record_times[0], y);
    next_record = 1;
  }

  double h = std::min(cfg.h0, t_end - t0);
  int stale = 0;
  while (t < t_end - 1e-14) {
    if (out.diagnostics.steps + out.diagnostics.rejected > cfg.max_steps) {
      out.status = TerminalStatus::StepFailure;
      out.t_final = t;
      return out;
    }
    h = std::min(h, t_end - t);

    if (!have_jac || stale > 50) {
      system.jacobian(t, y, jac);
      ++out.diagnostics.jacobian_rebuilds;
      have_jac = true;
      stale = 0;
      h_factored = -1.0;
    }
    if (h_factored < 0.0 || std::abs(h - h_factored) > 0.2 * h_factored) {
      newton_mat = Eigen::MatrixXd::Identity(n, n) - (h * kGamma) * jac;
      lu.compute(newton_mat);
      h_factored = h;
    }

    // stage solves: g = y + h*(sum a_ij k_j) + h*gamma*f(t_i, g)
    bool newton_ok = true;
    auto solve_stage = [&](double ti, const Eigen::VectorXd& rhs_known,
                           Eigen::VectorXd& k) {
      g = y;  // predictor
      double prev_norm = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 12; ++it) {
        system.rhs(ti, g, k);
        resid = y + rhs_known + (h * kGamma) * k - g;
        delta = lu.solve(resid);
        g += delta;
        ++out.diagnostics.newton_iterations;
        double dn = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          const double sc = cfg.atol + cfg.rtol * std::abs(g[i]);
          const double r = delta[i] / sc;
          dn += r * r;
        }
        dn = std::sqrt(dn / static_cast<double>(n));
        if (dn < 0.02) {
          // evaluate f at the converged stage value so that linear flux
          // identities (cluster and particle loss rates) transfer exactly
          system.rhs(ti, g, k);
          return true;
        }
        if (it > 2 && dn > 0.9 * prev_norm && dn > 1.0) return false;
        prev_norm = dn;
      }
      return false;
    };

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    newton_ok = solve_stage(t + kGamma * h, zero, k1) &&
                solve_stage(t + kC2 * h, (h * kA21) * k1, k2) &&
                solve_stage(t + h, h * (kB1 * k1 + kB2 * k2), k3);
    if (!newton_ok) {
      ++out.diagnostics.rejected;
      if (stale > 0) {  // stale Jacobian: refresh before shrinking further
        have_jac = false;
      } else {
        h *= 0.3;
      }
      if (h < cfg.h_min) {
        out.status = TerminalStatus::StepFailure;
        out.t_final = t;
        return out;
      }
      continue;
    }

    Eigen::VectorXd y_new = y + h * (kB1 * k1 + kB2 * k2 + kGamma * k3);
    err = h * ((kB1 - kBh1) * k1 + (kB2 - kBh2) * k2 + kGamma * k3);
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i)
      scale[i] = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    const double e = wrms(err, scale);

    if (e > 1.0) {
      ++out.diagnostics.rejected;
      h *= std::clamp(0.9 * std::pow(e, -1.0 / 3.0), 0.1, 0.9);
      if (h < cfg.h_min) {
        out.status = TerminalStatus::StepFailure;
        out.t_final = t;
        return out;
      }
      continue;
    }
    if (nonnegative && y_new.minCoeff() < -kClampTol) {
      ++out.diagnostics.rejected;
      h *= 0.5;
      if (h < cfg.h_min) {
        out.status = TerminalStatus::StepFailure;
        out.t_final = t;
        return out;
      }
      continue;
    }

    // exhaustion event: bracket the crossing inside this step and stop there
    if (event_measure && event_measure(y_new) < event_eps) {
      double lo = 0.0, hi = 1.0;
      while ((hi - lo) * h > cfg.event_tol) {
        const double mid = 0.5 * (lo + hi);
        const Eigen::VectorXd ym = hermite(mid, h, y, f, y_new, k3);
        if (event_measure(ym) < event_eps)
          hi = mid;
        else
          lo = mid;
      }
      const double theta = 0.5 * (lo + hi);
      const double t_ex = t + theta * h;
      emit_records_upto(t, h, y, f, y_new, k3, t_ex);
      y = hermite(theta, h, y, f, y_new, k3);
      out.status = TerminalStatus::Exhausted;
      out.t_final = t_ex;
      ++out.diagnostics.steps;
      return out;
    }

    emit_records_upto(t, h, y, f, y_new, k3, t + h);
    t += h;
    y.swap(y_new);
    f = k3;  // stiffly accurate: k3 = f(t, y)
    ++out.diagnostics.steps;
    ++stale;
    // grow only in jumps so the factorization can be reused between jumps
    const double fac =
        std::clamp(0.9 * std::pow(std::max(e, 1e-10), -1.0 / 3.0), 0.2, 5.0);
    if (fac < 1.0 || fac >= 1.5) h *= fac;
  }
  out.status = TerminalStatus::ReachedTEnd;
  out.t_final = t;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Dense view of the kinetic equations over the contiguous size range
// [lo, hi].  One partner-bound formula covers all kinds: a pair (i, j) is
// admissible iff i + j >= ell + 1 and its product i + j - ell fits under hi.
class KineticSystem : public ImplicitSystem {
public:
  KineticSystem(int ell, int lo, int hi) : ell_(ell), lo_(lo), hi_(hi) {}

  int dim() const override { return hi_ - lo_ + 1; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }

  int partner_lo(int n) const { return std::max(lo_, ell_ + 1 - n); }
  int partner_hi(int n) const { return std::min(hi_, hi_ + ell_ - n); }

  // sum of j*y_j over the partner range of n
  double partner_sum(const Eigen::VectorXd& w, int n) const {
    const int a = partner_lo(n), b = partner_hi(n);
    double s = 0.0;
    for (int j = a; j <= b; ++j) s += w[j - lo_];
    return s;
  }

  double normalizer(const Eigen::VectorXd& y) const {
    Eigen::VectorXd w(dim());
    for (int i = lo_; i <= hi_; ++i) w[i - lo_] = i * y[i - lo_];
    double m = 0.0;
    for (int i = lo_; i <= hi_; ++i) m += w[i - lo_] * partner_sum(w, i);
    return m;
  }

  void rhs(double, const Eigen::VectorXd& y, Eigen::VectorXd& f) const override {
    const int d = dim();
    Eigen::VectorXd w(d), p(d);
    for (int i = lo_; i <= hi_; ++i) w[i - lo_] = i * y[i - lo_];
    double m = 0.0;
    for (int i = lo_; i <= hi_; ++i) {
      p[i - lo_] = partner_sum(w, i);
      m += w[i - lo_] * p[i - lo_];
    }
    f.setZero(d);
    for (int i = lo_; i <= hi_; ++i) {
      const double wi = w[i - lo_];
      if (wi == 0.0) continue;
      const int b = partner_hi(i);
      for (int j = partner_lo(i); j <= b; ++j)
        f[i + j - ell_ - lo_] += wi * w[j - lo_];
    }
    for (int i = lo_; i <= hi_; ++i) f[i - lo_] -= 2.0 * w[i - lo_] * p[i - lo_];
    f /= m;
  }

  void jacobian(double, const Eigen::VectorXd& y, Eigen::MatrixXd& jac) const override {
    const int d = dim();
    Eigen::VectorXd w(d), p(d), f(d);
    rhs(0.0, y, f);
    for (int i = lo_; i <= hi_; ++i) w[i - lo_] = i * y[i - lo_];
    double m = 0.0;
    for (int i = lo_; i <= hi_; ++i) {
      p[i - lo_] = partner_sum(w, i);
      m += w[i - lo_] * p[i - lo_];
    }
    jac.resize(d, d);
    for (int n = lo_; n <= hi_; ++n) {
      const int rn = n - lo_;
      const int plo = partner_lo(n), phi = partner_hi(n);
      for (int mm = lo_; mm <= hi_; ++mm) {
        const int cm = mm - lo_;
        double v = 0.0;
        const int q = n + ell_ - mm;  // birth partner completing a pair to n
        if (q >= lo_ && q <= hi_) v += 2.0 * mm * w[q - lo_];
        if (mm >= plo && mm <= phi) v -= 2.0 * w[rn] * mm;
        if (mm == n) v -= 2.0 * n * p[rn];
        jac(rn, cm) = v / m - f[rn] * (2.0 * mm * p[cm]) / m;
      }
    }
  }

private:
  int ell_;
  int lo_;
  int hi_;
};

TrajectoryRecord make_record(double t, const Eigen::VectorXd& y,
                             const KineticSystem& sys, SolveDiagnostics& diag) {
  TrajectoryRecord r;
  r.t = t;
  double m0 = 0, m1 = 0, m2 = 0, m3 = 0;
  Eigen::VectorXd yc = y;
  for (int n = sys.lo(); n <= sys.hi(); ++n) {
    double& v = yc[n - sys.lo()];
    if (v < 0.0) {
      diag.worst_clamp = std::min(diag.worst_clamp, v);
      v = 0.0;
      ++diag.clamps;
    }
    if (v > 0.0) {
      r.u.emplace_back(n, v);
      const double dn = n;
      m0 += v;
      m1 += dn * v;
      m2 += dn * dn * v;
      m3 += dn * dn * dn * v;
    }
  }
  r.m0 = m0;
  r.m1 = m1;
  r.m2 = m2;
  r.m3 = m3;
  r.gel = 0.0;  // deterministic solutions carry no single largest cluster
  r.interaction = sys.normalizer(yc);
  return r;
}

}  // namespace

SolveResult integrate(const ClusterDistribution& u0, const EmissionParams& params,
                      double t_end, const IntegratorConfig& cfg,
                      double record_dt) {
  cfg.validate();
  params.validate(u0);
  if (t_end <= 0.0) throw DomainError("t_end must be positive");
  if (record_dt <= 0.0) throw DomainError("record_dt must be positive");

  int lo = 1, hi = 0;
  const int top = u0.max_size();
  switch (params.kind) {
    case SystemKind::Small:
      lo = 1;
      hi = params.ell;
      break;
    case SystemKind::Truncated:
      lo = params.ell + 1;
      hi = params.truncation;
      break;
    case SystemKind::Large:
      lo = params.ell + 1;
      hi = cfg.truncation > 0 ? cfg.truncation
                              : std::max(4 * top + 2 * params.ell, 64);
      if (hi < 2 * top + params.ell)
        throw InvalidInitialDistribution("truncation below 2L + ell");
      break;
    case SystemKind::Full:
      lo = 1;
      hi = cfg.truncation > 0 ? cfg.truncation : u0.s_max();
      if (hi < 2 * top - params.ell)
        throw InvalidInitialDistribution("size cap cannot hold first products");
      break;
  }

  KineticSystem sys(params.ell, lo, hi);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.dim());
  for (const auto& [n, v] : u0.values()) y[n - lo] = v;

  if (sys.normalizer(y) < cfg.event_eps) {
    SolveResult res;
    res.trajectory.source = "ode";
    res.trajectory.ell = params.ell;
    res.trajectory.exhausted = true;
    res.trajectory.t_ex = 0.0;
    res.terminal = TerminalStatus::Exhausted;
    res.t_ex = 0.0;
    res.diagnostics.truncation = hi;
    res.trajectory.records.push_back(make_record(0.0, y, sys, res.diagnostics));
    return res;
  }

  std::vector<double> record_times;
  for (double tr = 0.0; tr < t_end - 1e-12; tr += record_dt)
    record_times.push_back(tr);
  record_times.push_back(t_end);

  SolveResult res;
  res.trajectory.source = "ode";
  res.trajectory.ell = params.ell;
  res.diagnostics.truncation = hi;

  auto on_record = [&](double t, const Eigen::VectorXd& yr) {
    res.trajectory.records.push_back(make_record(t, yr, sys, res.diagnostics));
  };
  auto measure = [&](const Eigen::VectorXd& yr) { return sys.normalizer(yr); };

  StepperOutcome out =
      sdirk_integrate(sys, y, 0.0, t_end, cfg, record_times, on_record,
                      measure, cfg.event_eps, /*nonnegative=*/true);
  res.terminal = out.status;
  auto merge = [&](const SolveDiagnostics& d) {
    res.diagnostics.steps = d.steps;
    res.diagnostics.rejected = d.rejected;
    res.diagnostics.newton_iterations = d.newton_iterations;
    res.diagnostics.jacobian_rebuilds = d.jacobian_rebuilds;
  };
  merge(out.diagnostics);
  if (out.status == TerminalStatus::Exhausted) {
    res.t_ex = out.t_final;
    res.trajectory.exhausted = true;
    res.trajectory.t_ex = out.t_final;
    if (res.trajectory.records.empty() ||
        res.trajectory.records.back().t < out.t_final - 1e-14)
      res.trajectory.records.push_back(
          make_record(out.t_final, y, sys, res.diagnostics));
  }
  res.trajectory.steps = out.diagnostics.steps;
  return res;
}

std::optional<double> detect_exhaustion(const SolveResult& result) {
  if (result.terminal != TerminalStatus::Exhausted) return std::nullopt;
  return result.t_ex;
}

Eigen::MatrixXd exhaustion_heatmap(int grid_n, const IntegratorConfig& cfg,
                                   int workers) {
  if (grid_n < 2) throw DomainError("grid_n must be at least 2");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd grid = Eigen::MatrixXd::Constant(grid_n, grid_n, nan);

  if (workers <= 0) {
    if (const char* env = std::getenv("COAGEM_WORKERS")) workers = std::atoi(env);
    if (workers <= 0)
      workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }

  std::atomic<int> next(0);
  auto worker = [&]() {
    for (;;) {
      const int cell = next.fetch_add(1);
      if (cell >= grid_n * grid_n) return;
      const int i = cell / grid_n, j = cell % grid_n;
      const double p = static_cast<double>(i) / (grid_n - 1);
      const double q = static_cast<double>(j) / (grid_n - 1);
      const double r = 1.0 - p - q;
      if (r < -1e-12) continue;                 // outside the simplex
      if (q < 1e-12 && r < 1e-12) continue;     // degenerate corner p = 1
      std::map<int, double> init;
      if (p > 0.0) init[1] = p;
      if (q > 0.0) init[2] = q;
      if (r > 1e-12) init[3] = r;
      auto u0 = ClusterDistribution::initial(3, std::move(init));
      auto res = integrate(u0, EmissionParams::small(3), 1.5, cfg, 0.05);
      if (res.terminal == TerminalStatus::Exhausted)
        grid(i, j) = res.t_ex;
    }
  };
  std::vector<std::thread> pool;
  for (int wk = 0; wk < workers; ++wk) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return grid;
}

double small_time_slope(const std::vector<double>& ts,
                        const std::vector<double>& us, double t_a, double t_b) {
  if (ts.size() != us.size()) throw DomainError("series length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] < t_a || ts[i] > t_b || ts[i] <= 0.0 || us[i] <= 0.0) continue;
    const double x = std::log(ts[i]), y = std::log(us[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw DomainError("fewer than two usable points in window");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace coagem
