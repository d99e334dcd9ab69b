#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "coagem/distribution.hpp"
#include "coagem/trajectory.hpp"

namespace coagem {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-12;
  double h0 = 1e-6;        // initial step
  double h_min = 1e-14;    // below this a failing step aborts the solve
  long max_steps = 5000000;
  double event_tol = 1e-7; // width of the exhaustion-time bracket
  double event_eps = 1e-9; // interaction mass below this declares exhaustion
  int truncation = 0;      // size cap for Large/Full solves (0 = default)

  void validate() const {
    if (rtol < 1e-13) throw std::invalid_argument("rtol below 1e-13");
    if (h_min <= 0.0) throw std::invalid_argument("h_min must be positive");
    if (atol <= 0.0) throw std::invalid_argument("atol must be positive");
  }
};

enum class TerminalStatus { ReachedTEnd, Exhausted, StepFailure };

struct SolveDiagnostics {
  long steps = 0;
  long rejected = 0;
  long newton_iterations = 0;
  long jacobian_rebuilds = 0;
  long clamps = 0;          // negative fractions zeroed at record time
  double worst_clamp = 0.0; // most negative value seen before clamping
  int truncation = 0;       // effective size cap of the solved system
};

struct SolveResult {
  Trajectory trajectory;
  TerminalStatus terminal = TerminalStatus::ReachedTEnd;
  double t_ex = -1.0;
  SolveDiagnostics diagnostics;
};

/// Integrates the kind-appropriate kinetic system from u0 with an L-stable
/// third-order SDIRK method, simplified-Newton iterations on an analytically
/// assembled Jacobian, embedded error control and dense output at the record
/// cadence.  Large systems are solved as their truncation (default cap
/// max(4L + 2 ell, 64)); Full systems are capped at cfg.truncation or
/// u0.s_max(), with reactions whose product would exceed the cap excluded so
/// that the cluster and particle loss identities stay exact.
SolveResult integrate(const ClusterDistribution& u0, const EmissionParams& params,
                      double t_end, const IntegratorConfig& cfg,
                      double record_dt);

/// Exhaustion time of a finished solve, if it exhausted.
std::optional<double> detect_exhaustion(const SolveResult& result);

/// Exhaustion times of the three-species system (ell = 3, sizes <= 3) over
/// the simplex grid p = i/(n-1), q = j/(n-1), p + q <= 1.  Cells outside the
/// simplex and the degenerate corner (p, q) = (1, 0) are NaN.  Cells are
/// independent and evaluated on a bounded worker pool.
Eigen::MatrixXd exhaustion_heatmap(int grid_n, const IntegratorConfig& cfg,
                                   int workers = 0);

/// Least-squares slope of log u versus log t over the window [t_a, t_b].
double small_time_slope(const std::vector<double>& ts,
                        const std::vector<double>& us, double t_a, double t_b);

// ---------------------------------------------------------------------------
// Generic implicit core, shared with the moment hierarchy.

class ImplicitSystem {
public:
  virtual ~ImplicitSystem() = default;
  virtual int dim() const = 0;
  virtual void rhs(double t, const Eigen::VectorXd& y, Eigen::VectorXd& f) const = 0;
  virtual void jacobian(double t, const Eigen::VectorXd& y,
                        Eigen::MatrixXd& jac) const = 0;
};

struct StepperOutcome {
  TerminalStatus status = TerminalStatus::ReachedTEnd;
  double t_final = 0.0;  // event time when status == Exhausted
  SolveDiagnostics diagnostics;
};

/// SDIRK3 driver.  `record_times` must be ascending; `on_record` receives
/// dense-output states at those times.  When `event_measure` is set, the
/// solve stops at the first time it falls below `event_eps` (bracketed to
/// cfg.event_tol).  With `nonnegative`, steps producing components below
/// -kClampTol are rejected.
StepperOutcome sdirk_integrate(
    const ImplicitSystem& system, Eigen::VectorXd& y, double t0, double t_end,
    const IntegratorConfig& cfg, const std::vector<double>& record_times,
    const std::function<void(double, const Eigen::VectorXd&)>& on_record,
    const std::function<double(const Eigen::VectorXd&)>& event_measure,
    double event_eps, bool nonnegative);

}  // namespace coagem
