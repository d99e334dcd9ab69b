#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace coagem {

/// One time-stamped snapshot: sparse cluster fractions, the first four
/// moments, the gel fraction and the interaction mass.
struct TrajectoryRecord {
  double t = 0.0;
  std::vector<std::pair<int, double>> u;  // sorted (size, fraction)
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
  double gel = 0.0;
  double interaction = 0.0;

  double fraction(int n) const {
    for (const auto& [size, v] : u)
      if (size == n) return v;
    return 0.0;
  }
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;

  // run metadata
  std::string source;  // "markov" or "ode"
  std::uint64_t seed = 0;
  std::int64_t n0 = 0;
  int ell = 1;
  std::string policy;
  bool exhausted = false;
  double t_ex = -1.0;
  std::int64_t steps = 0;

  const TrajectoryRecord& at_time(double t, double tol = 1e-9) const;
};

inline const TrajectoryRecord& Trajectory::at_time(double t, double tol) const {
  const TrajectoryRecord* best = nullptr;
  double best_d = tol;
  for (const auto& r : records) {
    const double d = r.t > t ? r.t - t : t - r.t;
    if (d <= best_d) {
      best_d = d;
      best = &r;
    }
  }
  if (!best) throw std::out_of_range("no record near requested time");
  return *best;
}

}  // namespace coagem
