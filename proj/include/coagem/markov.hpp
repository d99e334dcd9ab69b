#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "coagem/distribution.hpp"
#include "coagem/rng.hpp"
#include "coagem/trajectory.hpp"
#include "coagem/weighted_index.hpp"

namespace coagem {

struct GelPolicy {
  enum class Kind { ZiffStell, Stockmayer };
  Kind kind = Kind::ZiffStell;
  std::int64_t threshold = 0;  // Stockmayer: sizes >= threshold cannot react

  static GelPolicy ziff_stell() { return {Kind::ZiffStell, 0}; }
  static GelPolicy stockmayer(std::int64_t threshold) {
    return {Kind::Stockmayer, threshold};
  }
  const char* name() const {
    return kind == Kind::ZiffStell ? "ziff-stell" : "stockmayer";
  }
};

/// Finite-N cluster counts plus the weighted sampling index.  One reaction
/// per step; time is the extent of reaction t = step_count / N0.
struct ParticleState {
  int ell = 1;
  std::map<int, std::int64_t> counts;
  std::int64_t total_clusters = 0;
  std::int64_t total_particles = 0;
  std::int64_t step_count = 0;
  std::int64_t n0 = 0;  // initial cluster count, fixes dt = 1/N0
  std::int64_t p0 = 0;  // initial particle count
  std::uint64_t seed = 0;
  WeightedSizeIndex index;
  SplitMix64 rng;

  double time() const { return static_cast<double>(step_count) / static_cast<double>(n0); }

  /// Recomputes totals and index weights from counts; throws on mismatch.
  void audit() const;
};

/// Integer counts from fractions by largest-remainder rounding of N * u0
/// (ties award the extra unit to the smaller size), so sum U_n = N exactly.
ParticleState init_state(std::int64_t n, const ClusterDistribution& u0,
                         std::uint64_t seed);

/// True iff some ordered pair of distinct clusters admissible under the
/// policy has combined size >= ell + 1.
bool feasibility_check(const ParticleState& state, const GelPolicy& policy);

/// Ordered size-proportional draw without replacement, conditioned on a
/// nonempty product by rejection.  nullopt means no permissible pair exists
/// (exhaustion at finite N).
std::optional<std::pair<int, int>> sample_pair(ParticleState& state,
                                               SplitMix64& rng,
                                               const GelPolicy& policy);

/// One reaction: remove the sampled reactants, insert the product, advance
/// the step counter.  Returns false when the state is exhausted.
bool step(ParticleState& state, SplitMix64& rng, const GelPolicy& policy);

/// Runs until t_end or exhaustion, recording at the given cadence.
/// Deterministic for a fixed (seed, config).
Trajectory run(ParticleState& state, double t_end, double record_dt,
               const GelPolicy& policy);

/// Largest occupied size over total particles; 0 for an empty state.
double gel_fraction(const ParticleState& state);

/// Snapshot record of the current state (fractions, moments, gel, M).
TrajectoryRecord record_state(const ParticleState& state);

}  // namespace coagem
