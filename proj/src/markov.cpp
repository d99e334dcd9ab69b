#include "coagem/markov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace coagem {

namespace {

constexpr long kRetryCap = 1000000;

// Stockmayer restricts both draws to sizes below the threshold.
std::int64_t sampling_weight(const ParticleState& s, const GelPolicy& p) {
  if (p.kind == GelPolicy::Kind::Stockmayer)
    return s.index.prefix(static_cast<int>(std::min<std::int64_t>(
        p.threshold - 1, s.index.capacity())));
  return s.index.total();
}

}  // namespace

void ParticleState::audit() const {
  std::int64_t clusters = 0, particles = 0;
  for (const auto& [n, c] : counts) {
    if (c < 0) throw std::logic_error("negative count at size " + std::to_string(n));
    clusters += c;
    particles += static_cast<std::int64_t>(n) * c;
    if (index.weight(n) != static_cast<std::int64_t>(n) * c)
      throw std::logic_error("index weight mismatch at size " + std::to_string(n));
  }
  if (clusters != total_clusters || particles != total_particles)
    throw std::logic_error("running totals out of sync");
  if (index.total() != total_particles)
    throw std::logic_error("index total out of sync");
}

ParticleState init_state(std::int64_t n, const ClusterDistribution& u0,
                         std::uint64_t seed) {
  if (n < 2) throw InvalidInitialDistribution("need at least two clusters");
  if (u0.empty()) throw InvalidInitialDistribution("empty support");
  double sum = 0.0;
  for (const auto& [sz, v] : u0.values()) {
    if (v < 0.0) throw InvalidInitialDistribution("negative fraction");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidInitialDistribution("fractions sum to " + std::to_string(sum));

  // largest-remainder rounding; ties go to the smaller size, which the
  // ascending stable sort below delivers for equal remainders
  struct Slot {
    int size;
    std::int64_t base;
    double remainder;
  };
  std::vector<Slot> slots;
  std::int64_t assigned = 0;
  for (const auto& [sz, v] : u0.values()) {
    const double exact = static_cast<double>(n) * v;
    const auto base = static_cast<std::int64_t>(std::floor(exact));
    slots.push_back({sz, base, exact - static_cast<double>(base)});
    assigned += base;
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return a.remainder > b.remainder;
  });
  std::int64_t leftover = n - assigned;
  if (leftover > static_cast<std::int64_t>(slots.size()) || leftover < 0)
    throw InvalidInitialDistribution("fractions too far from normalized");
  for (std::int64_t k = 0; k < leftover; ++k)
    slots[static_cast<size_t>(k)].base += 1;

  ParticleState st;
  st.ell = u0.ell();
  st.n0 = n;
  st.seed = seed;
  st.rng = SplitMix64(seed);
  st.index = WeightedSizeIndex(std::max(64, 2 * u0.max_size()));
  for (const auto& slot : slots) {
    if (slot.base <= 0) continue;
    st.counts[slot.size] = slot.base;
    st.total_clusters += slot.base;
    st.total_particles += static_cast<std::int64_t>(slot.size) * slot.base;
    st.index.add(slot.size, static_cast<std::int64_t>(slot.size) * slot.base);
  }
  st.p0 = st.total_particles;
  return st;
}

bool feasibility_check(const ParticleState& state, const GelPolicy& policy) {
  if (state.total_clusters < 2) return false;
  const std::int64_t cutoff =
      policy.kind == GelPolicy::Kind::Stockmayer ? policy.threshold : 0;
  // walk the two largest admissible occupied sizes
  int first = 0, second = 0;
  std::int64_t first_count = 0;
  for (auto it = state.counts.rbegin(); it != state.counts.rend(); ++it) {
    if (cutoff > 0 && it->first >= cutoff) continue;
    if (it->second <= 0) continue;
    if (first == 0) {
      first = it->first;
      first_count = it->second;
      if (first_count >= 2) break;
    } else {
      second = it->first;
      break;
    }
  }
  if (first == 0) return false;
  if (first_count >= 2) return 2 * first >= state.ell + 1;
  if (second == 0) return false;
  return first + second >= state.ell + 1;
}

std::optional<std::pair<int, int>> sample_pair(ParticleState& state,
                                               SplitMix64& rng,
                                               const GelPolicy& policy) {
  if (!feasibility_check(state, policy)) return std::nullopt;
  for (long attempt = 0;; ++attempt) {
    const std::int64_t w1 = sampling_weight(state, policy);
    if (w1 <= 0) return std::nullopt;
    const int i = state.index.find(static_cast<std::int64_t>(rng.bounded(
        static_cast<std::uint64_t>(w1))));
    state.index.add(i, -i);  // remove one i-cluster for the second draw
    const std::int64_t w2 = sampling_weight(state, policy);
    if (w2 <= 0) {
      state.index.add(i, i);
      return std::nullopt;
    }
    const int j = state.index.find(static_cast<std::int64_t>(rng.bounded(
        static_cast<std::uint64_t>(w2))));
    state.index.add(i, i);  // restore
    if (i + j >= state.ell + 1) return std::make_pair(i, j);
    if (attempt > 0 && attempt % kRetryCap == 0 &&
        !feasibility_check(state, policy))
      return std::nullopt;
  }
}

bool step(ParticleState& state, SplitMix64& rng, const GelPolicy& policy) {
  const auto pair = sample_pair(state, rng, policy);
  if (!pair) return false;
  const auto [i, j] = *pair;
  const int product = i + j - state.ell;

  auto take = [&state](int size) {
    auto it = state.counts.find(size);
    if (--(it->second) == 0) state.counts.erase(it);
    state.index.add(size, -size);
  };
  take(i);
  take(j);
  state.counts[product] += 1;
  state.index.add(product, product);
  state.total_clusters -= 1;
  state.total_particles -= state.ell;
  state.step_count += 1;
  return true;
}

double gel_fraction(const ParticleState& state) {
  if (state.counts.empty() || state.total_particles <= 0) return 0.0;
  return static_cast<double>(state.counts.rbegin()->first) /
         static_cast<double>(state.total_particles);
}

TrajectoryRecord record_state(const ParticleState& state) {
  TrajectoryRecord r;
  r.t = state.time();
  const double n0 = static_cast<double>(state.n0);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
  r.u.reserve(state.counts.size());
  for (const auto& [n, c] : state.counts) {
    const double u = static_cast<double>(c) / n0;
    const double dn = static_cast<double>(n);
    r.u.emplace_back(n, u);
    m0 += u;
    m1 += dn * u;
    m2 += dn * dn * u;
    m3 += dn * dn * dn * u;
  }
  r.m0 = m0;
  r.m1 = m1;
  r.m2 = m2;
  r.m3 = m3;
  r.gel = gel_fraction(state);
  // empirical interaction mass: m1^2 minus the forbidden small-pair block
  double forbidden = 0.0;
  for (const auto& [i, ci] : state.counts) {
    if (i >= state.ell) break;
    for (const auto& [j, cj] : state.counts) {
      if (i + j > state.ell) break;
      forbidden += static_cast<double>(i) * j * (static_cast<double>(ci) / n0) *
                   (static_cast<double>(cj) / n0);
    }
  }
  r.interaction = m1 * m1 - forbidden;
  return r;
}

Trajectory run(ParticleState& state, double t_end, double record_dt,
               const GelPolicy& policy) {
  if (t_end <= 0.0) throw DomainError("t_end must be positive");
  if (record_dt <= 0.0) throw DomainError("record_dt must be positive");

  Trajectory traj;
  traj.source = "markov";
  traj.seed = state.seed;
  traj.n0 = state.n0;
  traj.ell = state.ell;
  traj.policy = policy.name();

  traj.records.push_back(record_state(state));
  long next_record = 1;
  bool exhausted = false;
  while (state.time() < t_end) {
    if (!step(state, state.rng, policy)) {
      exhausted = true;
      break;
    }
    const double t = state.time();
    if (t + 1e-15 >= next_record * record_dt) {
      traj.records.push_back(record_state(state));
      while (next_record * record_dt <= t + 1e-15) ++next_record;
    }
  }
  if (exhausted) {
    traj.exhausted = true;
    traj.t_ex = state.time();
    if (traj.records.back().t < state.time())
      traj.records.push_back(record_state(state));
  }
  traj.steps = state.step_count;
  return traj;
}

}  // namespace coagem
