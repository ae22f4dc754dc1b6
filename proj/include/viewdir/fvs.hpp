#pragma once

#include "viewdir/metrics.hpp"
#include "viewdir/scene.hpp"

#include <cstdint>

namespace viewdir {

struct FvsConfig {
  std::size_t target_n = 0;
  std::size_t initial_k = 1;
  std::uint64_t seed = 0;
  DistanceSpec spec;
};

/// Farthest view sampling.
///
/// Views already selected in `set` seed S (e.g. a forced start). The seed set
/// is topped up to `initial_k` with uniformly random candidates drawn from
/// `seed`; every further pick is the candidate maximising its minimum distance
/// to S, ties going to the lexicographically smallest id. Per-candidate
/// nearest-selected distances are cached, so each pick costs O(|V|) distance
/// evaluations.
///
/// Throws BudgetExceedsPool when target_n > |V|, InvalidSpec when
/// initial_k == 0 or initial_k > target_n, and propagates metric errors.
ViewSet fvs_select(const ViewSet& set, const FvsConfig& cfg);

/// Smallest pairwise distance within the selected set. Throws
/// TooFewSelected for fewer than two selected views.
double maximin_radius(const ViewSet& set, const DistanceSpec& spec);

/// Uniform random selection of `count` views: the same draw sequence FVS uses
/// for its random seed set, so both agree on their first `initial_k` picks.
ViewSet random_select(const ViewSet& set, std::size_t count, std::uint64_t seed);

}  // namespace viewdir
