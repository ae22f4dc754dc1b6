#include "viewdir/fvs.hpp"

#include "viewdir/random.hpp"

#include <limits>

namespace viewdir {

namespace {

std::vector<std::string> seed_selection(const ViewSet& set, std::size_t k, std::uint64_t seed) {
  std::vector<std::string> selected = set.selected();
  if (selected.size() >= k) return selected;
  const auto candidates = set.candidate_indices();
  Rng rng = make_rng(seed);
  for (std::size_t i : draw_indices(candidates.size(), k - selected.size(), rng)) {
    selected.push_back(set.views()[candidates[i]].id);
  }
  return selected;
}

}  // namespace

ViewSet fvs_select(const ViewSet& set, const FvsConfig& cfg) {
  if (cfg.target_n > set.size()) {
    throw Error(ErrorCode::BudgetExceedsPool,
                "budget " + std::to_string(cfg.target_n) + " exceeds pool of " +
                    std::to_string(set.size()));
  }
  if (cfg.initial_k == 0 || cfg.initial_k > cfg.target_n) {
    throw Error(ErrorCode::InvalidSpec, "initial_k must satisfy 1 <= k <= target_n");
  }
  const DistanceSpec spec = resolve_spatial_scale(set, cfg.spec);
  spec.validate();

  const auto& views = set.views();
  std::vector<std::string> selected = seed_selection(set, cfg.initial_k, cfg.seed);
  if (selected.size() >= cfg.target_n) return set.with_selection(std::move(selected));

  std::vector<char> taken(views.size(), 0);
  for (const auto& id : selected) taken[set.index_of(id)] = 1;

  std::vector<double> nearest(views.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (taken[i]) continue;
    for (const auto& id : selected) {
      nearest[i] = std::min(nearest[i], view_distance(views[i], set.view(id), spec));
    }
  }

  while (selected.size() < cfg.target_n) {
    std::size_t best = views.size();
    for (std::size_t i = 0; i < views.size(); ++i) {
      if (taken[i]) continue;
      if (best == views.size() || nearest[i] > nearest[best] ||
          (nearest[i] == nearest[best] && views[i].id < views[best].id)) {
        best = i;
      }
    }
    taken[best] = 1;
    selected.push_back(views[best].id);
    for (std::size_t i = 0; i < views.size(); ++i) {
      if (taken[i]) continue;
      nearest[i] = std::min(nearest[i], view_distance(views[i], views[best], spec));
    }
  }
  return set.with_selection(std::move(selected));
}

double maximin_radius(const ViewSet& set, const DistanceSpec& spec) {
  const auto idx = set.selected_indices();
  if (idx.size() < 2) {
    throw Error(ErrorCode::TooFewSelected, "maximin radius needs at least two selected views");
  }
  const DistanceSpec resolved = resolve_spatial_scale(set, spec);
  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      radius = std::min(radius, view_distance(set.views()[idx[a]], set.views()[idx[b]], resolved));
    }
  }
  return radius;
}

ViewSet random_select(const ViewSet& set, std::size_t count, std::uint64_t seed) {
  if (count > set.size()) {
    throw Error(ErrorCode::BudgetExceedsPool,
                "budget " + std::to_string(count) + " exceeds pool of " + std::to_string(set.size()));
  }
  return set.with_selection(seed_selection(set, count, seed));
}

}  // namespace viewdir
