#include "viewdir/igs.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace viewdir {

void IgsConfig::validate(std::size_t pool_size) const {
  if (initial_k == 0) throw Error(ErrorCode::InvalidSpec, "initial_k must be positive");
  std::size_t total = initial_k;
  for (std::size_t l : schedule) {
    if (l == 0) throw Error(ErrorCode::InvalidSpec, "schedule entries must be positive");
    total += l;
  }
  if (total > pool_size) {
    throw Error(ErrorCode::ScheduleExhaustsPool,
                "initial_k + schedule = " + std::to_string(total) + " exceeds pool of " +
                    std::to_string(pool_size));
  }
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (const auto* z = std::get_if<ZipfSampler>(&sampler); z && !positive(z->gamma)) {
    throw Error(ErrorCode::InvalidSpec, "gamma must be finite and > 0");
  }
  if (const auto* m = std::get_if<MvmfSampler>(&sampler);
      m && (!positive(m->kappa) || !positive(m->sigma))) {
    throw Error(ErrorCode::InvalidSpec, "kappa and sigma must be finite and > 0");
  }
  if (relaxation) relaxation->validate(total);
}

std::vector<std::size_t> incremental_schedule() {
  std::vector<std::size_t> schedule(5, 5);
  schedule.insert(schedule.end(), 12, 10);
  return schedule;
}

ErrorRanking::ErrorRanking(const QualityReport& report, std::span<const std::string> candidates) {
  std::vector<std::pair<double, std::string>> keyed;
  keyed.reserve(candidates.size());
  for (const auto& id : candidates) keyed.emplace_back(report.at(id), id);
  std::sort(keyed.begin(), keyed.end());
  order_.reserve(keyed.size());
  for (auto& [score, id] : keyed) {
    rank_.emplace(id, order_.size());
    order_.push_back(std::move(id));
  }
}

std::size_t ErrorRanking::rank(std::string_view id) const {
  auto it = rank_.find(id);
  if (it == rank_.end()) {
    throw Error(ErrorCode::UnknownView, "view '" + std::string(id) + "' is not ranked");
  }
  return it->second;
}

Eigen::VectorXd zipf_pmf(const ErrorRanking& ranking, double gamma) {
  const auto q = static_cast<Eigen::Index>(ranking.size());
  if (q <= 1) return Eigen::VectorXd::Ones(q);
  // Log-weights are <= 0 with the maximum (0) at rank 0, so exp never
  // overflows and the largest weight is exactly 1.
  const Eigen::VectorXd log_w =
      -gamma / static_cast<double>(q - 1) * Eigen::VectorXd::LinSpaced(q, 0.0, static_cast<double>(q - 1));
  const Eigen::VectorXd w = log_w.array().exp();
  return w / w.sum();
}

std::vector<std::string> zipf_draw(const ErrorRanking& ranking, double gamma, std::size_t count,
                                   Rng& rng) {
  const std::size_t q = ranking.size();
  if (count > q) {
    throw Error(ErrorCode::DrawExceedsPool,
                "cannot draw " + std::to_string(count) + " of " + std::to_string(q) + " candidates");
  }
  const Eigen::VectorXd pmf = zipf_pmf(ranking, gamma);
  std::vector<char> remaining(q, 1);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t draw = 0; draw < count; ++draw) {
    double total = 0.0;
    for (std::size_t r = 0; r < q; ++r) {
      if (remaining[r]) total += pmf[static_cast<Eigen::Index>(r)];
    }
    std::size_t pick = q;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cumulative = 0.0;
      for (std::size_t r = 0; r < q; ++r) {
        if (!remaining[r]) continue;
        const double w = pmf[static_cast<Eigen::Index>(r)];
        cumulative += w;
        if (w > 0.0) pick = r;  // rounding fallback: last positive remaining
        if (target < cumulative && w > 0.0) break;
      }
    }
    if (pick == q) {
      // Every remaining weight underflowed; fall back to rank order.
      pick = static_cast<std::size_t>(std::find(remaining.begin(), remaining.end(), 1) - remaining.begin());
    }
    remaining[pick] = 0;
    out.push_back(ranking.worst_first()[pick]);
  }
  return out;
}

std::vector<std::string> greedy_draw(const ErrorRanking& ranking, std::size_t count) {
  if (count > ranking.size()) {
    throw Error(ErrorCode::DrawExceedsPool,
                "cannot draw " + std::to_string(count) + " of " + std::to_string(ranking.size()) +
                    " candidates");
  }
  return {ranking.worst_first().begin(),
          ranking.worst_first().begin() + static_cast<std::ptrdiff_t>(count)};
}

Eigen::VectorXd mvmf_weights(std::span<const double> scores, double sigma) {
  const auto q = static_cast<Eigen::Index>(scores.size());
  if (q == 0) return {};
  const Eigen::Map<const Eigen::VectorXd> m(scores.data(), q);
  const double hi = m.maxCoeff();
  const double lo = m.minCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Constant(q, 1.0 / static_cast<double>(q));
  const Eigen::VectorXd inverse = (hi - m.array()) / (hi - lo);
  // inverse <= 1, so shifting by 1/sigma keeps every exponent <= 0.
  const Eigen::VectorXd w = ((inverse.array() - 1.0) / sigma).exp();
  return w / w.sum();
}

std::vector<std::string> mvmf_draw(std::span<const CameraView> candidates,
                                   const QualityReport& report, double kappa, double sigma,
                                   std::size_t count, Rng& rng) {
  const std::size_t q = candidates.size();
  if (count > q) {
    throw Error(ErrorCode::DrawExceedsPool,
                "cannot draw " + std::to_string(count) + " of " + std::to_string(q) + " candidates");
  }
  std::vector<double> scores;
  std::vector<std::string> ids;
  scores.reserve(q);
  ids.reserve(q);
  for (const auto& v : candidates) {
    if (std::abs(v.center.norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::NotOnSphere, "view '" + v.id + "' is not on the unit sphere");
    }
    scores.push_back(report.at(v.id));
    ids.push_back(v.id);
  }
  const Eigen::VectorXd alpha = mvmf_weights(scores, sigma);
  std::vector<double> cumulative(q);
  std::partial_sum(alpha.data(), alpha.data() + q, cumulative.begin());

  std::vector<char> taken(q, 0);
  std::vector<std::string> out;
  out.reserve(count);
  const std::size_t max_attempts = 10 * count * q;
  for (std::size_t attempt = 0; out.size() < count && attempt < max_attempts; ++attempt) {
    const double u = uniform01(rng) * cumulative.back();
    const std::size_t component = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                 cumulative.begin()),
        q - 1);
    const Vec3 x = sample_vmf(candidates[component].center, kappa, rng);
    std::size_t snap = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q; ++i) {
      const double d = candidates[i].center.dot(x);
      if (d > best || (d == best && ids[i] < ids[snap])) best = d, snap = i;
    }
    if (taken[snap]) continue;
    taken[snap] = 1;
    out.push_back(ids[snap]);
  }
  if (out.size() < count) {
    const ErrorRanking ranking(report, ids);
    for (const auto& id : ranking.worst_first()) {
      if (out.size() == count) break;
      const auto i = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), id) - ids.begin());
      if (taken[i]) continue;
      taken[i] = 1;
      out.push_back(id);
    }
  }
  return out;
}

IgsResult igs_run(const ViewSet& set, const IgsConfig& cfg, Evaluator& evaluator) {
  IgsConfig effective = cfg;
  effective.initial_k = std::max(cfg.initial_k, set.selected().size());
  effective.validate(set.size());

  // The seed set uses the same draw as random/farthest selection so that all
  // methods share their first views under one seed.
  std::vector<std::string> selected = set.selected();
  {
    Rng init_rng = make_rng(cfg.seed);
    const auto candidates = set.candidate_indices();
    for (std::size_t i : draw_indices(candidates.size(), effective.initial_k - selected.size(), init_rng)) {
      selected.push_back(set.views()[candidates[i]].id);
    }
  }
  Rng rng = make_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<Vec3> support;
  if (cfg.relaxation) {
    Rng support_rng = make_rng(cfg.relaxation->seed);
    support = sample_support(set, *cfg.relaxation, support_rng);
  }

  IgsResult result;
  ViewSet current = set.with_selection(selected);
  for (std::size_t round = 0; round < cfg.schedule.size(); ++round) {
    const std::size_t l = cfg.schedule[round];
    RoundRecord record;
    record.round = round + 1;
    record.candidates = current.candidates();

    record.scores = evaluator.evaluate({record.round, current.selected(), record.candidates});
    ++result.evaluator_calls;
    result.scored_views += record.candidates.size();
    record.scores.require_complete(record.candidates);
    record.ranking = ErrorRanking(record.scores, record.candidates);

    if (std::holds_alternative<GreedySampler>(cfg.sampler)) {
      record.drawn = greedy_draw(record.ranking, l);
    } else if (const auto* zipf = std::get_if<ZipfSampler>(&cfg.sampler)) {
      record.drawn = zipf_draw(record.ranking, zipf->gamma, l, rng);
    } else {
      const auto& mvmf = std::get<MvmfSampler>(cfg.sampler);
      std::vector<CameraView> pool;
      pool.reserve(record.candidates.size());
      for (const auto& id : record.candidates) pool.push_back(current.view(id));
      record.drawn = mvmf_draw(pool, record.scores, mvmf.kappa, mvmf.sigma, l, rng);
    }

    if (cfg.relaxation) {
      std::vector<Vec3> fixed;
      std::vector<Vec3> proposals;
      for (const auto& id : current.selected()) fixed.push_back(current.view(id).center);
      for (const auto& id : record.drawn) proposals.push_back(current.view(id).center);
      const LloydResult relaxed = lloyd_relax(fixed, proposals, support, *cfg.relaxation);
      const std::set<std::string, std::less<>> already(current.selected().begin(),
                                                      current.selected().end());
      record.relaxed = snap_to_candidates(relaxed.positions, current.views(), already);
    } else {
      record.relaxed = record.drawn;
    }

    current = current.with_appended(record.relaxed);
    result.rounds.push_back(std::move(record));
  }
  result.set = std::move(current);
  return result;
}

}  // namespace viewdir
