#pragma once

#include "viewdir/error.hpp"
#include "viewdir/evaluator.hpp"
#include "viewdir/random.hpp"
#include "viewdir/relaxation.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace viewdir {

struct GreedySampler {};
struct ZipfSampler {
  double gamma = 10.0;
};
struct MvmfSampler {
  double kappa = 10.0;
  double sigma = 1.0;
};
using SamplerConfig = std::variant<GreedySampler, ZipfSampler, MvmfSampler>;

struct IgsConfig {
  std::size_t initial_k = 5;
  std::vector<std::size_t> schedule;  // views added per round
  SamplerConfig sampler = GreedySampler{};
  std::optional<LloydConfig> relaxation;
  std::uint64_t seed = 0;

  void validate(std::size_t pool_size) const;
};

/// Initial 5 views, +5 per round up to 30, then +10 per round up to 150.
std::vector<std::size_t> incremental_schedule();

/// Candidates ordered worst quality first. Rank 0 is the lowest score; equal
/// scores are ordered by id.
class ErrorRanking {
 public:
  ErrorRanking() = default;
  ErrorRanking(const QualityReport& report, std::span<const std::string> candidates);

  const std::vector<std::string>& worst_first() const { return order_; }
  std::size_t rank(std::string_view id) const;
  std::size_t size() const { return order_.size(); }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::size_t, std::less<>> rank_;
};

/// Exponentially weighted rank law: f_r proportional to exp(-gamma r / (q-1)),
/// indexed by rank. Normalised in log space. q == 1 yields {1}.
Eigen::VectorXd zipf_pmf(const ErrorRanking& ranking, double gamma);

/// `count` distinct ids drawn sequentially without replacement from
/// zipf_pmf, renormalising over the remaining ids after each draw.
std::vector<std::string> zipf_draw(const ErrorRanking& ranking, double gamma, std::size_t count,
                                   Rng& rng);

/// The `count` worst-ranked ids.
std::vector<std::string> greedy_draw(const ErrorRanking& ranking, std::size_t count);

/// Softmax of the min-max normalised inverse score (max - m) / (max - min) at
/// temperature sigma. Uniform when all scores are equal.
Eigen::VectorXd mvmf_weights(std::span<const double> scores, double sigma);

/// Draws from vMF(mean, kappa) on the unit sphere. The cosine to the mean is
/// sampled by inverting its CDF, w = 1 + log(u + (1 - u) e^{-2 kappa}) / kappa,
/// written with log1p/expm1 so both kappa -> 0 and large kappa stay finite.
template <typename Derived, typename Generator>
Eigen::Matrix<typename Derived::Scalar, 3, 1> sample_vmf(const Eigen::MatrixBase<Derived>& mean,
                                                         typename Derived::Scalar kappa,
                                                         Generator& rng) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, 3, 1>;
  std::uniform_real_distribution<Scalar> uniform(Scalar(0), Scalar(1));
  const Scalar u = Scalar(1) - uniform(rng);  // (0, 1]
  Scalar w = Scalar(1) + std::log1p((Scalar(1) - u) * std::expm1(Scalar(-2) * kappa)) / kappa;
  w = std::clamp(w, Scalar(-1), Scalar(1));
  const Scalar phi = Scalar(2) * std::numbers::pi_v<Scalar> * uniform(rng);

  const Vec mu = mean.normalized();
  // Any unit vector orthogonal to mu, then complete the frame.
  const Vec helper = std::abs(mu.x()) < Scalar(0.9) ? Vec::UnitX() : Vec::UnitY();
  const Vec e1 = mu.cross(helper).normalized();
  const Vec e2 = mu.cross(e1);
  const Scalar s = std::sqrt(std::max(Scalar(0), Scalar(1) - w * w));
  return (w * mu + s * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

/// Mixture-of-vMF draw over candidate views on the unit sphere: pick a
/// component by mvmf_weights, sample a direction from it, snap to the
/// candidate with the largest dot product. Duplicate snaps are redrawn; after
/// 10 * count * q attempts the rest is filled greedily from the ranking.
///
/// Throws NotOnSphere for non-unit centers and DrawExceedsPool when
/// count > q.
std::vector<std::string> mvmf_draw(std::span<const CameraView> candidates,
                                   const QualityReport& report, double kappa, double sigma,
                                   std::size_t count, Rng& rng);

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::vector<std::string> candidates;
  QualityReport scores;
  ErrorRanking ranking;
  std::vector<std::string> drawn;    // sampler output
  std::vector<std::string> relaxed;  // ids actually added; equals drawn without relaxation
};

struct IgsResult {
  ViewSet set;
  std::vector<RoundRecord> rounds;
  std::size_t evaluator_calls = 0;   // evaluate() invocations
  std::size_t scored_views = 0;      // sum of |V \ S| over rounds
};

/// Information-gain sampling. Seeds S with `initial_k` random views (or the
/// views already selected in `set`), then for each schedule entry l_i asks
/// the evaluator to score V \ S, draws l_i views with the configured sampler,
/// optionally relaxes them with Lloyd iterations and snaps them back onto
/// unselected views, and appends them to S.
///
/// The vMF sampler and the sphere relaxation domain read centers as unit
/// vectors; project the pool first.
IgsResult igs_run(const ViewSet& set, const IgsConfig& cfg, Evaluator& evaluator);

}  // namespace viewdir
