#pragma once

#include "viewdir/scene.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace viewdir {

/// One scoring request: the current training set S and the views to score.
struct EvaluationRequest {
  std::size_t round = 0;
  std::span<const std::string> selected;
  std::span<const std::string> candidates;
};

/// The trainer/evaluator boundary of the information-gain loop. Implementations
/// may keep trained state between rounds; they must return one finite score
/// (higher = better) per candidate.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual QualityReport evaluate(const EvaluationRequest& request) = 0;
};

struct Hotspot {
  Vec3 center = Vec3::UnitZ();  // unit vector
  double difficulty = 1.0;
  double radius = 0.5;          // radians, in (0, pi)
};

/// Synthetic quality model on the unit sphere: views gain quality from nearby
/// training views and lose it near "difficult" hotspots, where the penalty
/// decays with the number of training views already inside the hotspot.
struct OracleParams {
  std::vector<Hotspot> hotspots;
  double base_quality = 20.0;
  double gain_per_view = 1.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Width (rad^2) of the coverage kernel exp(-d^2 / w).
inline constexpr double kOracleCoverageWidth = 0.25;

/// Scores each candidate against the selected views. All centers must be unit
/// vectors (NotOnSphere otherwise). The noise draw is keyed on the seed, the
/// candidate id and |selected|, so equal inputs give equal scores.
QualityReport oracle_scores(std::span<const CameraView> selected,
                            std::span<const CameraView> candidates, const OracleParams& params);

/// Mean oracle score over `probes` given the training views `selected`.
double oracle_mean_score(std::span<const CameraView> selected, std::span<const CameraView> probes,
                         const OracleParams& params);

/// Evaluator backed by oracle_scores. Pool centers are projected to the unit
/// sphere about `origin` before scoring.
class SyntheticOracle final : public Evaluator {
 public:
  SyntheticOracle(const ViewSet& pool, OracleParams params, const Vec3& origin = Vec3::Zero());

  QualityReport evaluate(const EvaluationRequest& request) override;
  const ViewSet& sphere_pool() const { return pool_; }

 private:
  ViewSet pool_;
  OracleParams params_;
};

struct ExternalBinding {
  std::string command;         // run through /bin/sh -c
  double timeout_s = 600.0;
  std::string dataset_path;
};

/// Spawns `binding.command`, writes one request line
/// {"v":1,"round","selected","candidates","dataset_path"} to its stdin and
/// reads one response line {"v":1,"scores":{id:number}} from its stdout.
///
/// Throws SpawnFailure, Timeout, MalformedResponse (bad JSON, wrong "v",
/// non-numeric or non-finite score) or IncompleteScores naming the first
/// missing id.
QualityReport external_evaluate(const ExternalBinding& binding, std::size_t round,
                                std::span<const std::string> selected,
                                std::span<const std::string> candidates);

class ExternalProcessEvaluator final : public Evaluator {
 public:
  explicit ExternalProcessEvaluator(ExternalBinding binding);

  QualityReport evaluate(const EvaluationRequest& request) override;

 private:
  ExternalBinding binding_;
};

}  // namespace viewdir
