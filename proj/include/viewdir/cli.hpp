#pragma once

#include "viewdir/coverage.hpp"
#include "viewdir/error.hpp"
#include "viewdir/evaluator.hpp"
#include "viewdir/metrics.hpp"
#include "viewdir/relaxation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace viewdir {

enum class DatasetFormat { Transforms, ColmapText };

struct SplitOptions {
  std::string mode = "uniform-sphere";  // or "fvs-resplit"
  std::size_t count = 0;
  double radius = 4.0;
  Vec3 center = Vec3::Zero();
  int width = 800;
  int height = 800;
  double camera_angle_x = 0.6911112070083618;
  std::vector<double> rotate_z_deg;
};

struct CoverageOptionsConfig {
  std::string mesh;              // OBJ path; empty means icosphere
  int icosphere = 4;             // subdivisions when no mesh is given
  std::vector<std::string> views;  // transforms files, one per camera set
  std::size_t samples = 20000;
  std::uint64_t sample_seed = 0;
  std::optional<double> ball_radius;  // default: 2 x mean nearest-neighbour distance
  int stride = 4;
  CoverageNormalization normalization = CoverageNormalization::MaxCount;
};

/// Fully resolved run configuration. Everything except `out` and `jobs` is
/// echoed into manifests, so a manifest's "config" reproduces its run.
struct RunConfig {
  std::string dataset;
  DatasetFormat format = DatasetFormat::Transforms;
  std::string method = "fvs";  // rs, fvs, igs-greedy, igs-zipf, igs-vmf
  std::optional<std::size_t> budget;
  std::optional<std::vector<std::size_t>> schedule;
  std::optional<std::size_t> initial_k;
  SpatialMetric spatial = SpatialMetric::Euclidean;
  std::optional<double> alpha;  // required wherever FVS distances are used
  bool normalize_spatial = false;
  std::optional<double> gamma;
  std::optional<double> kappa;
  std::optional<double> sigma;
  bool relax = false;
  LloydDomain relax_domain = LloydDomain::Sphere;
  std::size_t lloyd_iters = 8;
  std::size_t support_samples = 20000;
  bool project_sphere = false;
  Vec3 origin = Vec3::Zero();
  std::vector<std::uint64_t> seeds = {0};

  std::string evaluator = "oracle";  // or "external"
  std::string evaluator_command;
  double evaluator_timeout_s = 600.0;
  OracleParams oracle;

  SplitOptions split;
  CoverageOptionsConfig coverage;
  std::vector<std::string> simulate_methods;  // e.g. "rs", "igs-greedy+relax"

  // Not echoed.
  bool wall_clock_timestamp = false;  // else SOURCE_DATE_EPOCH, else the epoch
  std::filesystem::path out = ".";
  unsigned jobs = 1;
};

/// Config documents carry "v": 1. Unknown keys throw InvalidConfig. A
/// selection manifest is accepted too; its "config" member is used.
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);  // compact, stable key order

/// Throws InvalidConfig when method-specific parameters are missing or out
/// of range for `command` ("select", "split", "coverage", "simulate").
void validate_config(const RunConfig& cfg, const std::string& command);

/// "5x5,10x12" (rounds x views) or "5,5,10".
std::vector<std::size_t> parse_schedule(const std::string& text);

// Commands. Each writes its outputs under cfg.out and throws viewdir::Error.
void cmd_select(const RunConfig& cfg);
void cmd_split(const RunConfig& cfg);
void cmd_coverage(const RunConfig& cfg);
void cmd_simulate(const RunConfig& cfg);

/// Process exit code for an error: 2 config, 3 data, 4 evaluator,
/// 5 internal.
int exit_code_for(ErrorCode code);

/// Entry point of the viewdir executable.
int run_cli(int argc, char** argv);

}  // namespace viewdir
