#include "viewdir/cli.hpp"

#include "viewdir/fvs.hpp"
#include "viewdir/igs.hpp"
#include "viewdir/io.hpp"
#include "viewdir/splitgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

namespace viewdir {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

template <typename Enum, std::size_t N>
Enum enum_from(const std::string& text, const std::pair<const char*, Enum> (&table)[N], const char* key) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  std::string options;
  for (const auto& [name, value] : table) options += std::string(options.empty() ? "" : ", ") + name;
  config_error(std::string(key) + " must be one of {" + options + "}, got '" + text + "'");
}

template <typename Enum, std::size_t N>
const char* enum_name(Enum value, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<const char*, DatasetFormat> kFormats[] = {
    {"transforms", DatasetFormat::Transforms}, {"colmap-text", DatasetFormat::ColmapText}};
constexpr std::pair<const char*, SpatialMetric> kSpatial[] = {
    {"euclidean", SpatialMetric::Euclidean}, {"great-circle", SpatialMetric::GreatCircle}};
constexpr std::pair<const char*, LloydDomain> kDomains[] = {
    {"sphere", LloydDomain::Sphere}, {"hull", LloydDomain::ConvexHull}};
constexpr std::pair<const char*, CoverageNormalization> kNormalizations[] = {
    {"max-count", CoverageNormalization::MaxCount},
    {"total-hits", CoverageNormalization::TotalHits},
    {"ray-budget", CoverageNormalization::RayBudget}};

const std::vector<std::string> kMethods = {"rs", "fvs", "igs-greedy", "igs-zipf", "igs-vmf"};

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const ordered_json& j, const char* key) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != 3) config_error(std::string(key) + " must have three components");
  return {values[0], values[1], values[2]};
}

void check_keys(const ordered_json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

// ---- config ------------------------------------------------------------------

std::string config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["v"] = 1;
  j["dataset"] = cfg.dataset;
  j["format"] = enum_name(cfg.format, kFormats);
  j["method"] = cfg.method;
  if (cfg.budget) j["budget"] = *cfg.budget;
  if (cfg.schedule) j["schedule"] = *cfg.schedule;
  if (cfg.initial_k) j["initial_k"] = *cfg.initial_k;
  j["spatial"] = enum_name(cfg.spatial, kSpatial);
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  j["normalize_spatial"] = cfg.normalize_spatial;
  if (cfg.gamma) j["gamma"] = *cfg.gamma;
  if (cfg.kappa) j["kappa"] = *cfg.kappa;
  if (cfg.sigma) j["sigma"] = *cfg.sigma;
  j["relax"] = cfg.relax;
  j["relax_domain"] = enum_name(cfg.relax_domain, kDomains);
  j["lloyd_iters"] = cfg.lloyd_iters;
  j["support_samples"] = cfg.support_samples;
  j["project_sphere"] = cfg.project_sphere;
  j["origin"] = vec_json(cfg.origin);
  j["seeds"] = cfg.seeds;

  ordered_json ev;
  ev["kind"] = cfg.evaluator;
  ev["command"] = cfg.evaluator_command;
  ev["timeout_s"] = cfg.evaluator_timeout_s;
  j["evaluator"] = std::move(ev);

  ordered_json oracle;
  ordered_json hotspots = ordered_json::array();
  for (const auto& h : cfg.oracle.hotspots) {
    ordered_json o;
    o["center"] = vec_json(h.center);
    o["difficulty"] = h.difficulty;
    o["radius"] = h.radius;
    hotspots.push_back(std::move(o));
  }
  oracle["hotspots"] = std::move(hotspots);
  oracle["base_quality"] = cfg.oracle.base_quality;
  oracle["gain_per_view"] = cfg.oracle.gain_per_view;
  oracle["noise_sd"] = cfg.oracle.noise_sd;
  oracle["seed"] = cfg.oracle.seed;
  j["oracle"] = std::move(oracle);

  ordered_json split;
  split["mode"] = cfg.split.mode;
  split["count"] = cfg.split.count;
  split["radius"] = cfg.split.radius;
  split["center"] = vec_json(cfg.split.center);
  split["width"] = cfg.split.width;
  split["height"] = cfg.split.height;
  split["camera_angle_x"] = cfg.split.camera_angle_x;
  split["rotate_z_deg"] = cfg.split.rotate_z_deg;
  j["split"] = std::move(split);

  ordered_json cov;
  cov["mesh"] = cfg.coverage.mesh;
  cov["icosphere"] = cfg.coverage.icosphere;
  cov["views"] = cfg.coverage.views;
  cov["samples"] = cfg.coverage.samples;
  cov["sample_seed"] = cfg.coverage.sample_seed;
  if (cfg.coverage.ball_radius) cov["ball_radius"] = *cfg.coverage.ball_radius;
  cov["stride"] = cfg.coverage.stride;
  cov["normalization"] = enum_name(cfg.coverage.normalization, kNormalizations);
  j["coverage"] = std::move(cov);

  j["simulate"] = {{"methods", cfg.simulate_methods}};
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("order") && doc.contains("config")) doc = doc["config"];
  if (!doc.is_object()) config_error("config must be a JSON object");
  if (!doc.contains("v") || doc["v"] != 1) {
    throw Error(ErrorCode::SchemaVersionMismatch, "config must carry \"v\": 1");
  }
  check_keys(doc,
             {"v", "dataset", "format", "method", "budget", "schedule", "initial_k", "spatial", "alpha",
              "normalize_spatial", "gamma", "kappa", "sigma", "relax", "relax_domain", "lloyd_iters",
              "support_samples", "project_sphere", "origin", "seeds", "repetitions", "evaluator",
              "oracle", "split", "coverage", "simulate"},
             "config");

  RunConfig cfg;
  try {
    if (doc.contains("dataset")) cfg.dataset = doc["dataset"].get<std::string>();
    if (doc.contains("format")) cfg.format = enum_from(doc["format"].get<std::string>(), kFormats, "format");
    if (doc.contains("method")) cfg.method = doc["method"].get<std::string>();
    if (doc.contains("budget")) cfg.budget = doc["budget"].get<std::size_t>();
    if (doc.contains("schedule")) cfg.schedule = doc["schedule"].get<std::vector<std::size_t>>();
    if (doc.contains("initial_k")) cfg.initial_k = doc["initial_k"].get<std::size_t>();
    if (doc.contains("spatial")) cfg.spatial = enum_from(doc["spatial"].get<std::string>(), kSpatial, "spatial");
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("normalize_spatial")) cfg.normalize_spatial = doc["normalize_spatial"].get<bool>();
    if (doc.contains("gamma")) cfg.gamma = doc["gamma"].get<double>();
    if (doc.contains("kappa")) cfg.kappa = doc["kappa"].get<double>();
    if (doc.contains("sigma")) cfg.sigma = doc["sigma"].get<double>();
    if (doc.contains("relax")) cfg.relax = doc["relax"].get<bool>();
    if (doc.contains("relax_domain")) {
      cfg.relax_domain = enum_from(doc["relax_domain"].get<std::string>(), kDomains, "relax_domain");
    }
    if (doc.contains("lloyd_iters")) cfg.lloyd_iters = doc["lloyd_iters"].get<std::size_t>();
    if (doc.contains("support_samples")) cfg.support_samples = doc["support_samples"].get<std::size_t>();
    if (doc.contains("project_sphere")) cfg.project_sphere = doc["project_sphere"].get<bool>();
    if (doc.contains("origin")) cfg.origin = vec_from(doc["origin"], "origin");
    if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    if (doc.contains("repetitions")) {
      const auto reps = doc["repetitions"].get<std::size_t>();
      if (!doc.contains("seeds")) {
        cfg.seeds.clear();
        for (std::size_t r = 0; r < reps; ++r) cfg.seeds.push_back(r);
      } else if (reps != cfg.seeds.size()) {
        config_error("repetitions (" + std::to_string(reps) + ") must equal the number of seeds (" +
                     std::to_string(cfg.seeds.size()) + ")");
      }
    }
    if (doc.contains("evaluator")) {
      const auto& ev = doc["evaluator"];
      check_keys(ev, {"kind", "command", "timeout_s"}, "evaluator");
      if (ev.contains("kind")) cfg.evaluator = ev["kind"].get<std::string>();
      if (ev.contains("command")) cfg.evaluator_command = ev["command"].get<std::string>();
      if (ev.contains("timeout_s")) cfg.evaluator_timeout_s = ev["timeout_s"].get<double>();
    }
    if (doc.contains("oracle")) {
      const auto& o = doc["oracle"];
      check_keys(o, {"hotspots", "base_quality", "gain_per_view", "noise_sd", "seed"}, "oracle");
      if (o.contains("hotspots")) {
        for (const auto& h : o["hotspots"]) {
          check_keys(h, {"center", "difficulty", "radius"}, "oracle hotspot");
          Hotspot spot;
          if (h.contains("center")) spot.center = vec_from(h["center"], "hotspot center");
          if (h.contains("difficulty")) spot.difficulty = h["difficulty"].get<double>();
          if (h.contains("radius")) spot.radius = h["radius"].get<double>();
          cfg.oracle.hotspots.push_back(spot);
        }
      }
      if (o.contains("base_quality")) cfg.oracle.base_quality = o["base_quality"].get<double>();
      if (o.contains("gain_per_view")) cfg.oracle.gain_per_view = o["gain_per_view"].get<double>();
      if (o.contains("noise_sd")) cfg.oracle.noise_sd = o["noise_sd"].get<double>();
      if (o.contains("seed")) cfg.oracle.seed = o["seed"].get<std::uint64_t>();
    }
    if (doc.contains("split")) {
      const auto& s = doc["split"];
      check_keys(s, {"mode", "count", "radius", "center", "width", "height", "camera_angle_x", "rotate_z_deg"},
                 "split");
      if (s.contains("mode")) cfg.split.mode = s["mode"].get<std::string>();
      if (s.contains("count")) cfg.split.count = s["count"].get<std::size_t>();
      if (s.contains("radius")) cfg.split.radius = s["radius"].get<double>();
      if (s.contains("center")) cfg.split.center = vec_from(s["center"], "split center");
      if (s.contains("width")) cfg.split.width = s["width"].get<int>();
      if (s.contains("height")) cfg.split.height = s["height"].get<int>();
      if (s.contains("camera_angle_x")) cfg.split.camera_angle_x = s["camera_angle_x"].get<double>();
      if (s.contains("rotate_z_deg")) cfg.split.rotate_z_deg = s["rotate_z_deg"].get<std::vector<double>>();
    }
    if (doc.contains("coverage")) {
      const auto& c = doc["coverage"];
      check_keys(c, {"mesh", "icosphere", "views", "samples", "sample_seed", "ball_radius", "stride",
                     "normalization"},
                 "coverage");
      if (c.contains("mesh")) cfg.coverage.mesh = c["mesh"].get<std::string>();
      if (c.contains("icosphere")) cfg.coverage.icosphere = c["icosphere"].get<int>();
      if (c.contains("views")) cfg.coverage.views = c["views"].get<std::vector<std::string>>();
      if (c.contains("samples")) cfg.coverage.samples = c["samples"].get<std::size_t>();
      if (c.contains("sample_seed")) cfg.coverage.sample_seed = c["sample_seed"].get<std::uint64_t>();
      if (c.contains("ball_radius")) cfg.coverage.ball_radius = c["ball_radius"].get<double>();
      if (c.contains("stride")) cfg.coverage.stride = c["stride"].get<int>();
      if (c.contains("normalization")) {
        cfg.coverage.normalization =
            enum_from(c["normalization"].get<std::string>(), kNormalizations, "normalization");
      }
    }
    if (doc.contains("simulate")) {
      check_keys(doc["simulate"], {"methods"}, "simulate");
      if (doc["simulate"].contains("methods")) {
        cfg.simulate_methods = doc["simulate"]["methods"].get<std::vector<std::string>>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config has a value of the wrong type: ") + e.what());
  }
  return cfg;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> schedule;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      const auto x = item.find('x');
      std::size_t pos = 0;
      if (x == std::string::npos) {
        const unsigned long l = std::stoul(item, &pos);
        if (pos != item.size()) throw std::invalid_argument(item);
        schedule.push_back(l);
      } else {
        const std::string rounds_text = item.substr(0, x);
        const std::string size_text = item.substr(x + 1);
        const unsigned long rounds = std::stoul(rounds_text, &pos);
        if (pos != rounds_text.size()) throw std::invalid_argument(item);
        const unsigned long l = std::stoul(size_text, &pos);
        if (pos != size_text.size()) throw std::invalid_argument(item);
        schedule.insert(schedule.end(), rounds, l);
      }
    } catch (const std::logic_error&) {
      config_error("schedule entries must look like 5 or 5x10 (rounds x views), got '" + item + "'");
    }
  }
  if (schedule.empty()) config_error("schedule is empty");
  return schedule;
}

namespace {

struct MethodSpec {
  std::string name;  // rs, fvs, igs-*
  bool relax = false;
  std::string label;
};

MethodSpec parse_method(const std::string& token, bool default_relax) {
  MethodSpec m;
  m.label = token;
  m.name = token;
  m.relax = default_relax;
  if (const auto plus = token.find('+'); plus != std::string::npos) {
    if (token.substr(plus + 1) != "relax") config_error("unknown method suffix in '" + token + "'");
    m.name = token.substr(0, plus);
    m.relax = true;
  }
  if (std::find(kMethods.begin(), kMethods.end(), m.name) == kMethods.end()) {
    config_error("method must be one of {rs, fvs, igs-greedy, igs-zipf, igs-vmf}, got '" + token + "'");
  }
  if (m.relax && m.name.rfind("igs-", 0) != 0) config_error("relaxation applies to igs methods only");
  return m;
}

bool is_igs(const std::string& method) { return method.rfind("igs-", 0) == 0; }

void validate_method(const RunConfig& cfg, const MethodSpec& m) {
  if (m.name == "igs-zipf" && !cfg.gamma) config_error("method igs-zipf needs --gamma");
  if (m.name == "igs-vmf" && (!cfg.kappa || !cfg.sigma)) {
    config_error("method igs-vmf needs --kappa and --sigma");
  }
  if (cfg.gamma && !(*cfg.gamma > 0.0)) config_error("gamma must be > 0");
  if (cfg.kappa && !(*cfg.kappa > 0.0)) config_error("kappa must be > 0");
  if (cfg.sigma && !(*cfg.sigma > 0.0)) config_error("sigma must be > 0");
}

// No value is assumed for the co-visibility weight; 0 gives pure spatial FVS.
void require_alpha(const RunConfig& cfg) {
  if (!cfg.alpha) config_error("FVS needs --alpha (use 0 for purely spatial distances)");
}

}  // namespace

void validate_config(const RunConfig& cfg, const std::string& command) {
  if (cfg.seeds.empty()) config_error("at least one seed is required");
  if (cfg.jobs == 0) config_error("jobs must be >= 1");
  if (cfg.alpha && (!(*cfg.alpha >= 0.0) || !std::isfinite(*cfg.alpha))) {
    config_error("alpha must be finite and >= 0");
  }
  if (cfg.alpha.value_or(0.0) > 0.0 && cfg.format != DatasetFormat::ColmapText) {
    config_error("alpha > 0 needs co-visibility counts, i.e. --format colmap-text");
  }
  if (cfg.evaluator != "oracle" && cfg.evaluator != "external") {
    config_error("evaluator must be 'oracle' or 'external'");
  }
  if (cfg.evaluator == "external" && cfg.evaluator_command.empty()) {
    config_error("external evaluator needs --evaluator-command");
  }
  if (!(cfg.evaluator_timeout_s > 0.0)) config_error("evaluator timeout must be > 0");
  try {
    cfg.oracle.validate();
  } catch (const Error& e) {
    config_error(std::string("oracle: ") + e.what());
  }
  if (cfg.schedule) {
    for (std::size_t l : *cfg.schedule) {
      if (l == 0) config_error("schedule entries must be positive");
    }
  }

  if (command == "select") {
    if (cfg.dataset.empty()) config_error("select needs --dataset");
    const MethodSpec m = parse_method(cfg.method, cfg.relax);
    validate_method(cfg, m);
    if (!is_igs(m.name) && !cfg.budget) config_error("method " + m.name + " needs --budget");
    if (m.name == "fvs") require_alpha(cfg);
    if (cfg.budget && *cfg.budget == 0) config_error("budget must be >= 1");
  } else if (command == "split") {
    if (cfg.split.mode != "uniform-sphere" && cfg.split.mode != "fvs-resplit") {
      config_error("split mode must be 'uniform-sphere' or 'fvs-resplit'");
    }
    if (cfg.split.count == 0) config_error("split needs --count >= 1");
    if (cfg.split.mode == "fvs-resplit" && cfg.dataset.empty()) config_error("fvs-resplit needs --dataset");
    if (cfg.split.mode == "fvs-resplit") require_alpha(cfg);
    if (!(cfg.split.radius > 0.0)) config_error("split radius must be > 0");
    if (cfg.split.width < 1 || cfg.split.height < 1) config_error("image size must be positive");
    if (!(cfg.split.camera_angle_x > 0.0 && cfg.split.camera_angle_x < std::numbers::pi)) {
      config_error("camera_angle_x must lie in (0, pi)");
    }
  } else if (command == "coverage") {
    if (cfg.coverage.views.empty() && cfg.dataset.empty()) config_error("coverage needs --views or --dataset");
    if (cfg.coverage.stride < 1) config_error("stride must be >= 1");
    if (cfg.coverage.samples < 2) config_error("coverage needs at least two surface samples");
    if (cfg.coverage.ball_radius && !(*cfg.coverage.ball_radius > 0.0)) config_error("ball radius must be > 0");
    if (cfg.coverage.mesh.empty() && (cfg.coverage.icosphere < 0 || cfg.coverage.icosphere > 7)) {
      config_error("icosphere subdivisions must lie in [0, 7]");
    }
  } else if (command == "simulate") {
    if (cfg.dataset.empty()) config_error("simulate needs --dataset");
    if (cfg.evaluator != "oracle") config_error("simulate scores with the synthetic oracle only");
    const auto methods = cfg.simulate_methods.empty() ? std::vector<std::string>{cfg.method} : cfg.simulate_methods;
    for (const auto& token : methods) {
      const MethodSpec m = parse_method(token, cfg.relax);
      validate_method(cfg, m);
      if (m.name == "fvs") require_alpha(cfg);
    }
  } else {
    config_error("unknown command '" + command + "'");
  }
}

// ---- shared plumbing -----------------------------------------------------------

namespace {

struct Pool {
  ViewSet views;
  std::shared_ptr<const CovisibilityMatrix> covisibility;
};

Pool load_pool(const RunConfig& cfg) {
  Pool pool;
  if (cfg.format == DatasetFormat::Transforms) {
    pool.views = read_transforms(cfg.dataset);
  } else {
    ColmapModel model = read_colmap_text(cfg.dataset);
    pool.views = std::move(model.views);
    pool.covisibility = std::make_shared<const CovisibilityMatrix>(std::move(model.covisibility));
  }
  // Pool-level invariants (two views, valid cameras).
  pool.views = build_view_set(pool.views.views());
  spdlog::info("loaded {} views from {}", pool.views.size(), cfg.dataset);
  return pool;
}

DistanceSpec distance_spec(const RunConfig& cfg, const Pool& pool) {
  DistanceSpec spec;
  spec.spatial = cfg.spatial;
  spec.photo_weight = cfg.alpha.value_or(0.0);
  spec.normalize_spatial = cfg.normalize_spatial;
  if (spec.photo_weight > 0.0) spec.covisibility = pool.covisibility;
  return spec;
}

bool needs_sphere(const MethodSpec& m, const RunConfig& cfg) {
  return m.name == "igs-vmf" || (m.relax && cfg.relax_domain == LloydDomain::Sphere);
}

/// Unit-sphere version of the pool for samplers that read centers as
/// directions. Without --project-sphere the rig must already be spherical.
ViewSet sphere_pool(const ViewSet& pool, const RunConfig& cfg, const MethodSpec& m) {
  if (!cfg.project_sphere && !on_common_sphere(pool, cfg.origin, 1e-6)) {
    config_error("method " + m.label +
                 " needs camera centers on a common sphere about the origin; pass --project-sphere "
                 "to project them");
  }
  return project_to_unit_sphere(pool, cfg.origin);
}

std::string timestamp(const RunConfig& cfg) {
  std::time_t t = 0;
  if (cfg.wall_clock_timestamp) {
    t = std::time(nullptr);
  } else if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Runs f(r) for r in [0, n) on up to `jobs` threads. The first failure in
/// repetition order is rethrown after all workers finish.
template <typename F>
void for_each_repetition(std::size_t n, unsigned jobs, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < n;) {
      try {
        f(r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, jobs), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::unique_ptr<Evaluator> make_evaluator(const RunConfig& cfg, const ViewSet& pool) {
  if (cfg.evaluator == "external") {
    return std::make_unique<ExternalProcessEvaluator>(
        ExternalBinding{cfg.evaluator_command, cfg.evaluator_timeout_s, cfg.dataset});
  }
  return std::make_unique<SyntheticOracle>(pool, cfg.oracle, cfg.origin);
}

IgsConfig igs_config(const RunConfig& cfg, const MethodSpec& m, std::uint64_t seed) {
  IgsConfig igs;
  igs.initial_k = cfg.initial_k.value_or(5);
  igs.schedule = cfg.schedule.value_or(incremental_schedule());
  if (m.name == "igs-zipf") {
    igs.sampler = ZipfSampler{*cfg.gamma};
  } else if (m.name == "igs-vmf") {
    igs.sampler = MvmfSampler{*cfg.kappa, *cfg.sigma};
  } else {
    igs.sampler = GreedySampler{};
  }
  if (m.relax) {
    LloydConfig lloyd;
    lloyd.domain = cfg.relax_domain;
    lloyd.n_iter = cfg.lloyd_iters;
    lloyd.support_samples = cfg.support_samples;
    lloyd.seed = seed;
    igs.relaxation = lloyd;
  }
  igs.seed = seed;
  return igs;
}

std::string rep_name(const std::string& label, std::size_t r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", r);
  return label + "_rep" + buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

// ---- select ----------------------------------------------------------------

void cmd_select(const RunConfig& cfg) {
  validate_config(cfg, "select");
  const MethodSpec method = parse_method(cfg.method, cfg.relax);
  const Pool pool = load_pool(cfg);
  const DistanceSpec spec = distance_spec(cfg, pool);
  const std::string echo = config_to_json(cfg);
  const std::string created_at = timestamp(cfg);
  const ViewSet igs_pool =
      is_igs(method.name) && needs_sphere(method, cfg) ? sphere_pool(pool.views, cfg, method) : pool.views;

  for_each_repetition(cfg.seeds.size(), cfg.jobs, [&](std::size_t r) {
    const std::uint64_t seed = cfg.seeds[r];
    SelectionManifest manifest;
    manifest.method = method.label;
    manifest.config_echo = echo;
    manifest.seed = seed;
    manifest.created_at = created_at;

    if (method.name == "rs" || method.name == "fvs") {
      ViewSet picked;
      if (method.name == "rs") {
        picked = random_select(pool.views, *cfg.budget, seed);
      } else {
        FvsConfig fvs;
        fvs.target_n = *cfg.budget;
        fvs.initial_k = cfg.initial_k.value_or(5);
        fvs.seed = seed;
        fvs.spec = spec;
        picked = fvs_select(pool.views, fvs);
      }
      for (std::size_t i = 0; i < picked.selected().size(); ++i) {
        manifest.order.push_back({i + 1, picked.selected()[i], std::nullopt});
      }
    } else {
      auto evaluator = make_evaluator(cfg, pool.views);
      const IgsResult result = igs_run(igs_pool, igs_config(cfg, method, seed), *evaluator);
      const auto& selected = result.set.selected();
      const std::size_t seeded = selected.size() - [&] {
        std::size_t added = 0;
        for (const auto& round : result.rounds) added += round.relaxed.size();
        return added;
      }();
      std::size_t step = 0;
      for (std::size_t i = 0; i < seeded; ++i) manifest.order.push_back({++step, selected[i], std::nullopt});
      for (const auto& round : result.rounds) {
        for (const auto& id : round.relaxed) manifest.order.push_back({++step, id, round.scores.at(id)});
      }
      write_run_log(result, cfg.out / (rep_name(method.label, r) + ".log.jsonl"));
      spdlog::info("rep {}: {} evaluator calls, {} views scored", r, result.evaluator_calls,
                   result.scored_views);
    }
    write_manifest(manifest, cfg.out / (rep_name(method.label, r) + ".manifest.json"));
  });
}

// ---- split -----------------------------------------------------------------

void cmd_split(const RunConfig& cfg) {
  validate_config(cfg, "split");
  std::vector<CameraView> test_views;
  std::vector<std::string> train;
  if (cfg.split.mode == "uniform-sphere") {
    Intrinsics k;
    k.width = cfg.split.width;
    k.height = cfg.split.height;
    k.fx = k.fy = k.width / (2.0 * std::tan(cfg.split.camera_angle_x / 2.0));
    k.cx = k.width / 2.0;
    k.cy = k.height / 2.0;
    test_views = uniform_sphere_poses(cfg.split.count, cfg.split.radius, cfg.split.center, k);
  } else {
    const Pool pool = load_pool(cfg);
    const Split split = fvs_resplit(pool.views, cfg.split.count, distance_spec(cfg, pool), cfg.seeds.front());
    for (const auto& id : split.test) test_views.push_back(pool.views.view(id));
    train = split.train;
  }

  std::vector<std::string> test_ids;
  for (const auto& v : test_views) test_ids.push_back(v.id);
  ordered_json split_doc;
  split_doc["v"] = 1;
  split_doc["mode"] = cfg.split.mode;
  split_doc["test"] = test_ids;
  split_doc["train"] = train;
  write_file(cfg.out / "split.json", split_doc.dump(2) + "\n");
  write_transforms(ViewSet(test_views), cfg.out / "test_views.json");

  SelectionManifest manifest;
  manifest.method = cfg.split.mode;
  manifest.config_echo = config_to_json(cfg);
  manifest.seed = cfg.seeds.front();
  manifest.created_at = timestamp(cfg);
  for (std::size_t i = 0; i < test_ids.size(); ++i) manifest.order.push_back({i + 1, test_ids[i], std::nullopt});
  write_manifest(manifest, cfg.out / "split.manifest.json");

  for (double deg : cfg.split.rotate_z_deg) {
    const auto rotated = rotate_about_z(test_views, deg * std::numbers::pi / 180.0, cfg.split.center);
    char name[64];
    std::snprintf(name, sizeof name, "test_views_rotz%g.json", deg);
    write_transforms(ViewSet(rotated), cfg.out / name);
  }
  spdlog::info("split: {} test, {} train", test_ids.size(), train.size());
}

// ---- coverage --------------------------------------------------------------

void cmd_coverage(const RunConfig& cfg) {
  validate_config(cfg, "coverage");
  const TriangleMesh mesh =
      cfg.coverage.mesh.empty() ? make_icosphere(cfg.coverage.icosphere) : read_obj(cfg.coverage.mesh);
  SurfaceSamples samples = sample_surface(mesh, cfg.coverage.samples, 1.0, cfg.coverage.sample_seed);
  samples.radius = cfg.coverage.ball_radius ? *cfg.coverage.ball_radius : default_ball_radius(samples.points);
  spdlog::info("coverage: {} samples, ball radius {:.6g}", samples.size(), samples.radius);

  const std::vector<std::string> files =
      cfg.coverage.views.empty() ? std::vector<std::string>{cfg.dataset} : cfg.coverage.views;
  CoverageOptions options;
  options.stride = cfg.coverage.stride;
  options.normalization = cfg.coverage.normalization;
  options.jobs = cfg.jobs;

  std::string csv = "set,mean,variance,max\n";
  std::vector<CoverageField> fields;
  std::vector<std::string> names;
  for (const auto& file : files) {
    const ViewSet views = read_transforms(file);
    std::string name = std::filesystem::path(file).stem().string();
    for (const auto& existing : names) {
      if (existing == name) name += "_" + std::to_string(names.size());
    }
    CoverageField field = coverage_measure(mesh, samples, views.views(), options);
    const Eigen::VectorXd normalized = field.normalized();
    write_coverage_points(field, cfg.out / ("coverage_" + name + ".bin"));
    write_coverage_ply(mesh, field, cfg.out / ("coverage_" + name + ".ply"));
    csv += name + "," + format_double(normalized.mean()) + "," + format_double(coverage_variance(field)) +
           "," + format_double(normalized.maxCoeff()) + "\n";
    fields.push_back(std::move(field));
    names.push_back(name);
  }
  if (fields.size() >= 2) {
    const CoverageDifference diff = coverage_difference(fields[0], fields[1]);
    CoverageField out = fields[0];
    out.values = diff.values;
    out.normalization = 1.0;
    const std::string name = "diff_" + names[0] + "_" + names[1];
    write_coverage_points(out, cfg.out / (name + ".bin"));
    csv += name + "," + format_double(diff.mean) + "," + format_double(diff.std * diff.std) + "," +
           format_double(diff.max) + "\n";
    spdlog::info("{}: mean {:.3g} sigma, max {:.3g} sigma", name, diff.mean_in_sigma, diff.max_in_sigma);
  }
  write_file(cfg.out / "coverage_summary.csv", csv);
}

// ---- simulate ----------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg) {
  validate_config(cfg, "simulate");
  const Pool pool = load_pool(cfg);
  const DistanceSpec spec = distance_spec(cfg, pool);
  const ViewSet unit = project_to_unit_sphere(pool.views, cfg.origin);
  std::vector<MethodSpec> methods;
  for (const auto& token : cfg.simulate_methods.empty() ? std::vector<std::string>{cfg.method}
                                                        : cfg.simulate_methods) {
    methods.push_back(parse_method(token, cfg.relax));
  }
  const std::size_t k = cfg.initial_k.value_or(5);
  const std::vector<std::size_t> schedule = cfg.schedule.value_or(incremental_schedule());
  std::vector<std::size_t> checkpoints;
  std::size_t n = k;
  for (std::size_t l : schedule) checkpoints.push_back(n += l);

  // Mean oracle score over the views not in S.
  auto score = [&](std::span<const std::string> selected_ids) {
    const ViewSet s = unit.with_selection({selected_ids.begin(), selected_ids.end()});
    std::vector<CameraView> selected, rest;
    for (std::size_t i : s.selected_indices()) selected.push_back(unit.views()[i]);
    for (std::size_t i : s.candidate_indices()) rest.push_back(unit.views()[i]);
    return oracle_mean_score(selected, rest, cfg.oracle);
  };

  const std::size_t reps = cfg.seeds.size();
  std::vector<std::string> rows(reps * methods.size());
  for_each_repetition(reps, cfg.jobs, [&](std::size_t r) {
    const std::uint64_t seed = cfg.seeds[r];
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const MethodSpec& m = methods[mi];
      std::vector<std::pair<std::size_t, double>> curve;
      if (m.name == "rs" || m.name == "fvs") {
        ViewSet picked;
        if (m.name == "rs") {
          picked = random_select(pool.views, checkpoints.back(), seed);
        } else {
          FvsConfig fvs;
          fvs.target_n = checkpoints.back();
          fvs.initial_k = std::min(cfg.initial_k.value_or(5), checkpoints.back());
          fvs.seed = seed;
          fvs.spec = spec;
          picked = fvs_select(pool.views, fvs);
        }
        for (std::size_t c : checkpoints) {
          curve.emplace_back(c, score(std::span(picked.selected()).first(c)));
        }
      } else {
        SyntheticOracle oracle(pool.views, cfg.oracle, cfg.origin);
        const ViewSet igs_pool = needs_sphere(m, cfg) ? unit : pool.views;
        IgsConfig igs = igs_config(cfg, m, seed);
        igs.initial_k = k;
        igs.schedule = schedule;
        const IgsResult result = igs_run(igs_pool, igs, oracle);
        std::size_t count = result.set.selected().size();
        for (const auto& round : result.rounds) count -= round.relaxed.size();
        for (const auto& round : result.rounds) {
          count += round.relaxed.size();
          curve.emplace_back(count, score(std::span(result.set.selected()).first(count)));
        }
      }
      std::string text;
      for (const auto& [nv, s] : curve) {
        text += m.label + "," + std::to_string(r) + "," + std::to_string(nv) + "," + format_double(s) + "\n";
      }
      rows[mi * reps + r] = std::move(text);
    }
  });
  std::string csv = "method,repetition,n_views,mean_candidate_score\n";
  for (const auto& row : rows) csv += row;
  write_file(cfg.out / "simulate.csv", csv);
}

// ---- entry point -----------------------------------------------------------------

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidConfig:
    case ErrorCode::BudgetExceedsPool:
    case ErrorCode::ScheduleExhaustsPool:
    case ErrorCode::DrawExceedsPool:
    case ErrorCode::TooFewSelected:
    case ErrorCode::NotUnit:
    case ErrorCode::NotOnSphere:
      return 2;
    case ErrorCode::EvaluatorFailure:
    case ErrorCode::SpawnFailure:
    case ErrorCode::Timeout:
    case ErrorCode::MalformedResponse:
    case ErrorCode::IncompleteScores:
      return 4;
    case ErrorCode::DuplicateId:
    case ErrorCode::TooFewViews:
    case ErrorCode::DegenerateCenter:
    case ErrorCode::UnknownView:
    case ErrorCode::InvalidCamera:
    case ErrorCode::InvalidMesh:
    case ErrorCode::EmptyCovisibility:
    case ErrorCode::DegenerateHull:
    case ErrorCode::PoolExhausted:
    case ErrorCode::EmptyMesh:
    case ErrorCode::MissingIntrinsics:
    case ErrorCode::SampleMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::NonOrthonormalRotation:
    case ErrorCode::MissingFile:
    case ErrorCode::IoError:
    case ErrorCode::SchemaVersionMismatch:
      return 3;
  }
  return 5;
}

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("viewdir");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("VIEWDIR_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &pos));
      } else {
        out.push_back(static_cast<T>(std::stoull(item, &pos)));
      }
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      config_error(std::string(flag) + ": bad list entry '" + item + "'");
    }
  }
  return out;
}

Vec3 parse_vec3(const std::string& text, const char* flag) {
  const auto v = parse_list<double>(text, flag);
  if (v.size() != 3) config_error(std::string(flag) + " needs x,y,z");
  return {v[0], v[1], v[2]};
}

bool parse_on_off(const std::string& text, const char* flag) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  config_error(std::string(flag) + " must be on or off");
}

/// Flag values as given; applied over the config file in apply().
struct Flags {
  std::map<std::string, std::string> values;
  std::vector<std::string> hotspots;
  std::vector<std::string> views;
  bool project_sphere = false;
  bool normalize_spatial = false;
  bool timestamp = false;
};

void apply(const Flags& flags, RunConfig& cfg) {
  auto get = [&](const char* key) -> const std::string* {
    auto it = flags.values.find(key);
    return it == flags.values.end() ? nullptr : &it->second;
  };
  auto num = [&](const char* key) { return std::stod(*get(key)); };
  auto whole = [&](const char* key) -> std::size_t {
    const std::string& s = *get(key);
    if (s.empty() || s[0] == '-') config_error(std::string("--") + key + " must be a non-negative integer");
    return std::stoull(s);
  };
  try {
    if (get("dataset")) cfg.dataset = *get("dataset");
    if (get("format")) cfg.format = enum_from(*get("format"), kFormats, "--format");
    if (get("method")) cfg.method = *get("method");
    if (get("budget")) cfg.budget = whole("budget");
    if (get("schedule")) cfg.schedule = parse_schedule(*get("schedule"));
    if (get("initial-k")) cfg.initial_k = whole("initial-k");
    if (get("spatial")) cfg.spatial = enum_from(*get("spatial"), kSpatial, "--spatial");
    if (get("alpha")) cfg.alpha = num("alpha");
    if (get("gamma")) cfg.gamma = num("gamma");
    if (get("kappa")) cfg.kappa = num("kappa");
    if (get("sigma")) cfg.sigma = num("sigma");
    if (get("relax")) cfg.relax = parse_on_off(*get("relax"), "--relax");
    if (get("relax-domain")) cfg.relax_domain = enum_from(*get("relax-domain"), kDomains, "--relax-domain");
    if (get("lloyd-iters")) cfg.lloyd_iters = whole("lloyd-iters");
    if (get("support-samples")) cfg.support_samples = whole("support-samples");
    if (get("origin")) cfg.origin = parse_vec3(*get("origin"), "--origin");
    if (get("seeds")) cfg.seeds = parse_list<std::uint64_t>(*get("seeds"), "--seeds");
    if (get("repetitions")) {
      const std::size_t reps = whole("repetitions");
      if (!get("seeds") && cfg.seeds.size() != reps) {
        cfg.seeds.clear();
        for (std::size_t r = 0; r < reps; ++r) cfg.seeds.push_back(r);
      } else if (cfg.seeds.size() != reps) {
        config_error("--repetitions must equal the number of --seeds");
      }
    }
    if (get("evaluator")) cfg.evaluator = *get("evaluator");
    if (get("evaluator-command")) cfg.evaluator_command = *get("evaluator-command");
    if (get("evaluator-timeout")) cfg.evaluator_timeout_s = num("evaluator-timeout");
    if (get("oracle-base")) cfg.oracle.base_quality = num("oracle-base");
    if (get("oracle-gain")) cfg.oracle.gain_per_view = num("oracle-gain");
    if (get("oracle-noise")) cfg.oracle.noise_sd = num("oracle-noise");
    if (get("oracle-seed")) cfg.oracle.seed = whole("oracle-seed");
    if (!flags.hotspots.empty()) {
      cfg.oracle.hotspots.clear();
      for (const auto& h : flags.hotspots) {
        const auto v = parse_list<double>(h, "--oracle-hotspot");
        if (v.size() != 5) config_error("--oracle-hotspot needs x,y,z,difficulty,radius");
        cfg.oracle.hotspots.push_back({Vec3(v[0], v[1], v[2]).normalized(), v[3], v[4]});
      }
    }
    if (get("mode")) cfg.split.mode = *get("mode");
    if (get("count")) cfg.split.count = whole("count");
    if (get("radius")) cfg.split.radius = num("radius");
    if (get("center")) cfg.split.center = parse_vec3(*get("center"), "--center");
    if (get("width")) cfg.split.width = static_cast<int>(whole("width"));
    if (get("height")) cfg.split.height = static_cast<int>(whole("height"));
    if (get("camera-angle-x")) cfg.split.camera_angle_x = num("camera-angle-x");
    if (get("rotate-z")) cfg.split.rotate_z_deg = parse_list<double>(*get("rotate-z"), "--rotate-z");
    if (get("mesh")) cfg.coverage.mesh = *get("mesh");
    if (get("icosphere")) cfg.coverage.icosphere = static_cast<int>(whole("icosphere"));
    if (!flags.views.empty()) cfg.coverage.views = flags.views;
    if (get("samples")) cfg.coverage.samples = whole("samples");
    if (get("sample-seed")) cfg.coverage.sample_seed = whole("sample-seed");
    if (get("ball-radius")) cfg.coverage.ball_radius = num("ball-radius");
    if (get("stride")) cfg.coverage.stride = static_cast<int>(whole("stride"));
    if (get("normalization")) {
      cfg.coverage.normalization = enum_from(*get("normalization"), kNormalizations, "--normalization");
    }
    if (get("methods")) {
      cfg.simulate_methods.clear();
      std::stringstream ss(*get("methods"));
      for (std::string m; std::getline(ss, m, ',');) {
        if (!m.empty()) cfg.simulate_methods.push_back(m);
      }
    }
    if (get("jobs")) cfg.jobs = static_cast<unsigned>(whole("jobs"));
    if (get("out")) cfg.out = *get("out");
  } catch (const std::logic_error& e) {
    config_error(std::string("bad numeric flag value: ") + e.what());
  }
  if (flags.project_sphere) cfg.project_sphere = true;
  if (flags.normalize_spatial) cfg.normalize_spatial = true;
  if (flags.timestamp) cfg.wall_clock_timestamp = true;
}

}  // namespace

int run_cli(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Training/test view selection for neural rendering datasets"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  std::string config_path;
  app.add_option("--config", config_path, "JSON run config (a manifest's config works too)");
  auto value = [&](const char* name, const char* help) {
    app.add_option_function<std::string>(
        std::string("--") + name, [&flags, name](const std::string& v) { flags.values[name] = v; }, help);
  };
  value("dataset", "transforms.json file or COLMAP text directory");
  value("format", "transforms | colmap-text");
  value("method", "rs | fvs | igs-greedy | igs-zipf | igs-vmf");
  value("budget", "views to select (rs, fvs)");
  value("schedule", "views per round, e.g. 5x5,10x12");
  value("initial-k", "random seed views");
  value("spatial", "euclidean | great-circle");
  value("alpha", "weight of the co-visibility distance");
  value("gamma", "Zipf sharpness");
  value("kappa", "vMF concentration");
  value("sigma", "softmax temperature of the vMF mixture weights");
  value("relax", "on | off");
  value("relax-domain", "sphere | hull");
  value("lloyd-iters", "Lloyd iterations");
  value("support-samples", "support points for Lloyd relaxation");
  value("origin", "x,y,z sphere center");
  value("seeds", "comma-separated seeds, one per repetition");
  value("repetitions", "number of repetitions (seeds 0..n-1 unless --seeds)");
  value("evaluator", "oracle | external");
  value("evaluator-command", "shell command speaking the scoring protocol");
  value("evaluator-timeout", "seconds per evaluator call");
  value("oracle-base", "oracle base quality");
  value("oracle-gain", "oracle gain per nearby training view");
  value("oracle-noise", "oracle noise standard deviation");
  value("oracle-seed", "oracle noise seed");
  value("mode", "uniform-sphere | fvs-resplit");
  value("count", "test views");
  value("radius", "uniform sphere radius");
  value("center", "x,y,z uniform sphere center");
  value("width", "test image width");
  value("height", "test image height");
  value("camera-angle-x", "horizontal field of view (rad)");
  value("rotate-z", "comma-separated angles in degrees");
  value("mesh", "OBJ mesh (default: unit icosphere)");
  value("icosphere", "icosphere subdivisions when no mesh is given");
  value("samples", "surface samples");
  value("sample-seed", "surface sampling seed");
  value("ball-radius", "coverage ball radius");
  value("stride", "pixel stride");
  value("normalization", "max-count | total-hits | ray-budget");
  value("methods", "comma-separated methods for simulate, '+relax' suffix allowed");
  value("jobs", "parallel workers");
  value("out", "output directory");
  app.add_option("--oracle-hotspot", flags.hotspots, "x,y,z,difficulty,radius (repeatable)");
  app.add_option("--views", flags.views, "transforms files, one per camera set")->delimiter(',');
  app.add_flag("--project-sphere", flags.project_sphere, "project centers onto the unit sphere about --origin");
  app.add_flag("--normalize-spatial", flags.normalize_spatial, "divide spatial distances by their pool maximum");
  app.add_flag("--timestamp", flags.timestamp, "stamp manifests with the wall clock");

  auto* select = app.add_subcommand("select", "select training views");
  auto* split = app.add_subcommand("split", "build a test split");
  auto* coverage = app.add_subcommand("coverage", "coverage density of camera sets on a mesh");
  auto* simulate = app.add_subcommand("simulate", "score trajectories against the synthetic oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      cfg = config_from_json(ss.str());
    }
    apply(flags, cfg);
    if (select->parsed()) cmd_select(cfg);
    if (split->parsed()) cmd_split(cfg);
    if (coverage->parsed()) cmd_coverage(cfg);
    if (simulate->parsed()) cmd_simulate(cfg);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return 5;
  }
  return 0;
}

}  // namespace viewdir
