#include "viewdir/evaluator.hpp"

#include "viewdir/error.hpp"
#include "viewdir/metrics.hpp"

#include <json.hpp>

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <numbers>
#include <cmath>
#include <random>
#include <thread>

namespace viewdir {

void OracleParams::validate() const {
  for (const auto& h : hotspots) {
    if (!(h.radius > 0.0 && h.radius < std::numbers::pi)) {
      throw Error(ErrorCode::InvalidSpec, "hotspot radius must lie in (0, pi)");
    }
    if (!(h.difficulty > 0.0)) throw Error(ErrorCode::InvalidSpec, "hotspot difficulty must be > 0");
    if (std::abs(h.center.norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::NotOnSphere, "hotspot centers must be unit vectors");
    }
  }
  if (!(gain_per_view > 0.0)) throw Error(ErrorCode::InvalidSpec, "gain_per_view must be > 0");
  if (!(noise_sd >= 0.0)) throw Error(ErrorCode::InvalidSpec, "noise_sd must be >= 0");
}

namespace {

void require_unit(std::span<const CameraView> views) {
  for (const auto& v : views) {
    if (std::abs(v.center.norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::NotOnSphere, "view '" + v.id + "' is not on the unit sphere");
    }
  }
}

double noise_for(const OracleParams& params, const std::string& id, std::size_t n_selected) {
  if (params.noise_sd == 0.0) return 0.0;
  std::vector<std::uint32_t> key = {static_cast<std::uint32_t>(params.seed),
                                    static_cast<std::uint32_t>(params.seed >> 32),
                                    static_cast<std::uint32_t>(n_selected)};
  for (unsigned char c : id) key.push_back(c);
  std::seed_seq seq(key.begin(), key.end());
  std::mt19937_64 rng(seq);
  return std::normal_distribution<double>(0.0, params.noise_sd)(rng);
}

}  // namespace

QualityReport oracle_scores(std::span<const CameraView> selected,
                            std::span<const CameraView> candidates, const OracleParams& params) {
  params.validate();
  require_unit(selected);
  require_unit(candidates);

  std::vector<double> decay;
  decay.reserve(params.hotspots.size());
  for (const auto& h : params.hotspots) {
    std::size_t near = 0;
    for (const auto& s : selected) {
      if (great_circle_distance(s.center, h.center) <= h.radius) ++near;
    }
    decay.push_back(1.0 / (1.0 + static_cast<double>(near)));
  }

  QualityReport report;
  for (const auto& c : candidates) {
    double coverage = 0.0;
    for (const auto& s : selected) {
      const double d = great_circle_distance(c.center, s.center);
      coverage += std::exp(-d * d / kOracleCoverageWidth);
    }
    double penalty = 0.0;
    for (std::size_t h = 0; h < params.hotspots.size(); ++h) {
      const Hotspot& spot = params.hotspots[h];
      const double d = great_circle_distance(c.center, spot.center);
      penalty += spot.difficulty * std::exp(-d * d / (spot.radius * spot.radius)) * decay[h];
    }
    report.scores[c.id] = params.base_quality + params.gain_per_view * coverage - penalty +
                          noise_for(params, c.id, selected.size());
  }
  return report;
}

double oracle_mean_score(std::span<const CameraView> selected, std::span<const CameraView> probes,
                         const OracleParams& params) {
  if (probes.empty()) return 0.0;
  const QualityReport report = oracle_scores(selected, probes, params);
  double sum = 0.0;
  for (const auto& p : probes) sum += report.scores.at(p.id);
  return sum / static_cast<double>(probes.size());
}

SyntheticOracle::SyntheticOracle(const ViewSet& pool, OracleParams params, const Vec3& origin)
    : pool_(project_to_unit_sphere(pool, origin)), params_(std::move(params)) {
  params_.validate();
}

QualityReport SyntheticOracle::evaluate(const EvaluationRequest& request) {
  std::vector<CameraView> selected;
  std::vector<CameraView> candidates;
  selected.reserve(request.selected.size());
  candidates.reserve(request.candidates.size());
  for (const auto& id : request.selected) selected.push_back(pool_.view(id));
  for (const auto& id : request.candidates) candidates.push_back(pool_.view(id));
  return oracle_scores(selected, candidates, params_);
}

namespace {

class ChildProcess {
 public:
  explicit ChildProcess(const std::string& command) {
    int fds[2];
    if (socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
      throw Error(ErrorCode::SpawnFailure, "socketpair failed");
    }
    pid_ = fork();
    if (pid_ < 0) {
      close(fds[0]);
      close(fds[1]);
      throw Error(ErrorCode::SpawnFailure, "fork failed");
    }
    if (pid_ == 0) {
      close(fds[0]);
      dup2(fds[1], STDIN_FILENO);
      dup2(fds[1], STDOUT_FILENO);
      close(fds[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(fds[1]);
    fd_ = fds[0];
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  ~ChildProcess() {
    if (fd_ >= 0) close(fd_);
    if (pid_ > 0 && !reaped_) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  bool send_all(const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n = send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        return false;
      }
      sent += static_cast<std::size_t>(n);
    }
    shutdown(fd_, SHUT_WR);
    return true;
  }

  /// Reads until the first newline or EOF. Returns false on deadline.
  bool read_line(std::string& line, std::chrono::steady_clock::time_point deadline) {
    char buffer[4096];
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return false;
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = poll(&pfd, 1, static_cast<int>(std::max<long long>(1, remaining)));
      if (ready < 0 && errno == EINTR) continue;
      if (ready <= 0) continue;
      const ssize_t n = recv(fd_, buffer, sizeof(buffer), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return true;  // EOF
      line.append(buffer, static_cast<std::size_t>(n));
      const auto newline = line.find('\n');
      if (newline != std::string::npos) {
        line.resize(newline);
        return true;
      }
    }
  }

  /// Exit status once the child ends before the deadline; -1 otherwise.
  int wait(std::chrono::steady_clock::time_point deadline) {
    int status = 0;
    while (std::chrono::steady_clock::now() < deadline) {
      const pid_t r = waitpid(pid_, &status, WNOHANG);
      if (r == pid_) {
        reaped_ = true;
        return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    return -1;
  }

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  bool reaped_ = false;
};

}  // namespace

QualityReport external_evaluate(const ExternalBinding& binding, std::size_t round,
                                std::span<const std::string> selected,
                                std::span<const std::string> candidates) {
  if (!(binding.timeout_s > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "evaluator timeout must be > 0");
  }
  nlohmann::ordered_json request;
  request["v"] = 1;
  request["round"] = round;
  request["selected"] = std::vector<std::string>(selected.begin(), selected.end());
  request["candidates"] = std::vector<std::string>(candidates.begin(), candidates.end());
  request["dataset_path"] = binding.dataset_path;

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(binding.timeout_s));
  ChildProcess child(binding.command);
  child.send_all(request.dump() + "\n");  // a child that ignores stdin is fine

  std::string line;
  if (!child.read_line(line, deadline)) {
    throw Error(ErrorCode::Timeout, "evaluator did not answer within " +
                                        std::to_string(binding.timeout_s) + " s");
  }
  if (line.find_first_not_of(" \t\r") == std::string::npos) {
    const int status = child.wait(deadline);
    if (status == 127) {
      throw Error(ErrorCode::SpawnFailure, "could not run evaluator command: " + binding.command);
    }
    if (status < 0) throw Error(ErrorCode::Timeout, "evaluator did not exit before the deadline");
    throw Error(ErrorCode::MalformedResponse, "evaluator closed its output without a response");
  }

  nlohmann::json response;
  try {
    response = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("response is not JSON: ") + e.what());
  }
  if (!response.is_object() || !response.contains("v") || response["v"] != 1) {
    throw Error(ErrorCode::MalformedResponse, "response must be an object with \"v\": 1");
  }
  if (!response.contains("scores") || !response["scores"].is_object()) {
    throw Error(ErrorCode::MalformedResponse, "response has no \"scores\" object");
  }
  QualityReport report;
  for (const auto& [id, value] : response["scores"].items()) {
    if (!value.is_number()) {
      throw Error(ErrorCode::MalformedResponse, "score for '" + id + "' is not a number");
    }
    const double score = value.get<double>();
    if (!std::isfinite(score)) {
      throw Error(ErrorCode::MalformedResponse, "score for '" + id + "' is not finite");
    }
    report.scores[id] = score;
  }
  for (const auto& id : candidates) {
    if (!report.scores.count(id)) {
      throw Error(ErrorCode::IncompleteScores, "evaluator returned no score for '" + id + "'");
    }
  }
  child.wait(deadline);
  return report;
}

ExternalProcessEvaluator::ExternalProcessEvaluator(ExternalBinding binding)
    : binding_(std::move(binding)) {
  if (!(binding_.timeout_s > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "evaluator timeout must be > 0");
  }
}

QualityReport ExternalProcessEvaluator::evaluate(const EvaluationRequest& request) {
  return external_evaluate(binding_, request.round, request.selected, request.candidates);
}

}  // namespace viewdir
