#include "support.hpp"
#include "viewdir/cli.hpp"
#include "viewdir/io.hpp"
#include "viewdir/splitgen.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <set>
#include <sys/wait.h>

using namespace viewdir;
namespace fs = std::filesystem;

namespace {

const std::string kPool = std::string(DATA_DIR) + "/synthetic_pool.json";

struct Run {
  int code = -1;
  std::string log;
};

Run viewdir_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stderr.txt";
  const std::string cmd = std::string(VIEWDIR_CLI) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                          log.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::slurp(log)};
}

std::vector<std::string> manifest_ids(const fs::path& path) {
  std::vector<std::string> ids;
  for (const auto& e : read_manifest(path).order) ids.push_back(e.view_id);
  return ids;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("select rs: one manifest of unique ids") {
  const auto dir = testing::temp_dir("cli_rs");
  const auto r = viewdir_cli("select --dataset " + kPool + " --method rs --budget 10 --out " + dir.string(), dir);
  REQUIRE(r.code == 0);
  const auto ids = manifest_ids(dir / "rs_rep000.manifest.json");
  CHECK(ids.size() == 10);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 10);
}

TEST_CASE("select igs-vmf refuses a non-spherical rig") {
  const auto dir = testing::temp_dir("cli_vmf");
  std::mt19937_64 gen(1);
  auto views = uniform_sphere_poses(40, 4.0, Vec3::Zero(), testing::small_intrinsics());
  for (std::size_t i = 0; i < views.size(); i += 2) views[i].center *= 1.5;
  write_transforms(ViewSet(views), dir / "rig.json");
  const std::string base = "select --dataset " + (dir / "rig.json").string() +
                           " --method igs-vmf --kappa 5 --sigma 1 --schedule 5,5 --out " + dir.string();
  const auto r = viewdir_cli(base, dir);
  CHECK(r.code == 2);
  CHECK(r.log.find("sphere") != std::string::npos);
  CHECK(viewdir_cli(base + " --project-sphere", dir).code == 0);
}

TEST_CASE("two repetitions give distinct valid manifests") {
  const auto dir = testing::temp_dir("cli_reps");
  REQUIRE(viewdir_cli("select --dataset " + kPool + " --method fvs --alpha 0 --budget 12 --seeds 3,4 --out " + dir.string(), dir)
              .code == 0);
  const auto a = read_manifest(dir / "fvs_rep000.manifest.json");
  const auto b = read_manifest(dir / "fvs_rep001.manifest.json");
  CHECK(a.seed == 3);
  CHECK(b.seed == 4);
  CHECK(a.order.size() == 12);
  CHECK(b.order.size() == 12);
  CHECK(a.order != b.order);
}

TEST_CASE("split uniform-sphere with rotations") {
  const auto dir = testing::temp_dir("cli_split");
  REQUIRE(viewdir_cli("split --mode uniform-sphere --count 200 --radius 4 --rotate-z 90 --out " + dir.string(), dir)
              .code == 0);
  const auto test = read_transforms(dir / "test_views.json");
  REQUIRE(test.size() == 200);
  for (const auto& v : test.views()) CHECK(std::abs(v.center.norm() - 4.0) < 1e-9);

  const auto rotated = read_transforms(dir / "test_views_rotz90.json");
  Mat3 rz;
  rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  for (std::size_t i = 0; i < test.size(); ++i) {
    CHECK((rotated.views()[i].center - rz * test.views()[i].center).norm() < 1e-12);
  }
  const auto first = testing::slurp(dir / "test_views_rotz90.json");
  REQUIRE(viewdir_cli("split --mode uniform-sphere --count 200 --radius 4 --rotate-z 90 --out " + dir.string(), dir)
              .code == 0);
  CHECK(testing::slurp(dir / "test_views_rotz90.json") == first);
}

TEST_CASE("split fvs-resplit on a 276-view pool") {
  const auto dir = testing::temp_dir("cli_resplit");
  write_transforms(ViewSet(uniform_sphere_poses(276, 4.0, Vec3::Zero(), testing::small_intrinsics())),
                   dir / "pool.json");
  REQUIRE(viewdir_cli("split --mode fvs-resplit --count 25 --alpha 0 --dataset " + (dir / "pool.json").string() + " --out " +
                          dir.string(),
                      dir)
              .code == 0);
  const auto doc = nlohmann::json::parse(testing::slurp(dir / "split.json"));
  CHECK(doc["test"].size() == 25);
  CHECK(doc["train"].size() == 251);
}

TEST_CASE("coverage: identical sets differ by nothing, empty sets cover nothing") {
  const auto dir = testing::temp_dir("cli_coverage");
  auto k = testing::small_intrinsics(32, 32, 40);
  write_transforms(ViewSet(uniform_sphere_poses(6, 4.0, Vec3::Zero(), k)), dir / "a.json");
  write_transforms(ViewSet(uniform_sphere_poses(6, 4.0, Vec3::Zero(), k)), dir / "b.json");
  testing::spit(dir / "empty.json", R"({"camera_angle_x": 0.7, "frames": []})");
  const std::string common = " --icosphere 2 --samples 2000 --stride 1 --out " + dir.string();

  REQUIRE(viewdir_cli("coverage --views " + (dir / "a.json").string() + "," + (dir / "b.json").string() + common, dir)
              .code == 0);
  const auto diff = read_coverage_points(dir / "diff_a_b.bin");
  for (double v : diff.raw) CHECK(v == 0.0);
  CHECK(read_coverage_points(dir / "coverage_a.bin").raw == read_coverage_points(dir / "coverage_b.bin").raw);

  const auto r = viewdir_cli("coverage --views " + (dir / "empty.json").string() + common, dir);
  REQUIRE(r.code == 0);
  for (double v : read_coverage_points(dir / "coverage_empty.bin").raw) CHECK(v == 0.0);
  const auto csv = testing::slurp(dir / "coverage_summary.csv");
  CHECK(csv.find("empty,0,0,0\n") != std::string::npos);
}

TEST_CASE("simulate: one row per checkpoint, fvs ahead of rs") {
  const auto dir = testing::temp_dir("cli_simulate");
  REQUIRE(viewdir_cli("simulate --dataset " + kPool + " --methods igs-greedy --out " + dir.string(), dir).code == 0);
  const auto csv = testing::slurp(dir / "simulate.csv");
  CHECK(line_count(csv) == 1 + incremental_schedule().size());

  REQUIRE(viewdir_cli("simulate --dataset " + kPool + " --methods rs,fvs --alpha 0 --repetitions 20 --jobs 2 --out " +
                          dir.string(),
                      dir)
              .code == 0);
  std::map<std::string, std::map<std::size_t, double>> sums;
  std::istringstream in(testing::slurp(dir / "simulate.csv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string method, rep, n, score;
    std::getline(ss, method, ',');
    std::getline(ss, rep, ',');
    std::getline(ss, n, ',');
    std::getline(ss, score, ',');
    sums[method][std::stoul(n)] += std::stod(score);
  }
  REQUIRE(sums["fvs"].size() == incremental_schedule().size());
  for (const auto& [n, total] : sums["fvs"]) CHECK(total >= sums["rs"].at(n));
}

TEST_CASE("reruns are byte-identical and the config echo closes the loop") {
  const auto dir = testing::temp_dir("cli_idempotent");
  const std::string args = "select --dataset " + kPool +
                           " --method igs-zipf --gamma 10 --schedule 5x3 --relax on --oracle-hotspot 0,0,1,3,0.5 --out " +
                           dir.string();
  REQUIRE(viewdir_cli(args, dir).code == 0);
  const auto manifest = testing::slurp(dir / "igs-zipf_rep000.manifest.json");
  const auto log = testing::slurp(dir / "igs-zipf_rep000.log.jsonl");
  REQUIRE(viewdir_cli(args, dir).code == 0);
  CHECK(testing::slurp(dir / "igs-zipf_rep000.manifest.json") == manifest);
  CHECK(testing::slurp(dir / "igs-zipf_rep000.log.jsonl") == log);

  const auto again = dir / "again";
  fs::create_directories(again);
  REQUIRE(viewdir_cli("select --config " + (dir / "igs-zipf_rep000.manifest.json").string() + " --out " +
                          again.string(),
                      dir)
              .code == 0);
  CHECK(testing::slurp(again / "igs-zipf_rep000.manifest.json") == manifest);
}

TEST_CASE("exit codes") {
  const auto dir = testing::temp_dir("cli_exit");
  CHECK(viewdir_cli("select --dataset " + kPool + " --method fvs --alpha 0", dir).code == 2);
  const auto no_alpha = viewdir_cli("select --dataset " + kPool + " --method fvs --budget 5", dir);
  CHECK(no_alpha.code == 2);
  CHECK(no_alpha.log.find("--alpha") != std::string::npos);
  CHECK(viewdir_cli("select --dataset " + kPool + " --method nope --budget 3", dir).code == 2);
  CHECK(viewdir_cli("select --dataset " + kPool + " --method rs --budget 3 --alpha 1", dir).code == 2);
  CHECK(viewdir_cli("select --dataset " + kPool + " --method rs --budget 300000 --out " + dir.string(), dir).code == 2);
  CHECK(viewdir_cli("select --dataset /nonexistent.json --method rs --budget 3", dir).code == 3);
  testing::spit(dir / "broken.json", "{");
  CHECK(viewdir_cli("select --dataset " + (dir / "broken.json").string() + " --method rs --budget 3", dir).code == 3);
  CHECK(viewdir_cli("select --dataset " + kPool +
                        " --method igs-greedy --schedule 5 --evaluator external --evaluator-command false --out " +
                        dir.string(),
                    dir)
            .code == 4);
  CHECK(viewdir_cli("frobnicate", dir).code == 2);
  CHECK(exit_code_for(ErrorCode::Timeout) == 4);
}
