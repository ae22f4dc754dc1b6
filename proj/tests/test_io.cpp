#include "support.hpp"
#include "viewdir/io.hpp"
#include "viewdir/splitgen.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstring>

using namespace viewdir;
using testing::make_view;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FIXTURE_DIR;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected viewdir::Error");
  return ErrorCode::InvalidSpec;
}

// COLMAP world-to-camera rotation from (w, x, y, z), written out longhand.
Mat3 quat_to_matrix(double w, double x, double y, double z) {
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

void write_model(const fs::path& dir, const std::string& images, const std::string& points) {
  fs::create_directories(dir);
  testing::spit(dir / "images.txt", images);
  testing::spit(dir / "points3D.txt", points);
}

const char* kThreeImages =
    "1 1 0 0 0 0 0 4 1 a.png\n\n"
    "2 1 0 0 0 1 0 4 1 b.png\n\n"
    "3 1 0 0 0 2 0 4 1 c.png\n\n";

}  // namespace

TEST_CASE("transforms: identity frame with a 90 degree field of view") {
  const auto dir = testing::temp_dir("io_identity");
  testing::spit(dir / "t.json",
                R"({"camera_angle_x": 1.5707963267948966, "frames": [)"
                R"({"file_path": "./a", "transform_matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}]})");
  const auto set = read_transforms(dir / "t.json");
  const auto& v = set.views().at(0);
  CHECK(v.center == Vec3::Zero());
  CHECK(v.intrinsics->fx == doctest::Approx(400.0).epsilon(1e-14));
  CHECK(v.intrinsics->width == 800);
  CHECK(v.intrinsics->cx == 400.0);
  CHECK(v.id == "./a");
}

TEST_CASE("transforms: schema errors name the frame") {
  const auto dir = testing::temp_dir("io_missing");
  testing::spit(dir / "t.json",
                R"({"camera_angle_x": 0.7, "frames": [)"
                R"({"transform_matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}, {"file_path": "x"}]})");
  try {
    read_transforms(dir / "t.json");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
  }
  testing::spit(dir / "bad.json", "{not json");
  CHECK(code_of([&] { read_transforms(dir / "bad.json"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { read_transforms(dir / "absent.json"); }) == ErrorCode::MissingFile);
}

TEST_CASE("transforms: slightly scaled rotations are re-orthonormalised") {
  const auto dir = testing::temp_dir("io_scaled");
  testing::spit(dir / "ok.json",
                R"({"camera_angle_x": 0.7, "frames": [)"
                R"({"transform_matrix": [[1.0005,0,0,1],[0,1.0005,0,2],[0,0,1.0005,3],[0,0,0,1]]}]})");
  const auto set = read_transforms(dir / "ok.json");
  CHECK((set.views()[0].rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(set.views()[0].center == Vec3(1, 2, 3));

  testing::spit(dir / "far.json",
                R"({"camera_angle_x": 0.7, "frames": [)"
                R"({"transform_matrix": [[1.01,0,0,1],[0,1,0,2],[0,0,1,3],[0,0,0,1]]}]})");
  CHECK(code_of([&] { read_transforms(dir / "far.json"); }) == ErrorCode::NonOrthonormalRotation);

  testing::spit(dir / "mirror.json",
                R"({"camera_angle_x": 0.7, "frames": [)"
                R"({"transform_matrix": [[-1,0,0,1],[0,1,0,2],[0,0,1,3],[0,0,0,1]]}]})");
  CHECK(code_of([&] { read_transforms(dir / "mirror.json"); }) == ErrorCode::NonOrthonormalRotation);
}

TEST_CASE("transforms fixture round-trips bit for bit") {
  const auto a = read_transforms(kFixtures / "transforms_small.json");
  REQUIRE(a.size() == 3);
  CHECK(a.view("./train/r_1").center == Vec3(4, 0, 0));
  CHECK(a.view("./train/r_1").forward() == Vec3(-1, 0, 0));
  const auto dir = testing::temp_dir("io_roundtrip");
  write_transforms(a, dir / "out.json");
  const auto b = read_transforms(dir / "out.json");
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b.views()[i].id == a.views()[i].id);
    CHECK(b.views()[i].center == a.views()[i].center);
    CHECK(b.views()[i].rotation == a.views()[i].rotation);
    CHECK(b.views()[i].intrinsics == a.views()[i].intrinsics);
  }
  write_transforms(b, dir / "again.json");
  CHECK(testing::slurp(dir / "out.json") == testing::slurp(dir / "again.json"));
}

TEST_CASE("COLMAP fixture: poses, intrinsics and co-visibility") {
  const auto model = read_colmap_text(kFixtures / "colmap_3x3");
  const auto& set = model.views;
  REQUIRE(set.size() == 3);
  CHECK(set.views()[0].id == "front.png");

  const std::array<std::array<double, 4>, 3> q = {{{1, 0, 0, 0},
                                                   {0.7071067811865476, 0, 0.7071067811865476, 0},
                                                   {0.7071067811865476, 0.7071067811865476, 0, 0}}};
  for (std::size_t i = 0; i < 3; ++i) {
    const Mat3 r_wc = quat_to_matrix(q[i][0], q[i][1], q[i][2], q[i][3]);
    const Vec3 expected_center = -r_wc.transpose() * Vec3(0, 0, 4);
    const auto& v = set.views()[i];
    CHECK((v.center - expected_center).norm() < 1e-12);
    // COLMAP looks down +z of its camera frame.
    CHECK((v.forward() - r_wc.transpose() * Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK((v.forward() + v.center.normalized()).norm() < 1e-12);
  }
  CHECK(set.view("front.png").intrinsics == Intrinsics{500, 510, 320, 240, 640, 480});
  CHECK(set.view("top.png").intrinsics == Intrinsics{520, 520, 321, 239, 640, 480});

  const auto& a = model.covisibility;
  CHECK(a.count("front.png", "side.png") == 2);
  CHECK(a.count("front.png", "top.png") == 2);
  CHECK(a.count("side.png", "top.png") == 1);
  CHECK(a.counts() == a.counts().transpose());
}

TEST_CASE("COLMAP co-visibility examples") {
  const auto root = testing::temp_dir("io_colmap_examples");
  write_model(root / "single", kThreeImages, "1 0 0 0 1 1 1 0 1 0 2 0 3 0\n");
  const auto single = read_colmap_text(root / "single").covisibility;
  CHECK(single.count("a.png", "b.png") == 1);
  CHECK(single.count("a.png", "c.png") == 1);
  CHECK(single.count("b.png", "c.png") == 1);

  write_model(root / "none", kThreeImages, "1 0 0 0 1 1 1 0 1 0\n2 0 0 0 1 1 1 0 2 0\n");
  const auto none = std::make_shared<CovisibilityMatrix>(read_colmap_text(root / "none").covisibility);
  CHECK(none->off_diagonal_max() == 0);
  CHECK(code_of([&] { photogrammetric_distance("a.png", "b.png", *none); }) == ErrorCode::EmptyCovisibility);

  write_model(root / "pair", kThreeImages, "1 0 0 0 1 1 1 0 1 0 2 0\n2 0 0 0 1 1 1 0 1 1 2 1\n");
  CHECK(read_colmap_text(root / "pair").covisibility.count("a.png", "b.png") == 2);
}

TEST_CASE("COLMAP errors") {
  const auto root = testing::temp_dir("io_colmap_errors");
  fs::create_directories(root / "empty");
  CHECK(code_of([&] { read_colmap_text(root / "empty"); }) == ErrorCode::MissingFile);
  write_model(root / "badtrack", kThreeImages, "1 0 0 0 1 1 1 0 1 0 9 0\n");
  CHECK(code_of([&] { read_colmap_text(root / "badtrack"); }) == ErrorCode::ParseError);
  write_model(root / "badnum", "1 1 0 zero 0 0 0 4 1 a.png\n\n", "");
  try {
    read_colmap_text(root / "badnum");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("images.txt:1") != std::string::npos);
  }
}

TEST_CASE("COLMAP model round-trips") {
  const auto a = read_colmap_text(kFixtures / "colmap_3x3");
  const auto dir = testing::temp_dir("io_colmap_roundtrip");
  write_colmap_text(a, dir);
  const auto b = read_colmap_text(dir);
  CHECK(b.covisibility.counts() == a.covisibility.counts());
  CHECK(b.covisibility.ids() == a.covisibility.ids());
  for (std::size_t i = 0; i < a.views.size(); ++i) {
    CHECK((b.views.views()[i].center - a.views.views()[i].center).norm() < 1e-12);
    CHECK((b.views.views()[i].rotation - a.views.views()[i].rotation).norm() < 1e-12);
    CHECK(b.views.views()[i].intrinsics == a.views.views()[i].intrinsics);
  }
  CHECK(code_of([&] {
          ColmapModel m{ViewSet({make_view("has space", {0, 0, 0})}), {}};
          write_colmap_text(m, dir / "x");
        }) == ErrorCode::InvalidSpec);
}

TEST_CASE("pose conversion round trip") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 500; ++i) {
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    q.normalize();
    const std::array<double, 4> qv = {q.w(), q.x(), q.y(), q.z()};
    const Vec3 t(n(rng), n(rng), n(rng));
    const auto [center, rotation] = from_colmap_pose(qv, t);
    CameraView v = make_view("x", center, rotation);
    const auto [q2, t2] = colmap_pose(v);
    const double sign = q2[0] * qv[0] + q2[1] * qv[1] + q2[2] * qv[2] + q2[3] * qv[3] < 0 ? -1.0 : 1.0;
    for (int k = 0; k < 4; ++k) CHECK(std::abs(sign * q2[k] - qv[k]) < 1e-9);
    CHECK((t2 - t).norm() < 1e-9);
    CHECK(q2[0] >= 0.0);
  }
}

TEST_CASE("manifests") {
  SelectionManifest m;
  m.method = "fvs";
  m.config_echo = R"({"v":1,"budget":3})";
  m.seed = 18446744073709551615ull;
  m.created_at = "1970-01-01T00:00:00Z";
  m.order = {{1, "b", std::nullopt}, {2, "a", 0.1 + 0.2}, {5, "c", -1e-300}};
  const auto dir = testing::temp_dir("io_manifest");
  write_manifest(m, dir / "m.json");
  CHECK(read_manifest(dir / "m.json") == m);

  const auto doc = nlohmann::ordered_json::parse(testing::slurp(dir / "m.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"v", "method", "seed", "created_at", "config", "order"});

  auto dup = m;
  dup.order.push_back({9, "a", std::nullopt});
  CHECK(code_of([&] { write_manifest(dup, dir / "dup.json"); }) == ErrorCode::DuplicateId);
  CHECK_FALSE(fs::exists(dir / "dup.json"));
  auto steps = m;
  steps.order[1].step = 1;
  CHECK(code_of([&] { write_manifest(steps, dir / "s.json"); }) == ErrorCode::InvalidSpec);

  auto text = testing::slurp(dir / "m.json");
  text.replace(text.find("\"v\": 1"), 6, "\"v\": 7");
  testing::spit(dir / "v7.json", text);
  CHECK(code_of([&] { read_manifest(dir / "v7.json"); }) == ErrorCode::SchemaVersionMismatch);
}

TEST_CASE("view sets serialise without losing bits") {
  std::mt19937_64 rng(4);
  std::vector<CameraView> views;
  for (int i = 0; i < 50; ++i) {
    auto v = testing::aimed_view(testing::pad_id("v", i), 3.7 * testing::random_unit(rng), testing::small_intrinsics(640, 480, 531.123456789));
    v.image_path = "img/" + v.id + ".png";
    views.push_back(v);
  }
  const ViewSet set(views, {"v0003", "v0001"});
  const auto back = view_set_from_json(view_set_to_json(set));
  CHECK(back.selected() == set.selected());
  for (std::size_t i = 0; i < views.size(); ++i) {
    CHECK(std::memcmp(back.views()[i].center.data(), views[i].center.data(), sizeof(double) * 3) == 0);
    CHECK(std::memcmp(back.views()[i].rotation.data(), views[i].rotation.data(), sizeof(double) * 9) == 0);
    CHECK(back.views()[i].intrinsics == views[i].intrinsics);
    CHECK(back.views()[i].image_path == views[i].image_path);
  }
}

TEST_CASE("OBJ reading") {
  const auto dir = testing::temp_dir("io_obj");
  testing::spit(dir / "quad.obj",
                "# quad plus a sliver\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 2 0 0\n"
                "f 1/1/1 2/2/2 3/3/3 4/4/4\nf -5 -4 -1\n");
  const auto mesh = read_obj(dir / "quad.obj");
  CHECK(mesh.triangle_count() == 2);  // the collinear face is dropped
  CHECK(mesh.total_area() == doctest::Approx(1.0));
  write_obj(mesh, dir / "copy.obj");
  CHECK(read_obj(dir / "copy.obj").vertices() == mesh.vertices());
  testing::spit(dir / "bad.obj", "v 0 0 0\nf 1 2 3\n");
  CHECK(code_of([&] { read_obj(dir / "bad.obj"); }) == ErrorCode::ParseError);
}

TEST_CASE("run log lists every ranked candidate") {
  IgsResult r;
  RoundRecord rec;
  rec.round = 1;
  rec.candidates = {"a", "b", "c"};
  rec.scores.scores = {{"a", 3.0}, {"b", 1.0}, {"c", 2.0}};
  rec.ranking = ErrorRanking(rec.scores, rec.candidates);
  rec.drawn = {"b"};
  rec.relaxed = {"a"};
  r.rounds.push_back(rec);
  const auto dir = testing::temp_dir("io_runlog");
  write_run_log(r, dir / "log.jsonl");
  std::istringstream in(testing::slurp(dir / "log.jsonl"));
  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0]["view_id"] == "b");
  CHECK(lines[0]["rank"] == 0);
  CHECK(lines[0]["drawn"] == true);
  CHECK(lines[0]["relaxed_to"] == "a");
  CHECK(lines[1]["relaxed_to"].is_null());
  CHECK(lines[2]["score"] == 3.0);
}

TEST_CASE("coverage exports") {
  const auto mesh = make_icosphere(1);
  CoverageField f;
  f.samples.points = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, -1)};
  f.samples.radius = 0.125;
  f.values = Eigen::Vector3d(4, 0, 2);
  f.normalization = 4;
  const auto dir = testing::temp_dir("io_coverage");
  write_coverage_points(f, dir / "c.bin");
  const auto bytes = testing::slurp(dir / "c.bin");
  REQUIRE(bytes.size() == 24 + 3 * 32);
  CHECK(static_cast<unsigned char>(bytes[0]) == 3);
  const auto back = read_coverage_points(dir / "c.bin");
  CHECK(back.points == f.samples.points);
  CHECK(back.raw == std::vector<double>{4, 0, 2});
  CHECK(back.radius == 0.125);
  CHECK(back.normalization == 4);

  CHECK(coverage_color(0.0) == std::array<std::uint8_t, 3>{68, 1, 84});
  CHECK(coverage_color(1.0) == std::array<std::uint8_t, 3>{253, 231, 37});
  CHECK(coverage_color(0.125) == std::array<std::uint8_t, 3>{64, 42, 112});
  CHECK(coverage_color(7.0) == coverage_color(1.0));

  write_coverage_ply(mesh, f, dir / "c.ply");
  const auto ply = testing::slurp(dir / "c.ply");
  const auto end = ply.find("end_header\n");
  REQUIRE(end != std::string::npos);
  CHECK(ply.rfind("ply\nformat binary_little_endian 1.0\n", 0) == 0);
  const std::size_t body = ply.size() - end - 11;
  CHECK(body == mesh.vertices().size() * 19 + mesh.triangle_count() * 13);
}
