#include "viewdir/io.hpp"

#include "viewdir/error.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace viewdir {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string() + " does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

template <typename Json>
Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

double number_at(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::ParseError, where + ": \"" + key + "\" must be a number");
  }
  return it->get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  return number_at(obj, key, where);
}

/// Accepts rotations that are orthonormal to 1e-6 unchanged; within 1e-3 of
/// orthonormal (by singular values) they are replaced by the polar factor.
Mat3 checked_rotation(const Mat3& r, const std::string& where) {
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6 && r.determinant() > 0) {
    return r;
  }
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double deviation = (svd.singularValues().array() - 1.0).abs().maxCoeff();
  if (!(deviation <= 1e-3) || r.determinant() <= 0.0) {
    throw Error(ErrorCode::NonOrthonormalRotation,
                where + ": rotation is not orthonormal (singular value deviation " +
                    std::to_string(deviation) + ")");
  }
  spdlog::warn("{}: rotation re-orthonormalised (singular value deviation {:.3g})", where, deviation);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

// ---- transforms.json ------------------------------------------------------

ViewSet read_transforms(const fs::path& path) {
  const json doc = parse_json<json>(read_text(path), path.string());
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, path.string() + ": top level must be an object");
  const auto frames = doc.find("frames");
  if (frames == doc.end() || !frames->is_array()) {
    throw Error(ErrorCode::ParseError, path.string() + ": missing \"frames\" array");
  }

  std::vector<CameraView> views;
  views.reserve(frames->size());
  for (std::size_t i = 0; i < frames->size(); ++i) {
    const json& frame = (*frames)[i];
    const std::string where = path.filename().string() + " frame " + std::to_string(i);
    if (!frame.is_object()) throw Error(ErrorCode::ParseError, where + ": not an object");
    const auto m = frame.find("transform_matrix");
    if (m == frame.end()) throw Error(ErrorCode::ParseError, where + ": missing transform_matrix");
    if (!m->is_array() || m->size() < 3) {
      throw Error(ErrorCode::ParseError, where + ": transform_matrix must be 4x4");
    }
    Eigen::Matrix<double, 3, 4> t;
    for (int r = 0; r < 3; ++r) {
      const json& row = (*m)[r];
      if (!row.is_array() || row.size() != 4) {
        throw Error(ErrorCode::ParseError, where + ": transform_matrix row " + std::to_string(r) + " must have 4 entries");
      }
      for (int c = 0; c < 4; ++c) {
        if (!row[c].is_number()) {
          throw Error(ErrorCode::ParseError, where + ": transform_matrix has a non-numeric entry");
        }
        t(r, c) = row[c].get<double>();
      }
    }

    CameraView v;
    if (frame.contains("id") && frame["id"].is_string()) {
      v.id = frame["id"].get<std::string>();
    } else if (frame.contains("file_path") && frame["file_path"].is_string()) {
      v.id = frame["file_path"].get<std::string>();
    } else {
      v.id = std::to_string(i);
    }
    if (frame.contains("file_path") && frame["file_path"].is_string()) {
      v.image_path = frame["file_path"].get<std::string>();
    }
    v.center = t.col(3);
    v.rotation = checked_rotation(t.leftCols<3>(), where);

    // Frame-level keys override top-level ones.
    auto lookup = [&](const char* key) {
      if (auto f = optional_number(frame, key, where)) return f;
      return optional_number(doc, key, path.string());
    };
    Intrinsics k;
    k.width = static_cast<int>(lookup("w").value_or(800.0));
    k.height = static_cast<int>(lookup("h").value_or(800.0));
    const auto angle_x = lookup("camera_angle_x");
    const auto fl_x = lookup("fl_x");
    if (!fl_x && !angle_x) throw Error(ErrorCode::ParseError, where + ": no camera_angle_x or fl_x");
    k.fx = fl_x ? *fl_x : k.width / (2.0 * std::tan(*angle_x / 2.0));
    if (auto fl_y = lookup("fl_y")) {
      k.fy = *fl_y;
    } else if (auto angle_y = lookup("camera_angle_y")) {
      k.fy = k.height / (2.0 * std::tan(*angle_y / 2.0));
    } else {
      k.fy = k.fx;
    }
    k.cx = lookup("cx").value_or(k.width / 2.0);
    k.cy = lookup("cy").value_or(k.height / 2.0);
    v.intrinsics = k;
    validate_camera(v);
    views.push_back(std::move(v));
  }
  return ViewSet(std::move(views));
}

void write_transforms(const ViewSet& set, const fs::path& path) {
  ordered_json doc;
  for (const auto& v : set.views()) {
    if (v.intrinsics) {
      doc["camera_angle_x"] = 2.0 * std::atan(v.intrinsics->width / (2.0 * v.intrinsics->fx));
      break;
    }
  }
  ordered_json frames = ordered_json::array();
  for (const auto& v : set.views()) {
    ordered_json f;
    f["id"] = v.id;
    f["file_path"] = v.image_path.value_or(v.id);
    ordered_json m = ordered_json::array();
    for (int r = 0; r < 4; ++r) {
      ordered_json row = ordered_json::array();
      for (int c = 0; c < 4; ++c) {
        if (r == 3) {
          row.push_back(c == 3 ? 1.0 : 0.0);
        } else {
          row.push_back(c < 3 ? v.rotation(r, c) : v.center[r]);
        }
      }
      m.push_back(row);
    }
    f["transform_matrix"] = m;
    if (v.intrinsics) {
      f["w"] = v.intrinsics->width;
      f["h"] = v.intrinsics->height;
      f["fl_x"] = v.intrinsics->fx;
      f["fl_y"] = v.intrinsics->fy;
      f["cx"] = v.intrinsics->cx;
      f["cy"] = v.intrinsics->cy;
    }
    frames.push_back(std::move(f));
  }
  doc["frames"] = std::move(frames);
  write_text(path, doc.dump(2) + "\n");
}

// ---- COLMAP text model ----------------------------------------------------

std::pair<std::array<double, 4>, Vec3> colmap_pose(const CameraView& view) {
  const Mat3 flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  const Mat3 r_wc = (view.rotation * flip).transpose();
  Eigen::Quaterniond q(r_wc);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return {{q.w(), q.x(), q.y(), q.z()}, -r_wc * view.center};
}

std::pair<Vec3, Mat3> from_colmap_pose(const std::array<double, 4>& qvec, const Vec3& tvec) {
  const Eigen::Quaterniond q = Eigen::Quaterniond(qvec[0], qvec[1], qvec[2], qvec[3]).normalized();
  const Mat3 r_wc = q.toRotationMatrix();
  const Mat3 flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  return {-r_wc.transpose() * tvec, r_wc.transpose() * flip};
}

namespace {

struct LineReader {
  std::istringstream in;
  std::string file;
  std::size_t line_no = 0;

  LineReader(const std::string& text, std::string name) : in(text), file(std::move(name)) {}

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  /// Next line that is neither blank nor a comment.
  bool next_record(std::string& line) {
    while (next(line)) {
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, file + ":" + std::to_string(line_no) + ": " + what);
  }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& s, const LineReader& r) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) r.fail("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    r.fail("bad number '" + s + "'");
  }
}

long long to_int(const std::string& s, const LineReader& r) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) r.fail("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    r.fail("bad integer '" + s + "'");
  }
}

std::map<long long, Intrinsics> read_colmap_cameras(const fs::path& file) {
  std::map<long long, Intrinsics> cameras;
  if (!fs::exists(file)) return cameras;
  LineReader r(read_text(file), file.filename().string());
  for (std::string line; r.next_record(line);) {
    const auto tok = split_ws(line);
    if (tok.size() < 5) r.fail("camera record needs CAMERA_ID MODEL WIDTH HEIGHT PARAMS");
    const std::string& model = tok[1];
    Intrinsics k;
    k.width = static_cast<int>(to_int(tok[2], r));
    k.height = static_cast<int>(to_int(tok[3], r));
    std::vector<double> p;
    for (std::size_t i = 4; i < tok.size(); ++i) p.push_back(to_double(tok[i], r));
    // Single-focal models list f, cx, cy; the rest fx, fy, cx, cy.
    const bool single = model.rfind("SIMPLE_", 0) == 0 || model == "RADIAL" ||
                        model == "RADIAL_FISHEYE";
    if (single) {
      if (p.size() < 3) r.fail("camera model " + model + " needs f, cx, cy");
      k.fx = k.fy = p[0];
      k.cx = p[1];
      k.cy = p[2];
    } else {
      if (p.size() < 4) r.fail("camera model " + model + " needs fx, fy, cx, cy");
      k.fx = p[0];
      k.fy = p[1];
      k.cx = p[2];
      k.cy = p[3];
    }
    cameras[to_int(tok[0], r)] = k;
  }
  return cameras;
}

}  // namespace

ColmapModel read_colmap_text(const fs::path& dir) {
  const fs::path images_file = dir / "images.txt";
  const fs::path points_file = dir / "points3D.txt";
  for (const auto& f : {images_file, points_file}) {
    if (!fs::exists(f)) throw Error(ErrorCode::MissingFile, f.string() + " does not exist");
  }
  const auto cameras = read_colmap_cameras(dir / "cameras.txt");

  std::vector<CameraView> views;
  std::map<long long, std::size_t> row_of;
  {
    LineReader r(read_text(images_file), "images.txt");
    for (std::string line; r.next_record(line);) {
      const auto tok = split_ws(line);
      if (tok.size() < 10) r.fail("image record needs IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME");
      const long long image_id = to_int(tok[0], r);
      const std::array<double, 4> q = {to_double(tok[1], r), to_double(tok[2], r),
                                       to_double(tok[3], r), to_double(tok[4], r)};
      const Vec3 t(to_double(tok[5], r), to_double(tok[6], r), to_double(tok[7], r));
      if (!(std::abs(Eigen::Vector4d(q[0], q[1], q[2], q[3]).norm()) > 0.0)) r.fail("zero quaternion");
      const long long camera_id = to_int(tok[8], r);

      CameraView v;
      v.id = tok[9];
      v.image_path = tok[9];
      std::tie(v.center, v.rotation) = from_colmap_pose(q, t);
      if (auto it = cameras.find(camera_id); it != cameras.end()) v.intrinsics = it->second;
      if (row_of.count(image_id)) r.fail("duplicate IMAGE_ID " + std::to_string(image_id));
      row_of[image_id] = views.size();
      views.push_back(std::move(v));

      std::string points2d;
      r.next(points2d);  // keypoint line, possibly empty
    }
  }

  const auto n = static_cast<Eigen::Index>(views.size());
  CovisibilityMatrix::Counts counts = CovisibilityMatrix::Counts::Zero(n, n);
  {
    LineReader r(read_text(points_file), "points3D.txt");
    std::vector<std::size_t> track;
    for (std::string line; r.next_record(line);) {
      const auto tok = split_ws(line);
      if (tok.size() < 8) r.fail("point record needs POINT3D_ID X Y Z R G B ERROR TRACK[]");
      if ((tok.size() - 8) % 2 != 0) r.fail("track must list IMAGE_ID POINT2D_IDX pairs");
      track.clear();
      for (std::size_t i = 8; i < tok.size(); i += 2) {
        const long long image_id = to_int(tok[i], r);
        const auto it = row_of.find(image_id);
        if (it == row_of.end()) r.fail("track references unknown IMAGE_ID " + tok[i]);
        track.push_back(it->second);
      }
      // A point observed twice in one image still counts once for that image.
      std::sort(track.begin(), track.end());
      track.erase(std::unique(track.begin(), track.end()), track.end());
      for (std::size_t a = 0; a < track.size(); ++a) {
        for (std::size_t b = a + 1; b < track.size(); ++b) {
          const auto i = static_cast<Eigen::Index>(track[a]);
          const auto j = static_cast<Eigen::Index>(track[b]);
          ++counts(i, j);
          ++counts(j, i);
        }
      }
    }
  }
  if (counts != counts.transpose()) {
    throw Error(ErrorCode::ParseError, "co-visibility counts came out asymmetric");
  }

  std::vector<std::string> ids;
  ids.reserve(views.size());
  for (const auto& v : views) ids.push_back(v.id);
  ColmapModel model{ViewSet(std::move(views)), CovisibilityMatrix(std::move(ids), std::move(counts))};
  return model;
}

void write_colmap_text(const ColmapModel& model, const fs::path& dir) {
  const auto& views = model.views.views();
  for (const auto& v : views) {
    if (v.id.empty() || v.id.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorCode::InvalidSpec, "COLMAP image names cannot contain whitespace: '" + v.id + "'");
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::ostringstream cams, imgs, pts;
  for (auto* s : {&cams, &imgs, &pts}) *s << std::setprecision(17);
  cams << "# Camera list with one line of data per camera:\n"
          "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
  imgs << "# Image list with two lines of data per image:\n"
          "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n"
          "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
  pts << "# 3D point list with one line of data per point:\n"
         "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";

  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& v = views[i];
    const Intrinsics k = v.intrinsics.value_or(Intrinsics{1.0, 1.0, 0.5, 0.5, 1, 1});
    cams << i + 1 << " PINHOLE " << k.width << ' ' << k.height << ' ' << k.fx << ' ' << k.fy << ' '
         << k.cx << ' ' << k.cy << '\n';
    const auto [q, t] = colmap_pose(v);
    imgs << i + 1 << ' ' << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << ' ' << t.x() << ' '
         << t.y() << ' ' << t.z() << ' ' << i + 1 << ' ' << v.id << "\n\n";
  }

  std::size_t point_id = 1;
  const auto& cov = model.covisibility;
  for (std::size_t a = 0; a < cov.size(); ++a) {
    for (std::size_t b = a + 1; b < cov.size(); ++b) {
      const auto c = cov.counts()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (c <= 0) continue;
      const std::size_t ia = model.views.index_of(cov.ids()[a]) + 1;
      const std::size_t ib = model.views.index_of(cov.ids()[b]) + 1;
      for (std::int64_t n = 0; n < c; ++n) {
        pts << point_id++ << " 0 0 0 128 128 128 0 " << ia << " 0 " << ib << " 0\n";
      }
    }
  }
  write_text(dir / "cameras.txt", cams.str());
  write_text(dir / "images.txt", imgs.str());
  write_text(dir / "points3D.txt", pts.str());
}

// ---- meshes ---------------------------------------------------------------

TriangleMesh read_obj(const fs::path& path) {
  LineReader r(read_text(path), path.filename().string());
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  std::size_t dropped = 0;
  for (std::string line; r.next_record(line);) {
    const auto tok = split_ws(line);
    if (tok[0] == "v") {
      if (tok.size() < 4) r.fail("vertex needs three coordinates");
      vertices.emplace_back(to_double(tok[1], r), to_double(tok[2], r), to_double(tok[3], r));
    } else if (tok[0] == "f") {
      if (tok.size() < 4) r.fail("face needs at least three vertices");
      std::vector<int> face;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        const long long idx = to_int(tok[i].substr(0, tok[i].find('/')), r);
        const long long n = static_cast<long long>(vertices.size());
        const long long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || zero_based < 0 || zero_based >= n) r.fail("face index out of range");
        face.push_back(static_cast<int>(zero_based));
      }
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        const Eigen::Vector3i tri(face[0], face[i], face[i + 1]);
        const double area = 0.5 * (vertices[tri[1]] - vertices[tri[0]])
                                      .cross(vertices[tri[2]] - vertices[tri[0]])
                                      .norm();
        if (area < 1e-12) {
          ++dropped;
          continue;
        }
        triangles.push_back(tri);
      }
    }
  }
  if (dropped) spdlog::warn("{}: dropped {} zero-area faces", path.string(), dropped);
  return TriangleMesh(std::move(vertices), std::move(triangles));
}

void write_obj(const TriangleMesh& mesh, const fs::path& path) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles()) {
    out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  write_text(path, out.str());
}

// ---- selection manifests and run logs ---------------------------------------

namespace {

void check_manifest(const SelectionManifest& m) {
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < m.order.size(); ++i) {
    if (!seen.insert(m.order[i].view_id).second) {
      throw Error(ErrorCode::DuplicateId, "manifest lists view '" + m.order[i].view_id + "' twice");
    }
    if (i > 0 && m.order[i].step <= m.order[i - 1].step) {
      throw Error(ErrorCode::InvalidSpec, "manifest steps must be strictly increasing");
    }
    if (m.order[i].score && !std::isfinite(*m.order[i].score)) {
      throw Error(ErrorCode::InvalidSpec, "manifest score for '" + m.order[i].view_id + "' is not finite");
    }
  }
}

}  // namespace

std::string manifest_to_string(const SelectionManifest& manifest) {
  check_manifest(manifest);
  ordered_json config;
  try {
    config = ordered_json::parse(manifest.config_echo);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidSpec, std::string("config echo is not JSON: ") + e.what());
  }
  ordered_json doc;
  doc["v"] = kManifestVersion;
  doc["method"] = manifest.method;
  doc["seed"] = manifest.seed;
  doc["created_at"] = manifest.created_at;
  doc["config"] = std::move(config);
  ordered_json order = ordered_json::array();
  for (const auto& e : manifest.order) {
    ordered_json entry;
    entry["step"] = e.step;
    entry["view_id"] = e.view_id;
    if (e.score) entry["score"] = *e.score;
    order.push_back(std::move(entry));
  }
  doc["order"] = std::move(order);
  return doc.dump(2) + "\n";
}

void write_manifest(const SelectionManifest& manifest, const fs::path& path) {
  write_text(path, manifest_to_string(manifest));
}

SelectionManifest read_manifest(const fs::path& path) {
  const ordered_json doc = parse_json<ordered_json>(read_text(path), path.string());
  const std::string where = path.string();
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, where + ": manifest must be an object");
  if (!doc.contains("v") || !doc["v"].is_number_integer() || doc["v"].get<int>() != kManifestVersion) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                where + ": expected manifest version " + std::to_string(kManifestVersion) +
                    ", found " + (doc.contains("v") ? doc["v"].dump() : std::string("none")));
  }
  SelectionManifest m;
  try {
    m.method = doc.at("method").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.created_at = doc.at("created_at").get<std::string>();
    m.config_echo = doc.at("config").dump();
    for (const auto& e : doc.at("order")) {
      ManifestEntry entry;
      entry.step = e.at("step").get<std::size_t>();
      entry.view_id = e.at("view_id").get<std::string>();
      if (e.contains("score")) entry.score = e["score"].get<double>();
      m.order.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, where + ": " + e.what());
  }
  check_manifest(m);
  return m;
}

void write_run_log(const IgsResult& result, const fs::path& path) {
  std::string text;
  for (const auto& round : result.rounds) {
    std::map<std::string, std::string, std::less<>> relaxed_to;
    for (std::size_t i = 0; i < round.drawn.size(); ++i) {
      relaxed_to[round.drawn[i]] = i < round.relaxed.size() ? round.relaxed[i] : round.drawn[i];
    }
    for (const auto& id : round.ranking.worst_first()) {
      ordered_json rec;
      rec["round"] = round.round;
      rec["view_id"] = id;
      rec["score"] = round.scores.at(id);
      rec["rank"] = round.ranking.rank(id);
      const auto it = relaxed_to.find(id);
      rec["drawn"] = it != relaxed_to.end();
      rec["relaxed_to"] = it != relaxed_to.end() ? ordered_json(it->second) : ordered_json(nullptr);
      text += rec.dump() + "\n";
    }
  }
  write_text(path, text);
}

// ---- view sets --------------------------------------------------------------

std::string view_set_to_json(const ViewSet& set) {
  ordered_json doc;
  doc["v"] = 1;
  ordered_json views = ordered_json::array();
  for (const auto& v : set.views()) {
    ordered_json o;
    o["id"] = v.id;
    o["center"] = {v.center.x(), v.center.y(), v.center.z()};
    ordered_json r = ordered_json::array();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r.push_back(v.rotation(i, j));
    }
    o["rotation"] = std::move(r);
    if (v.intrinsics) {
      const auto& k = *v.intrinsics;
      o["intrinsics"] = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
                         {"width", k.width}, {"height", k.height}};
    }
    if (v.image_path) o["image_path"] = *v.image_path;
    views.push_back(std::move(o));
  }
  doc["views"] = std::move(views);
  doc["selected"] = set.selected();
  return doc.dump(2) + "\n";
}

ViewSet view_set_from_json(const std::string& text) {
  const json doc = parse_json<json>(text, "view set");
  if (!doc.is_object() || !doc.contains("v") || doc["v"] != 1) {
    throw Error(ErrorCode::SchemaVersionMismatch, "view set must carry \"v\": 1");
  }
  try {
    std::vector<CameraView> views;
    for (const auto& o : doc.at("views")) {
      CameraView v;
      v.id = o.at("id").get<std::string>();
      const auto c = o.at("center").get<std::vector<double>>();
      const auto r = o.at("rotation").get<std::vector<double>>();
      if (c.size() != 3 || r.size() != 9) {
        throw Error(ErrorCode::ParseError, "view '" + v.id + "' has a malformed pose");
      }
      v.center = Vec3(c[0], c[1], c[2]);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) v.rotation(i, j) = r[static_cast<std::size_t>(3 * i + j)];
      }
      if (o.contains("intrinsics")) {
        const auto& k = o["intrinsics"];
        v.intrinsics = Intrinsics{k.at("fx").get<double>(), k.at("fy").get<double>(),
                                  k.at("cx").get<double>(), k.at("cy").get<double>(),
                                  k.at("width").get<int>(),  k.at("height").get<int>()};
      }
      if (o.contains("image_path")) v.image_path = o["image_path"].get<std::string>();
      views.push_back(std::move(v));
    }
    return ViewSet(std::move(views), doc.value("selected", std::vector<std::string>{}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("view set: ") + e.what());
  }
}

// ---- coverage exports -------------------------------------------------------

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T> && sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw Error(ErrorCode::ParseError, "coverage file is truncated");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)])) << (8 * i);
  }
  pos += 8;
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

template <typename T>
void put_native_le(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

}  // namespace

void write_coverage_points(const CoverageField& field, const fs::path& path) {
  std::string out;
  const std::size_t m = field.samples.size();
  out.reserve(24 + 32 * m);
  put_le<std::uint64_t>(out, m);
  put_le<double>(out, field.samples.radius);
  put_le<double>(out, field.normalization);
  for (std::size_t l = 0; l < m; ++l) {
    const Vec3& p = field.samples.points[l];
    put_le<double>(out, p.x());
    put_le<double>(out, p.y());
    put_le<double>(out, p.z());
    put_le<double>(out, field.values[static_cast<Eigen::Index>(l)]);
  }
  write_text(path, out);
}

CoveragePoints read_coverage_points(const fs::path& path) {
  const std::string in = read_text(path);
  std::size_t pos = 0;
  CoveragePoints out;
  const auto m = get_le<std::uint64_t>(in, pos);
  out.radius = get_le<double>(in, pos);
  out.normalization = get_le<double>(in, pos);
  if (in.size() != 24 + 32 * m) throw Error(ErrorCode::ParseError, path.string() + ": size does not match header");
  out.points.reserve(m);
  out.raw.reserve(m);
  for (std::uint64_t l = 0; l < m; ++l) {
    const double x = get_le<double>(in, pos);
    const double y = get_le<double>(in, pos);
    const double z = get_le<double>(in, pos);
    out.points.emplace_back(x, y, z);
    out.raw.push_back(get_le<double>(in, pos));
  }
  return out;
}

std::array<std::uint8_t, 3> coverage_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> kAnchors = {{
      {68, 1, 84},     // 0.00
      {59, 82, 139},   // 0.25
      {33, 145, 140},  // 0.50
      {94, 201, 98},   // 0.75
      {253, 231, 37},  // 1.00
  }};
  t = std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0;
  const double s = t * 4.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(s), 3);
  const double f = s - static_cast<double>(i);
  std::array<std::uint8_t, 3> rgb{};
  for (std::size_t c = 0; c < 3; ++c) {
    rgb[c] = static_cast<std::uint8_t>(
        std::lround(kAnchors[i][c] + f * (kAnchors[i + 1][c] - kAnchors[i][c])));
  }
  return rgb;
}

void write_coverage_ply(const TriangleMesh& mesh, const CoverageField& field, const fs::path& path) {
  const auto& vertices = mesh.vertices();
  const auto& points = field.samples.points;
  const Eigen::VectorXd normalized = field.normalized();

  std::vector<float> value(vertices.size(), 0.0f);
  if (!points.empty()) {
    const double radius = field.samples.radius > 0.0 ? field.samples.radius : 1.0;
    const PointGrid grid(points, radius);
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      double sum = 0.0;
      std::size_t n = 0;
      grid.for_each_within(vertices[v], radius, [&](std::size_t l) {
        sum += normalized[static_cast<Eigen::Index>(l)];
        ++n;
      });
      if (n == 0) {
        std::size_t best = 0;
        for (std::size_t l = 1; l < points.size(); ++l) {
          if ((points[l] - vertices[v]).squaredNorm() < (points[best] - vertices[v]).squaredNorm()) best = l;
        }
        sum = normalized[static_cast<Eigen::Index>(best)];
        n = 1;
      }
      value[v] = static_cast<float>(sum / static_cast<double>(n));
    }
  }

  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n"
         << "comment coverage colormap: viridis anchors, linear\n"
         << "element vertex " << vertices.size() << "\n"
         << "property float x\nproperty float y\nproperty float z\n"
         << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
         << "property float coverage\n"
         << "element face " << mesh.triangle_count() << "\n"
         << "property list uchar int vertex_indices\nend_header\n";
  std::string out = header.str();
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    for (int a = 0; a < 3; ++a) put_native_le(out, static_cast<float>(vertices[v][a]));
    for (std::uint8_t c : coverage_color(value[v])) out.push_back(static_cast<char>(c));
    put_native_le(out, value[v]);
  }
  for (const auto& t : mesh.triangles()) {
    out.push_back(static_cast<char>(3));
    for (int a = 0; a < 3; ++a) put_native_le(out, static_cast<std::int32_t>(t[a]));
  }
  write_text(path, out);
}

}  // namespace viewdir
