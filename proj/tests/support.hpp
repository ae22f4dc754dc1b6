#pragma once

// Independent reference implementations used as oracles by the tests. Nothing
// here calls into the library code under test except for plain data types.

#include "viewdir/mesh.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Geometry>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing {

using viewdir::Vec3;

inline viewdir::Intrinsics small_intrinsics(int w = 8, int h = 8, double f = 8.0) {
  return {f, f, w / 2.0, h / 2.0, w, h};
}

inline viewdir::CameraView make_view(const std::string& id, const Vec3& center,
                                     const viewdir::Mat3& rotation = viewdir::Mat3::Identity()) {
  viewdir::CameraView v;
  v.id = id;
  v.center = center;
  v.rotation = rotation;
  return v;
}

inline std::string pad_id(const std::string& prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%04zu", prefix.c_str(), i);
  return buf;
}

inline viewdir::ViewSet pool_from(const std::vector<Vec3>& centers, const std::string& prefix = "v") {
  std::vector<viewdir::CameraView> views;
  for (std::size_t i = 0; i < centers.size(); ++i) views.push_back(make_view(pad_id(prefix, i), centers[i]));
  return viewdir::ViewSet(std::move(views));
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-9) return v.normalized();
  }
}

inline std::vector<Vec3> random_cube(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng), u(rng));
  return out;
}

/// Textbook Moller-Trumbore without any acceleration, written separately from
/// the library version.
inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = d.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = o - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = d.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t > 1e-9) return t;
  return std::nullopt;
}

struct BruteHit {
  int triangle = -1;
  double t = 0.0;
};

/// Scan every triangle; the smallest t wins, ties to the smaller index.
inline std::optional<BruteHit> brute_first_hit(const Vec3& o, const Vec3& d, const viewdir::TriangleMesh& mesh) {
  std::optional<BruteHit> best;
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const auto t = ray_triangle(o, d, mesh.corner(i, 0), mesh.corner(i, 1), mesh.corner(i, 2));
    if (t && (!best || *t < best->t)) best = BruteHit{static_cast<int>(i), *t};
  }
  return best;
}

/// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS p-value of `x` against U(0, 1) (asymptotic, with the
/// Stephens small-sample correction).
inline double ks_uniform_pvalue(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max(d, std::max((i + 1) / n - x[i], x[i] - i / n));
  }
  const double sn = std::sqrt(n);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

/// Pearson chi-squared p-value of observed counts against expected counts.
inline double chi2_pvalue(const std::vector<double>& observed, const std::vector<double>& expected,
                          int dof_reduction = 1) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  const boost::math::chi_squared dist(static_cast<double>(observed.size()) - dof_reduction);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("viewdir_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

/// Camera on a circle/sphere looking at the origin (+z up), built without
/// the library's look-at helper.
inline viewdir::CameraView aimed_view(const std::string& id, const Vec3& center, const viewdir::Intrinsics& k) {
  const Vec3 f = (-center).normalized();
  Vec3 right = f.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = f.cross(Vec3::UnitY());
  right.normalize();
  viewdir::Mat3 r;
  r.col(0) = right;
  r.col(1) = right.cross(f);
  r.col(2) = -f;
  viewdir::CameraView v = make_view(id, center, r);
  v.intrinsics = k;
  return v;
}

/// Figure-eight band around the equator: azimuth sweeps the full circle
/// twice per loop while the elevation swings +-`amplitude`, with a small
/// random jitter on both angles.
inline std::vector<Vec3> lemniscate_band(std::size_t n, double radius, double amplitude, double jitter,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double phase = M_PI * u(rng);
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n) + phase;
    const double s = std::sin(t), c = std::cos(t);
    const double az = M_PI * c / (1.0 + s * s) + jitter * u(rng);
    const double el = amplitude * 2.0 * s * c / (1.0 + s * s) + jitter * u(rng);
    out.push_back(radius * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)));
  }
  return out;
}

/// Uniformly random rotation (quaternion from four Gaussians).
inline viewdir::Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace testing
