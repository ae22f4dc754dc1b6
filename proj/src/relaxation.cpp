#include "viewdir/relaxation.hpp"

#include "viewdir/error.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace viewdir {

void LloydConfig::validate(std::size_t centers) const {
  if (n_iter == 0) throw Error(ErrorCode::InvalidSpec, "Lloyd needs at least one iteration");
  if (support_samples < 10 * centers) {
    throw Error(ErrorCode::InvalidSpec,
                "support_samples must be at least 10x the number of centers (" +
                    std::to_string(10 * centers) + ")");
  }
}

namespace {

struct Face {
  int a, b, c;
  Vec3 normal;
  double offset;
};

Face make_face(std::span<const Vec3> pts, int a, int b, int c, const Vec3& interior) {
  Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  n.normalize();
  Face f{a, b, c, n, n.dot(pts[a])};
  if (f.normal.dot(interior) > f.offset) {
    std::swap(f.b, f.c);
    f.normal = -f.normal;
    f.offset = -f.offset;
  }
  return f;
}

}  // namespace

ConvexHull ConvexHull::build(std::span<const Vec3> points) {
  if (points.size() < 4) {
    throw Error(ErrorCode::DegenerateHull, "convex hull needs at least four points");
  }
  Eigen::MatrixXd centered(points.size(), 3);
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) centered.row(i) = (points[i] - mean).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  const Vec3 sv = svd.singularValues();
  if (!(sv[0] > 0.0) || sv[2] <= 1e-9 * sv[0]) {
    throw Error(ErrorCode::DegenerateHull, "camera centers are coplanar or collinear");
  }

  const double scale = sv[0] / std::sqrt(static_cast<double>(points.size()));
  const double eps = 1e-12 * std::max(1.0, scale + mean.norm());
  const int n = static_cast<int>(points.size());

  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    if (points[i].x() < points[i0].x()) i0 = i;
  }
  int i1 = i0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (points[i] - points[i0]).squaredNorm();
    if (d > best) best = d, i1 = i;
  }
  const Vec3 axis = (points[i1] - points[i0]).normalized();
  int i2 = i0;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 off = points[i] - points[i0];
    const double d = (off - off.dot(axis) * axis).squaredNorm();
    if (d > best) best = d, i2 = i;
  }
  const Vec3 plane = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = i0;
  best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(plane.dot(points[i] - points[i0]));
    if (d > best) best = d, i3 = i;
  }
  const Vec3 interior = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

  std::vector<Face> faces = {
      make_face(points, i0, i1, i2, interior), make_face(points, i0, i1, i3, interior),
      make_face(points, i0, i2, i3, interior), make_face(points, i1, i2, i3, interior)};

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<char> visible(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (faces[f].normal.dot(points[p]) - faces[f].offset > eps) visible[f] = 1, any = true;
    }
    if (!any) continue;

    std::map<std::pair<int, int>, int> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const Face& fc = faces[f];
      ++edges[{fc.a, fc.b}];
      ++edges[{fc.b, fc.c}];
      ++edges[{fc.c, fc.a}];
    }
    std::vector<Face> next;
    next.reserve(faces.size() + 8);
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) next.push_back(faces[f]);
    }
    for (const auto& [edge, count] : edges) {
      if (edges.count({edge.second, edge.first})) continue;
      next.push_back(make_face(points, edge.first, edge.second, p, interior));
    }
    faces = std::move(next);
  }

  ConvexHull hull;
  for (const auto& f : faces) {
    hull.normals_.push_back(f.normal);
    hull.offsets_.push_back(f.offset);
    hull.volume_ += std::abs((points[f.a] - interior)
                                 .dot((points[f.b] - interior).cross(points[f.c] - interior))) /
                    6.0;
  }
  for (const auto& p : points) hull.bounds_.extend(p);
  return hull;
}

bool ConvexHull::contains(const Vec3& p, double tol) const {
  for (std::size_t f = 0; f < normals_.size(); ++f) {
    if (normals_[f].dot(p) - offsets_[f] > tol) return false;
  }
  return true;
}

std::vector<Vec3> sample_support(const ViewSet& all_views, const LloydConfig& cfg, Rng& rng) {
  std::vector<Vec3> centers;
  centers.reserve(all_views.size());
  for (const auto& v : all_views.views()) centers.push_back(v.center);

  std::vector<Vec3> out;
  out.reserve(cfg.support_samples);
  if (cfg.domain == LloydDomain::Sphere) {
    for (const auto& c : centers) {
      if (std::abs(c.norm() - 1.0) > 1e-6) {
        throw Error(ErrorCode::NotOnSphere, "sphere support needs unit-norm camera centers");
      }
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (out.size() < cfg.support_samples) {
      Vec3 g(gauss(rng), gauss(rng), gauss(rng));
      const double norm = g.norm();
      if (norm < 1e-12) continue;
      out.push_back(g / norm);
    }
    return out;
  }

  const ConvexHull hull = ConvexHull::build(centers);
  const Eigen::AlignedBox3d& box = hull.bounds();
  const std::size_t max_attempts = 1000 * cfg.support_samples + 1000;
  for (std::size_t attempt = 0; out.size() < cfg.support_samples; ++attempt) {
    if (attempt >= max_attempts) {
      throw Error(ErrorCode::DegenerateHull, "hull volume is too thin to sample");
    }
    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      p[k] = box.min()[k] + uniform01(rng) * (box.max()[k] - box.min()[k]);
    }
    if (hull.contains(p)) out.push_back(p);
  }
  return out;
}

namespace {

// Index of the nearest center; fixed centers precede proposals, ties keep
// the earlier index.
std::size_t nearest_center(const Vec3& x, std::span<const Vec3> fixed,
                           std::span<const Vec3> proposals, double& dist2) {
  std::size_t best = 0;
  dist2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const double d = (x - fixed[i]).squaredNorm();
    if (d < dist2) dist2 = d, best = i;
  }
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const double d = (x - proposals[i]).squaredNorm();
    if (d < dist2) dist2 = d, best = fixed.size() + i;
  }
  return best;
}

}  // namespace

double quantization_energy(std::span<const Vec3> fixed, std::span<const Vec3> proposals,
                           std::span<const Vec3> support) {
  double energy = 0.0;
  for (const auto& x : support) {
    double d2 = 0.0;
    nearest_center(x, fixed, proposals, d2);
    energy += d2;
  }
  return energy;
}

LloydResult lloyd_relax(std::span<const Vec3> fixed, std::span<const Vec3> proposals,
                        std::span<const Vec3> support, const LloydConfig& cfg) {
  if (fixed.empty() && proposals.empty()) {
    throw Error(ErrorCode::InvalidSpec, "Lloyd relaxation needs at least one center");
  }
  if (support.empty()) throw Error(ErrorCode::InvalidSpec, "Lloyd relaxation needs support atoms");
  if (cfg.n_iter == 0) throw Error(ErrorCode::InvalidSpec, "Lloyd needs at least one iteration");

  LloydResult result;
  result.positions.assign(proposals.begin(), proposals.end());
  result.energy.reserve(cfg.n_iter + 1);

  std::vector<Vec3> sums(proposals.size());
  std::vector<std::size_t> counts(proposals.size());
  for (std::size_t iter = 0;; ++iter) {
    std::fill(sums.begin(), sums.end(), Vec3::Zero());
    std::fill(counts.begin(), counts.end(), 0);
    double energy = 0.0;
    for (const auto& x : support) {
      double d2 = 0.0;
      const std::size_t c = nearest_center(x, fixed, result.positions, d2);
      energy += d2;
      if (c >= fixed.size()) {
        sums[c - fixed.size()] += x;
        ++counts[c - fixed.size()];
      }
    }
    result.energy.push_back(energy);
    if (iter == cfg.n_iter) break;

    for (std::size_t i = 0; i < result.positions.size(); ++i) {
      if (counts[i] == 0) continue;
      Vec3 mean = sums[i] / static_cast<double>(counts[i]);
      if (cfg.domain == LloydDomain::Sphere) {
        const double norm = mean.norm();
        if (!(norm > 1e-12)) continue;
        mean /= norm;
      }
      result.positions[i] = mean;
    }
  }
  return result;
}

std::vector<std::string> snap_to_candidates(std::span<const Vec3> relaxed,
                                            std::span<const CameraView> pool,
                                            const std::set<std::string, std::less<>>& already) {
  std::vector<char> available(pool.size(), 0);
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!already.count(pool[i].id)) available[i] = 1, ++free_count;
  }
  if (relaxed.size() > free_count) {
    throw Error(ErrorCode::PoolExhausted, "more relaxed positions than unselected candidates");
  }
  std::vector<std::string> out;
  out.reserve(relaxed.size());
  for (const auto& p : relaxed) {
    std::size_t best = pool.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!available[i]) continue;
      const double d = (pool[i].center - p).squaredNorm();
      if (d < best_d || (d == best_d && pool[i].id < pool[best].id)) best_d = d, best = i;
    }
    available[best] = 0;
    out.push_back(pool[best].id);
  }
  return out;
}

}  // namespace viewdir
