#pragma once

#include "viewdir/mesh.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace viewdir {

/// Area-weighted random points on the mesh: a triangle is chosen with
/// probability proportional to its area, then a uniform barycentric point.
/// Throws EmptyMesh for a mesh without triangles and InvalidSpec for
/// count == 0 or radius <= 0.
SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t count, double radius,
                              std::uint64_t seed);

/// Twice the mean nearest-neighbour distance among the points. Needs at least
/// two points.
double default_ball_radius(std::span<const Vec3> points);

/// Uniform hash grid over a point set for fixed-radius queries.
class PointGrid {
 public:
  PointGrid(std::span<const Vec3> points, double cell_size);

  /// Calls visit(index) for every point within `radius` of `query`.
  template <typename Visitor>
  void for_each_within(const Vec3& query, double radius, Visitor&& visit) const;

  std::size_t count_within(const Vec3& query, double radius) const;

 private:
  struct Key {
    std::int64_t x, y, z;
    bool operator<(const Key& o) const {
      return x != o.x ? x < o.x : (y != o.y ? y < o.y : z < o.z);
    }
    bool operator==(const Key&) const = default;
  };
  Key key_of(const Vec3& p) const;
  std::pair<std::size_t, std::size_t> cell_range(const Key& k) const;

  std::span<const Vec3> points_;
  double cell_;
  std::vector<Key> keys_;           // sorted, one per non-empty cell
  std::vector<std::size_t> start_;  // offsets into order_, size keys_+1
  std::vector<std::size_t> order_;
};

/// One ray per pixel center on a `stride` grid ((stride - 1) pixels skipped
/// in each direction). Throws MissingIntrinsics.
std::vector<Ray> camera_rays(const CameraView& view, int stride);

enum class CoverageNormalization {
  MaxCount,   // largest raw value, so normalized values lie in [0, 1]
  TotalHits,  // number of first hits (times stride^2)
  RayBudget,  // number of rays cast (times stride^2)
};

struct CoverageOptions {
  int stride = 4;
  CoverageNormalization normalization = CoverageNormalization::MaxCount;
  unsigned jobs = 1;
};

/// Per-sample count of first ray/mesh hits inside the sample's ball.
struct CoverageField {
  SurfaceSamples samples;
  Eigen::VectorXd values;    // raw counts, scaled by stride^2
  double normalization = 1.0;
  std::size_t rays_cast = 0;
  std::size_t hits = 0;
  int stride = 1;

  Eigen::VectorXd normalized() const { return values / normalization; }
};

/// Casts every (strided) pixel ray of every view, keeps first hits and counts,
/// for each surface sample, the hits within the sample radius. Results do not
/// depend on `jobs`.
CoverageField coverage_measure(const TriangleMesh& mesh, const SurfaceSamples& samples,
                               std::span<const CameraView> views,
                               const CoverageOptions& options = {});

struct CoverageDifference {
  Eigen::VectorXd values;  // |a - b| of normalized fields
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  /// sqrt((var(a) + var(b)) / 2) of the normalized fields.
  double pooled_sigma = 0.0;
  double mean_in_sigma = 0.0;
  double max_in_sigma = 0.0;
};

/// Throws SampleMismatch when the fields were computed on different samples.
CoverageDifference coverage_difference(const CoverageField& a, const CoverageField& b);

/// Population variance of the normalized values (0 for fewer than 2 samples).
double coverage_variance(const CoverageField& field);

template <typename Visitor>
void PointGrid::for_each_within(const Vec3& query, double radius, Visitor&& visit) const {
  const double r2 = radius * radius;
  const Key lo = key_of(query - Vec3::Constant(radius));
  const Key hi = key_of(query + Vec3::Constant(radius));
  for (std::int64_t x = lo.x; x <= hi.x; ++x) {
    for (std::int64_t y = lo.y; y <= hi.y; ++y) {
      for (std::int64_t z = lo.z; z <= hi.z; ++z) {
        const auto [begin, end] = cell_range(Key{x, y, z});
        for (std::size_t i = begin; i < end; ++i) {
          const std::size_t idx = order_[i];
          if ((points_[idx] - query).squaredNorm() <= r2) visit(idx);
        }
      }
    }
  }
}

}  // namespace viewdir
