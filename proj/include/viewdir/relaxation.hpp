#pragma once

#include "viewdir/random.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Geometry>

#include <set>
#include <span>
#include <string>
#include <vector>

namespace viewdir {

enum class LloydDomain { Sphere, ConvexHull };

struct LloydConfig {
  LloydDomain domain = LloydDomain::Sphere;
  std::size_t n_iter = 8;
  std::size_t support_samples = 20000;
  std::uint64_t seed = 0;

  /// Throws InvalidSpec when n_iter == 0 or support_samples < 10 * centers.
  void validate(std::size_t centers) const;
};

/// Convex hull of a 3D point set as outward half-spaces n.x <= d.
class ConvexHull {
 public:
  /// Incremental construction. Throws DegenerateHull for fewer than four
  /// points or (near-)coplanar input.
  static ConvexHull build(std::span<const Vec3> points);

  bool contains(const Vec3& p, double tol = 0.0) const;
  const Eigen::AlignedBox3d& bounds() const { return bounds_; }
  std::size_t facet_count() const { return normals_.size(); }
  double volume() const { return volume_; }

 private:
  std::vector<Vec3> normals_;
  std::vector<double> offsets_;
  Eigen::AlignedBox3d bounds_;
  double volume_ = 0.0;
};

/// Uniform points over the support domain: the unit sphere (normalised
/// Gaussians) or the convex hull of all camera centers (rejection sampling
/// in the hull's bounding box).
std::vector<Vec3> sample_support(const ViewSet& all_views, const LloydConfig& cfg, Rng& rng);

struct LloydResult {
  std::vector<Vec3> positions;
  /// Quantization energy before the first iteration and after each one.
  std::vector<double> energy;
};

/// Sum over atoms of the squared distance to the nearest center among
/// fixed and proposals.
double quantization_energy(std::span<const Vec3> fixed, std::span<const Vec3> proposals,
                           std::span<const Vec3> support);

/// Discrete Lloyd iterations that move only the proposals. Each atom is
/// assigned to its nearest center (fixed centers win ties, then lower index);
/// each proposal moves to the mean of its atoms, renormalised for the sphere
/// domain. Empty cells and zero means keep the previous position.
LloydResult lloyd_relax(std::span<const Vec3> fixed, std::span<const Vec3> proposals,
                        std::span<const Vec3> support, const LloydConfig& cfg);

/// Maps relaxed positions to distinct unselected views, greedily in input
/// order: each position takes the nearest still-available view (ties to the
/// smaller id). Throws PoolExhausted when positions outnumber available views.
std::vector<std::string> snap_to_candidates(std::span<const Vec3> relaxed,
                                            std::span<const CameraView> pool,
                                            const std::set<std::string, std::less<>>& already);

}  // namespace viewdir
