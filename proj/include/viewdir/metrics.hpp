#pragma once

#include "viewdir/error.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string_view>

namespace viewdir {

enum class SpatialMetric { GreatCircle, Euclidean };

/// Combined view distance: spatial term plus photo_weight times the
/// co-visibility dissimilarity.
struct DistanceSpec {
  SpatialMetric spatial = SpatialMetric::Euclidean;
  double photo_weight = 0.0;
  std::shared_ptr<const CovisibilityMatrix> covisibility;
  /// When set, resolve_spatial_scale() divides the spatial term by its
  /// maximum over the pool.
  bool normalize_spatial = false;
  double spatial_scale = 1.0;

  /// Throws InvalidSpec for negative/non-finite weights or a positive
  /// photo_weight without a co-visibility matrix.
  void validate() const;
};

/// Angle between two unit vectors, in radians. The dot product is clamped to
/// [-1, 1] so rounding never produces NaN.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar great_circle_distance(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar tol(1e-6);
  if (std::abs(a.norm() - Scalar(1)) > tol || std::abs(b.norm() - Scalar(1)) > tol) {
    throw Error(ErrorCode::NotUnit, "great-circle distance needs unit vectors");
  }
  const Scalar d = std::clamp(a.dot(b), Scalar(-1), Scalar(1));
  return std::acos(d);
}

/// Squared Euclidean distance. Not a metric (no triangle inequality).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar squared_euclidean_distance(const Eigen::MatrixBase<DerivedA>& a,
                                                     const Eigen::MatrixBase<DerivedB>& b) {
  return (a - b).squaredNorm();
}

/// 1 - A_ij / max_{i != j} A. Throws EmptyCovisibility when every
/// off-diagonal count is zero and UnknownView for unindexed ids.
double photogrammetric_distance(std::string_view a, std::string_view b,
                                const CovisibilityMatrix& covisibility);

double spatial_distance(const Vec3& a, const Vec3& b, SpatialMetric metric);

/// d_spatial(u, v) / spatial_scale + photo_weight * d_photo(u, v); zero for
/// identical ids. The photo term is skipped entirely when photo_weight is 0.
double view_distance(const CameraView& u, const CameraView& v, const DistanceSpec& spec);

/// Returns `spec` with spatial_scale set to the largest pairwise spatial
/// distance over the pool when normalize_spatial is on (unchanged otherwise).
DistanceSpec resolve_spatial_scale(const ViewSet& pool, DistanceSpec spec);

}  // namespace viewdir
