#pragma once

#include "viewdir/metrics.hpp"
#include "viewdir/scene.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace viewdir {

/// Point i of the n-point spherical Fibonacci lattice on the unit sphere:
/// z = 1 - (2i + 1) / n, azimuth i times the golden angle.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 1> fibonacci_point(std::size_t i, std::size_t n) {
  const Scalar golden_angle = std::numbers::pi_v<Scalar> * (Scalar(3) - std::sqrt(Scalar(5)));
  const Scalar z = Scalar(1) - (Scalar(2) * Scalar(i) + Scalar(1)) / Scalar(n);
  const Scalar r = std::sqrt(std::max(Scalar(0), Scalar(1) - z * z));
  const Scalar phi = golden_angle * Scalar(i);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

template <typename Scalar = double>
std::vector<Eigen::Matrix<Scalar, 3, 1>> fibonacci_sphere(std::size_t n) {
  std::vector<Eigen::Matrix<Scalar, 3, 1>> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) points.push_back(fibonacci_point<Scalar>(i, n));
  return points;
}

/// Camera-to-world rotation whose optical axis (-z) points from `eye` to
/// `target`, with +z as the up hint (+y when the axis is parallel to z).
/// Throws InvalidCamera when eye == target.
Mat3 look_at_rotation(const Vec3& eye, const Vec3& target);

/// `count` cameras on the Fibonacci lattice of radius `radius` about `center`,
/// each aimed at `look_at` (defaults to `center`). Ids are "uniform_000", ...
/// Intrinsics are copied from `intrinsics`.
std::vector<CameraView> uniform_sphere_poses(std::size_t count, double radius, const Vec3& center,
                                             const std::optional<Intrinsics>& intrinsics,
                                             const std::optional<Vec3>& look_at = std::nullopt);

struct Split {
  std::vector<std::string> test;   // in selection order
  std::vector<std::string> train;  // in pool order
};

/// Picks `count` test views by farthest view sampling (one random start
/// drawn from `seed`, or the views already selected in `pool`) and puts the
/// rest in train. Throws BudgetExceedsPool when count >= |pool| and
/// InvalidSpec when count == 0.
Split fvs_resplit(const ViewSet& pool, std::size_t count, const DistanceSpec& spec,
                  std::uint64_t seed);

/// Rotates every center and camera orientation about the world z axis
/// through `origin`.
std::vector<CameraView> rotate_about_z(std::span<const CameraView> views, double angle,
                                       const Vec3& origin = Vec3::Zero());

}  // namespace viewdir
