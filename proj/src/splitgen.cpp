#include "viewdir/splitgen.hpp"

#include "viewdir/error.hpp"
#include "viewdir/fvs.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdio>

namespace viewdir {

Mat3 look_at_rotation(const Vec3& eye, const Vec3& target) {
  const Vec3 axis = target - eye;
  if (!(axis.norm() > 1e-12)) {
    throw Error(ErrorCode::InvalidCamera, "look-at target coincides with the camera center");
  }
  const Vec3 forward = axis.normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitY());
  right.normalize();
  const Vec3 up = right.cross(forward);
  Mat3 r;
  r.col(0) = right;
  r.col(1) = up;
  r.col(2) = -forward;
  return r;
}

std::vector<CameraView> uniform_sphere_poses(std::size_t count, double radius, const Vec3& center,
                                             const std::optional<Intrinsics>& intrinsics,
                                             const std::optional<Vec3>& look_at) {
  if (count == 0) throw Error(ErrorCode::InvalidSpec, "pose count must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidSpec, "sphere radius must be finite and > 0");
  }
  const Vec3 target = look_at.value_or(center);
  const int width = count > 1000 ? 5 : 3;
  std::vector<CameraView> views;
  views.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "uniform_%0*zu", width, i);
    CameraView v;
    v.id = id;
    v.center = center + radius * fibonacci_point(i, count);
    v.rotation = look_at_rotation(v.center, target);
    v.intrinsics = intrinsics;
    views.push_back(std::move(v));
  }
  return views;
}

Split fvs_resplit(const ViewSet& pool, std::size_t count, const DistanceSpec& spec,
                  std::uint64_t seed) {
  if (count == 0) throw Error(ErrorCode::InvalidSpec, "test count must be >= 1");
  if (count >= pool.size()) {
    throw Error(ErrorCode::BudgetExceedsPool, "test count " + std::to_string(count) +
                                                  " leaves no training views in a pool of " +
                                                  std::to_string(pool.size()));
  }
  FvsConfig cfg;
  cfg.target_n = count;
  cfg.initial_k = std::clamp<std::size_t>(pool.selected().size(), 1, count);
  cfg.seed = seed;
  cfg.spec = spec;
  const ViewSet picked = fvs_select(pool, cfg);
  return Split{picked.selected(), picked.candidates()};
}

std::vector<CameraView> rotate_about_z(std::span<const CameraView> views, double angle,
                                       const Vec3& origin) {
  const Mat3 rz = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  std::vector<CameraView> out(views.begin(), views.end());
  for (auto& v : out) {
    v.center = origin + rz * (v.center - origin);
    v.rotation = rz * v.rotation;
  }
  return out;
}

}  // namespace viewdir
