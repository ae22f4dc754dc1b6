#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viewdir {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole intrinsics in pixels.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool operator==(const Intrinsics&) const = default;
};

/// One posed camera. `rotation` maps camera axes to world axes; the camera
/// looks down its local -z with +y up (OpenGL / NeRF-synthetic convention).
struct CameraView {
  std::string id;
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  std::optional<Intrinsics> intrinsics;
  std::optional<std::string> image_path;

  Vec3 forward() const { return -rotation.col(2); }
};

/// Throws InvalidCamera when the rotation is not orthonormal to 1e-6 or the
/// intrinsics are out of range.
void validate_camera(const CameraView& view);

/// Ordered pool of views plus the ordered selected subset S. Candidates are
/// the remaining views in pool order. Values are immutable; the with_* members
/// return modified copies.
class ViewSet {
 public:
  ViewSet() = default;
  /// Accepts any pool size (including empty); rejects duplicate ids and
  /// selections that are not in the pool or repeat an id.
  explicit ViewSet(std::vector<CameraView> views,
                   std::vector<std::string> selected = {});

  const std::vector<CameraView>& views() const { return views_; }
  std::size_t size() const { return views_.size(); }
  bool empty() const { return views_.empty(); }

  const std::vector<std::string>& selected() const { return selected_; }
  std::vector<std::string> candidates() const;
  std::vector<std::size_t> selected_indices() const;
  std::vector<std::size_t> candidate_indices() const;
  std::size_t candidate_count() const { return views_.size() - selected_.size(); }

  bool contains(std::string_view id) const;
  bool is_selected(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  const CameraView& view(std::string_view id) const;

  ViewSet with_selection(std::vector<std::string> selected) const;
  ViewSet with_appended(std::span<const std::string> ids) const;
  ViewSet with_views(std::vector<CameraView> views) const;

 private:
  std::vector<CameraView> views_;
  std::vector<std::string> selected_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<char> selected_mask_;
};

/// Pool constructor used by the samplers: at least two views, unique ids,
/// every camera valid, empty selection.
ViewSet build_view_set(std::vector<CameraView> views);

/// Moves every center to (c - origin) / |c - origin|. Rotations, intrinsics
/// and the selection are carried over unchanged.
ViewSet project_to_unit_sphere(const ViewSet& set, const Vec3& origin);

/// True when every center lies at the same distance from `origin`
/// (relative tolerance `rel_tol`).
bool on_common_sphere(const ViewSet& set, const Vec3& origin, double rel_tol = 1e-6);

/// Symmetric co-visibility counts between views: entry (i, j) is the number of
/// sparse 3D points whose track contains both views. The diagonal is ignored.
class CovisibilityMatrix {
 public:
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  CovisibilityMatrix() = default;
  CovisibilityMatrix(std::vector<std::string> ids, Counts counts);

  const std::vector<std::string>& ids() const { return ids_; }
  const Counts& counts() const { return counts_; }
  std::size_t size() const { return ids_.size(); }
  bool contains(std::string_view id) const;
  std::size_t row(std::string_view id) const;
  std::int64_t count(std::string_view a, std::string_view b) const;
  /// Maximum over i != j; zero for matrices smaller than 2x2.
  std::int64_t off_diagonal_max() const { return off_diagonal_max_; }

 private:
  std::vector<std::string> ids_;
  Counts counts_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::int64_t off_diagonal_max_ = 0;
};

/// Per-view quality, higher is better (PSNR-like).
struct QualityReport {
  std::map<std::string, double, std::less<>> scores;

  /// Throws EvaluatorFailure when the id has no score.
  double at(std::string_view id) const;
  /// Throws EvaluatorFailure naming the first id with a missing or
  /// non-finite score.
  void require_complete(std::span<const std::string> ids) const;
};

}  // namespace viewdir
