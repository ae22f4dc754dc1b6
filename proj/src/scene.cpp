#include "viewdir/scene.hpp"

#include "viewdir/error.hpp"

#include <cmath>
#include <set>

namespace viewdir {

void validate_camera(const CameraView& view) {
  const Mat3 gram = view.rotation.transpose() * view.rotation;
  const double deviation = (gram - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(deviation < 1e-6)) {
    throw Error(ErrorCode::InvalidCamera,
                "rotation of view '" + view.id + "' is not orthonormal");
  }
  if (!view.center.allFinite()) {
    throw Error(ErrorCode::InvalidCamera, "center of view '" + view.id + "' is not finite");
  }
  if (view.intrinsics) {
    const Intrinsics& k = *view.intrinsics;
    const bool ok = k.fx > 0.0 && k.fy > 0.0 && k.width > 0 && k.height > 0 &&
                    k.cx > 0.0 && k.cx < k.width && k.cy > 0.0 && k.cy < k.height;
    if (!ok) {
      throw Error(ErrorCode::InvalidCamera,
                  "intrinsics of view '" + view.id + "' are out of range");
    }
  }
}

ViewSet::ViewSet(std::vector<CameraView> views, std::vector<std::string> selected)
    : views_(std::move(views)) {
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (!index_.emplace(views_[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, "view id '" + views_[i].id + "' appears twice");
    }
  }
  selected_mask_.assign(views_.size(), 0);
  selected_.reserve(selected.size());
  for (auto& id : selected) {
    const std::size_t i = index_of(id);
    if (selected_mask_[i]) {
      throw Error(ErrorCode::DuplicateId, "view id '" + id + "' selected twice");
    }
    selected_mask_[i] = 1;
    selected_.push_back(std::move(id));
  }
}

std::vector<std::string> ViewSet::candidates() const {
  std::vector<std::string> out;
  out.reserve(candidate_count());
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (!selected_mask_[i]) out.push_back(views_[i].id);
  }
  return out;
}

std::vector<std::size_t> ViewSet::selected_indices() const {
  std::vector<std::size_t> out;
  out.reserve(selected_.size());
  for (const auto& id : selected_) out.push_back(index_.find(id)->second);
  return out;
}

std::vector<std::size_t> ViewSet::candidate_indices() const {
  std::vector<std::size_t> out;
  out.reserve(candidate_count());
  for (std::size_t i = 0; i < views_.size(); ++i) {
    if (!selected_mask_[i]) out.push_back(i);
  }
  return out;
}

bool ViewSet::contains(std::string_view id) const { return index_.find(id) != index_.end(); }

bool ViewSet::is_selected(std::string_view id) const {
  auto it = index_.find(id);
  return it != index_.end() && selected_mask_[it->second];
}

std::size_t ViewSet::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownView, "no view with id '" + std::string(id) + "'");
  }
  return it->second;
}

const CameraView& ViewSet::view(std::string_view id) const { return views_[index_of(id)]; }

ViewSet ViewSet::with_selection(std::vector<std::string> selected) const {
  return ViewSet(views_, std::move(selected));
}

ViewSet ViewSet::with_appended(std::span<const std::string> ids) const {
  std::vector<std::string> selected = selected_;
  selected.insert(selected.end(), ids.begin(), ids.end());
  return ViewSet(views_, std::move(selected));
}

ViewSet ViewSet::with_views(std::vector<CameraView> views) const {
  return ViewSet(std::move(views), selected_);
}

ViewSet build_view_set(std::vector<CameraView> views) {
  if (views.size() < 2) {
    throw Error(ErrorCode::TooFewViews,
                "need at least 2 views, got " + std::to_string(views.size()));
  }
  for (const auto& v : views) validate_camera(v);
  return ViewSet(std::move(views));
}

ViewSet project_to_unit_sphere(const ViewSet& set, const Vec3& origin) {
  std::vector<CameraView> views = set.views();
  for (auto& v : views) {
    const Vec3 offset = v.center - origin;
    const double norm = offset.norm();
    if (!(norm > 1e-9)) {
      throw Error(ErrorCode::DegenerateCenter,
                  "view '" + v.id + "' coincides with the projection origin");
    }
    v.center = offset / norm;
  }
  return set.with_views(std::move(views));
}

bool on_common_sphere(const ViewSet& set, const Vec3& origin, double rel_tol) {
  if (set.empty()) return true;
  const double r0 = (set.views().front().center - origin).norm();
  if (!(r0 > 1e-9)) return false;
  for (const auto& v : set.views()) {
    if (std::abs((v.center - origin).norm() - r0) > rel_tol * r0) return false;
  }
  return true;
}

CovisibilityMatrix::CovisibilityMatrix(std::vector<std::string> ids, Counts counts)
    : ids_(std::move(ids)), counts_(std::move(counts)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (counts_.rows() != n || counts_.cols() != n) {
    throw Error(ErrorCode::InvalidSpec, "co-visibility matrix shape does not match id count");
  }
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::DuplicateId, "co-visibility id '" + ids_[i] + "' appears twice");
    }
  }
  if (counts_.size() > 0 && counts_.minCoeff() < 0) {
    throw Error(ErrorCode::InvalidSpec, "co-visibility counts must be non-negative");
  }
  if (counts_ != counts_.transpose()) {
    throw Error(ErrorCode::InvalidSpec, "co-visibility matrix is not symmetric");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      off_diagonal_max_ = std::max(off_diagonal_max_, counts_(i, j));
    }
  }
}

bool CovisibilityMatrix::contains(std::string_view id) const {
  return index_.find(id) != index_.end();
}

std::size_t CovisibilityMatrix::row(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::UnknownView,
                "view '" + std::string(id) + "' is not indexed in the co-visibility matrix");
  }
  return it->second;
}

std::int64_t CovisibilityMatrix::count(std::string_view a, std::string_view b) const {
  return counts_(static_cast<Eigen::Index>(row(a)), static_cast<Eigen::Index>(row(b)));
}

double QualityReport::at(std::string_view id) const {
  auto it = scores.find(id);
  if (it == scores.end()) {
    throw Error(ErrorCode::EvaluatorFailure, "no score for view '" + std::string(id) + "'");
  }
  return it->second;
}

void QualityReport::require_complete(std::span<const std::string> ids) const {
  for (const auto& id : ids) {
    auto it = scores.find(id);
    if (it == scores.end()) {
      throw Error(ErrorCode::EvaluatorFailure, "evaluator returned no score for '" + id + "'");
    }
    if (!std::isfinite(it->second)) {
      throw Error(ErrorCode::EvaluatorFailure, "evaluator returned a non-finite score for '" + id + "'");
    }
  }
}

}  // namespace viewdir
