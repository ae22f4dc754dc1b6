#include "viewdir/metrics.hpp"

namespace viewdir {

void DistanceSpec::validate() const {
  if (!std::isfinite(photo_weight) || photo_weight < 0.0) {
    throw Error(ErrorCode::InvalidSpec, "photo weight must be finite and >= 0");
  }
  if (photo_weight > 0.0 && !covisibility) {
    throw Error(ErrorCode::InvalidSpec, "photo weight > 0 requires a co-visibility matrix");
  }
  if (!std::isfinite(spatial_scale) || !(spatial_scale > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "spatial scale must be finite and > 0");
  }
}

double photogrammetric_distance(std::string_view a, std::string_view b,
                                const CovisibilityMatrix& covisibility) {
  const std::int64_t count = covisibility.count(a, b);
  const std::int64_t max = covisibility.off_diagonal_max();
  if (max <= 0) {
    throw Error(ErrorCode::EmptyCovisibility, "co-visibility matrix has no shared points");
  }
  return 1.0 - static_cast<double>(count) / static_cast<double>(max);
}

double spatial_distance(const Vec3& a, const Vec3& b, SpatialMetric metric) {
  switch (metric) {
    case SpatialMetric::GreatCircle: return great_circle_distance(a, b);
    case SpatialMetric::Euclidean: return squared_euclidean_distance(a, b);
  }
  return 0.0;
}

double view_distance(const CameraView& u, const CameraView& v, const DistanceSpec& spec) {
  if (u.id == v.id) return 0.0;
  double d = spatial_distance(u.center, v.center, spec.spatial);
  if (spec.spatial_scale != 1.0) d /= spec.spatial_scale;
  if (spec.photo_weight > 0.0) {
    if (!spec.covisibility) {
      throw Error(ErrorCode::InvalidSpec, "photo weight > 0 requires a co-visibility matrix");
    }
    d += spec.photo_weight * photogrammetric_distance(u.id, v.id, *spec.covisibility);
  }
  return d;
}

DistanceSpec resolve_spatial_scale(const ViewSet& pool, DistanceSpec spec) {
  if (!spec.normalize_spatial) return spec;
  double max = 0.0;
  const auto& views = pool.views();
  for (std::size_t i = 0; i < views.size(); ++i) {
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      max = std::max(max, spatial_distance(views[i].center, views[j].center, spec.spatial));
    }
  }
  spec.spatial_scale = max > 0.0 ? max : 1.0;
  return spec;
}

}  // namespace viewdir
