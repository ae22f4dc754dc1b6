#include "viewdir/coverage.hpp"

#include "viewdir/error.hpp"
#include "viewdir/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace viewdir {

SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t count, double radius,
                              std::uint64_t seed) {
  if (mesh.empty()) throw Error(ErrorCode::EmptyMesh, "cannot sample an empty mesh");
  if (count == 0) throw Error(ErrorCode::InvalidSpec, "sample count must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidSpec, "ball radius must be finite and > 0");
  }
  std::vector<double> cdf(mesh.triangle_count());
  for (std::size_t t = 0; t < cdf.size(); ++t) cdf[t] = mesh.area(t);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  const double total = cdf.back();

  Rng rng = make_rng(seed);
  SurfaceSamples out;
  out.radius = radius;
  out.seed = seed;
  out.points.reserve(count);
  out.triangles.reserve(count);
  out.weights.assign(count, 1.0 / static_cast<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform01(rng) * total;
    const auto tri = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
        cdf.size() - 1);
    double r1 = uniform01(rng);
    double r2 = uniform01(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Vec3& a = mesh.corner(tri, 0);
    const Vec3& b = mesh.corner(tri, 1);
    const Vec3& c = mesh.corner(tri, 2);
    out.points.push_back(a + r1 * (b - a) + r2 * (c - a));
    out.triangles.push_back(static_cast<int>(tri));
  }
  return out;
}

PointGrid::PointGrid(std::span<const Vec3> points, double cell_size)
    : points_(points), cell_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw Error(ErrorCode::InvalidSpec, "grid cell size must be finite and > 0");
  }
  std::vector<std::pair<Key, std::size_t>> keyed;
  keyed.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) keyed.emplace_back(key_of(points[i]), i);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& l, const auto& r) { return l.first < r.first || (l.first == r.first && l.second < r.second); });
  order_.reserve(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || !(keyed[i].first == keyed[i - 1].first)) {
      keys_.push_back(keyed[i].first);
      start_.push_back(i);
    }
    order_.push_back(keyed[i].second);
  }
  start_.push_back(keyed.size());
}

PointGrid::Key PointGrid::key_of(const Vec3& p) const {
  return Key{static_cast<std::int64_t>(std::floor(p.x() / cell_)),
             static_cast<std::int64_t>(std::floor(p.y() / cell_)),
             static_cast<std::int64_t>(std::floor(p.z() / cell_))};
}

std::pair<std::size_t, std::size_t> PointGrid::cell_range(const Key& k) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || !(*it == k)) return {0, 0};
  const auto i = static_cast<std::size_t>(it - keys_.begin());
  return {start_[i], start_[i + 1]};
}

std::size_t PointGrid::count_within(const Vec3& query, double radius) const {
  std::size_t n = 0;
  for_each_within(query, radius, [&n](std::size_t) { ++n; });
  return n;
}

double default_ball_radius(std::span<const Vec3> points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::InvalidSpec, "ball radius needs at least two sample points");
  }
  Eigen::AlignedBox3d box;
  for (const auto& p : points) box.extend(p);
  const double diagonal = box.diagonal().norm();
  if (!(diagonal > 0.0)) throw Error(ErrorCode::InvalidSpec, "sample points are all identical");
  // Roughly a handful of points per cell for surface-like clouds.
  const double cell = diagonal / std::sqrt(static_cast<double>(points.size()));
  const PointGrid grid(points, cell);

  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (double r = cell; !std::isfinite(best); r *= 2.0) {
      grid.for_each_within(points[i], r, [&](std::size_t j) {
        if (j != i) best = std::min(best, (points[j] - points[i]).norm());
      });
      if (r > 4.0 * diagonal) break;
    }
    sum += best;
  }
  return 2.0 * sum / static_cast<double>(points.size());
}

std::vector<Ray> camera_rays(const CameraView& view, int stride) {
  if (!view.intrinsics) {
    throw Error(ErrorCode::MissingIntrinsics, "view '" + view.id + "' has no intrinsics");
  }
  if (stride < 1) throw Error(ErrorCode::InvalidSpec, "stride must be >= 1");
  const Intrinsics& k = *view.intrinsics;
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(((k.width + stride - 1) / stride) *
                                        ((k.height + stride - 1) / stride)));
  for (int py = 0; py < k.height; py += stride) {
    for (int px = 0; px < k.width; px += stride) {
      const double u = px + 0.5;
      const double v = py + 0.5;
      const Vec3 local((u - k.cx) / k.fx, -(v - k.cy) / k.fy, -1.0);
      rays.push_back(Ray{view.center, view.rotation * local});
    }
  }
  return rays;
}

namespace {

struct Tally {
  std::vector<std::uint64_t> counts;
  std::size_t rays = 0;
  std::size_t hits = 0;
};

void tally_view(const TriangleMesh& mesh, const PointGrid& grid, double radius,
                const CameraView& view, int stride, Tally& tally) {
  for (const Ray& ray : camera_rays(view, stride)) {
    ++tally.rays;
    const auto hit = first_hit(ray, mesh);
    if (!hit) continue;
    ++tally.hits;
    grid.for_each_within(hit->point, radius, [&](std::size_t l) { ++tally.counts[l]; });
  }
}

}  // namespace

CoverageField coverage_measure(const TriangleMesh& mesh, const SurfaceSamples& samples,
                               std::span<const CameraView> views, const CoverageOptions& options) {
  if (options.stride < 1) throw Error(ErrorCode::InvalidSpec, "stride must be >= 1");
  if (!(samples.radius > 0.0)) throw Error(ErrorCode::InvalidSpec, "samples carry no ball radius");
  for (const auto& v : views) {
    if (!v.intrinsics) throw Error(ErrorCode::MissingIntrinsics, "view '" + v.id + "' has no intrinsics");
  }
  const std::size_t m = samples.size();
  CoverageField field;
  field.samples = samples;
  field.stride = options.stride;
  field.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  if (views.empty() || m == 0 || mesh.empty()) {
    field.normalization = 1.0;
    return field;
  }

  const PointGrid grid(samples.points, samples.radius);
  const std::size_t workers =
      std::clamp<std::size_t>(options.jobs == 0 ? 1 : options.jobs, 1, views.size());
  std::vector<Tally> tallies(workers);
  for (auto& t : tallies) t.counts.assign(m, 0);

  // Integer tallies make the merge order irrelevant.
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < views.size(); i += workers) {
      tally_view(mesh, grid, samples.radius, views[i], options.stride, tallies[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  std::vector<std::uint64_t> counts(m, 0);
  for (const auto& t : tallies) {
    for (std::size_t l = 0; l < m; ++l) counts[l] += t.counts[l];
    field.rays_cast += t.rays;
    field.hits += t.hits;
  }
  const double scale = static_cast<double>(options.stride) * options.stride;
  for (std::size_t l = 0; l < m; ++l) {
    field.values[static_cast<Eigen::Index>(l)] = static_cast<double>(counts[l]) * scale;
  }

  double kappa = 0.0;
  switch (options.normalization) {
    case CoverageNormalization::MaxCount:
      kappa = field.values.maxCoeff();
      break;
    case CoverageNormalization::TotalHits:
      kappa = static_cast<double>(field.hits) * scale;
      break;
    case CoverageNormalization::RayBudget:
      kappa = static_cast<double>(field.rays_cast) * scale;
      break;
  }
  field.normalization = kappa > 0.0 ? kappa : 1.0;
  return field;
}

CoverageDifference coverage_difference(const CoverageField& a, const CoverageField& b) {
  if (!a.samples.same_support(b.samples) || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::SampleMismatch, "coverage fields were computed on different samples");
  }
  CoverageDifference out;
  const Eigen::VectorXd na = a.normalized();
  const Eigen::VectorXd nb = b.normalized();
  out.values = (na - nb).cwiseAbs();
  const auto n = static_cast<double>(out.values.size());
  if (out.values.size() == 0) return out;
  out.mean = out.values.mean();
  out.std = std::sqrt((out.values.array() - out.mean).square().sum() / n);
  out.max = out.values.maxCoeff();
  out.pooled_sigma = std::sqrt((coverage_variance(a) + coverage_variance(b)) / 2.0);
  if (out.pooled_sigma > 0.0) {
    out.mean_in_sigma = out.mean / out.pooled_sigma;
    out.max_in_sigma = out.max / out.pooled_sigma;
  }
  return out;
}

double coverage_variance(const CoverageField& field) {
  const Eigen::VectorXd x = field.normalized();
  if (x.size() < 2) return 0.0;
  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x[i] - mean);
  }
  return m2 / static_cast<double>(x.size());
}

}  // namespace viewdir
