#include "support.hpp"
#include "viewdir/metrics.hpp"

#include <doctest.h>

#include <numbers>

using namespace viewdir;
using testing::make_view;

namespace {

std::shared_ptr<const CovisibilityMatrix> covis3(std::int64_t ab, std::int64_t ac, std::int64_t bc) {
  CovisibilityMatrix::Counts c(3, 3);
  c << 100, ab, ac, ab, 100, bc, ac, bc, 100;
  return std::make_shared<CovisibilityMatrix>(std::vector<std::string>{"a", "b", "c"}, c);
}

}  // namespace

TEST_CASE("great-circle examples") {
  const double pi = std::numbers::pi;
  CHECK(great_circle_distance(Vec3(1, 0, 0), Vec3(0, 1, 0)) == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(great_circle_distance(Vec3(1, 0, 0), Vec3(1, 0, 0)) == 0.0);
  CHECK(great_circle_distance(Vec3(1, 0, 0), Vec3(-1, 0, 0)) == doctest::Approx(pi).epsilon(1e-15));

  try {
    great_circle_distance(Vec3(2, 0, 0), Vec3(1, 0, 0));
    FAIL("expected NotUnit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnit);
  }
}

TEST_CASE("clamping keeps nearly parallel vectors finite") {
  const Vec3 a = Vec3(1, 1e-9, 0).normalized();
  const Vec3 b(1, 0, 0);
  const double d = great_circle_distance(a, b);
  CHECK(std::isfinite(d));
  CHECK(d >= 0.0);
  CHECK(std::isfinite(great_circle_distance(a, a)));
}

TEST_CASE("squared Euclidean examples") {
  CHECK(squared_euclidean_distance(Vec3(0, 0, 0), Vec3(1, 2, 2)) == 9.0);
  CHECK(squared_euclidean_distance(Vec3(3, -1, 2), Vec3(3, -1, 2)) == 0.0);
  CHECK(squared_euclidean_distance(Vec3(1, 0, 0), Vec3(0, 0, 0)) == 1.0);
}

TEST_CASE("photogrammetric examples") {
  const auto m = covis3(8, 0, 4);
  CHECK(photogrammetric_distance("a", "b", *m) == 0.0);
  CHECK(photogrammetric_distance("a", "c", *m) == 1.0);
  CHECK(photogrammetric_distance("b", "c", *m) == 0.5);
  CHECK(photogrammetric_distance("c", "b", *m) == photogrammetric_distance("b", "c", *m));

  const auto empty = covis3(0, 0, 0);
  try {
    photogrammetric_distance("a", "b", *empty);
    FAIL("expected EmptyCovisibility");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCovisibility);
  }
  try {
    photogrammetric_distance("a", "zz", *m);
    FAIL("expected UnknownView");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownView);
  }
}

TEST_CASE("view_distance examples") {
  DistanceSpec euc;
  CHECK(view_distance(make_view("a", {0, 0, 0}), make_view("b", {1, 0, 0}), euc) == 1.0);

  // Spatial term 0.5 and no shared points: 0.5 + 1 * 1.
  DistanceSpec mixed;
  mixed.photo_weight = 1.0;
  mixed.covisibility = covis3(8, 0, 4);
  const double half = std::sqrt(0.5);
  CHECK(view_distance(make_view("a", {0, 0, 0}), make_view("c", {half, 0, 0}), mixed) ==
        doctest::Approx(1.5).epsilon(1e-15));

  CHECK(view_distance(make_view("a", {0, 0, 0}), make_view("a", {0, 0, 0}), mixed) == 0.0);
}

TEST_CASE("DistanceSpec validation") {
  DistanceSpec s;
  s.photo_weight = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
  s.photo_weight = -1.0;
  s.covisibility = covis3(1, 1, 1);
  CHECK_THROWS_AS(s.validate(), Error);
  s.photo_weight = 2.0;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("symmetry and non-negativity on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> count(0, 50);
  const auto m = covis3(count(rng), count(rng), count(rng) + 1);
  const char* ids[] = {"a", "b", "c"};
  for (int i = 0; i < 2000; ++i) {
    const auto u = make_view(ids[i % 3], testing::random_unit(rng));
    const auto v = make_view(ids[(i + 1) % 3], testing::random_unit(rng));
    for (auto metric : {SpatialMetric::GreatCircle, SpatialMetric::Euclidean}) {
      DistanceSpec spec;
      spec.spatial = metric;
      spec.photo_weight = 0.7;
      spec.covisibility = m;
      const double duv = view_distance(u, v, spec);
      CHECK(duv == view_distance(v, u, spec));
      CHECK(duv >= 0.0);
    }
  }
}

TEST_CASE("great-circle triangle inequality") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = testing::random_unit(rng), b = testing::random_unit(rng), c = testing::random_unit(rng);
    CHECK(great_circle_distance(a, c) <= great_circle_distance(a, b) + great_circle_distance(b, c) + 1e-12);
  }
}

TEST_CASE("farthest pair is translation invariant under Euclidean distance") {
  std::mt19937_64 rng(9);
  auto pts = testing::random_cube(25, rng);
  auto argmax = [](const std::vector<Vec3>& p) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double d = -1;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        if (spatial_distance(p[i], p[j], SpatialMetric::Euclidean) > d) {
          d = spatial_distance(p[i], p[j], SpatialMetric::Euclidean);
          best = {i, j};
        }
    return best;
  };
  const auto before = argmax(pts);
  for (auto& p : pts) p += Vec3(3.5, -7.25, 11.0);
  CHECK(argmax(pts) == before);
}

TEST_CASE("normalize_spatial divides by the pool maximum") {
  const ViewSet pool({make_view("a", {0, 0, 0}), make_view("b", {2, 0, 0}), make_view("c", {1, 0, 0})});
  DistanceSpec spec;
  spec.normalize_spatial = true;
  const auto resolved = resolve_spatial_scale(pool, spec);
  CHECK(resolved.spatial_scale == 4.0);
  CHECK(view_distance(pool.view("a"), pool.view("c"), resolved) == 0.25);
  spec.normalize_spatial = false;
  CHECK(resolve_spatial_scale(pool, spec).spatial_scale == 1.0);
}
