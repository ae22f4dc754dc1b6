#include "viewdir/bvh.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <optional>

namespace viewdir {

namespace {

constexpr int kLeafSize = 4;

// Slab test; returns the entry parameter, or nothing when the box is missed
// within [0, t_max].
std::optional<double> box_entry(const Eigen::AlignedBox3d& box, const Vec3& origin, const Vec3& inv_dir,
                 double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int axis = 0; axis < 3; ++axis) {
    double near = (box.min()[axis] - origin[axis]) * inv_dir[axis];
    double far = (box.max()[axis] - origin[axis]) * inv_dir[axis];
    if (near > far) std::swap(near, far);
    // NaN arises for 0 * inf when the origin sits on a slab plane; treat the
    // slab as unbounded on that side.
    if (near == near) t0 = std::max(t0, near);
    if (far == far) t1 = std::min(t1, far);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace

Bvh::Bvh(std::span<const Vec3> vertices, std::span<const Eigen::Vector3i> triangles)
    : vertices_(vertices), triangles_(triangles) {
  const int n = static_cast<int>(triangles.size());
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0);
  if (n == 0) return;
  std::vector<Vec3> centroids(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = triangles[i];
    centroids[i] = (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 1);
  build(0, n, centroids);
}

int Bvh::build(int first, int count, std::vector<Vec3>& centroids) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (int i = first; i < first + count; ++i) {
    const auto& t = triangles_[order_[i]];
    for (int k = 0; k < 3; ++k) box.extend(vertices_[t[k]]);
    centroid_box.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  Eigen::Index axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  const int half = count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + first + half,
                   order_.begin() + first + count, [&](int a, int b) {
                     if (centroids[a][axis] != centroids[b][axis]) {
                       return centroids[a][axis] < centroids[b][axis];
                     }
                     return a < b;
                   });
  const int left = build(first, half, centroids);
  const int right = build(first + half, count - half, centroids);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

std::optional<Hit> Bvh::first_hit(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv_dir = ray.direction.cwiseInverse();
  double best_t = std::numeric_limits<double>::infinity();
  int best_tri = -1;

  std::array<int, 128> stack{};
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    // Boxes touching best_t are still visited so equal-t ties can resolve
    // to the smaller triangle id.
    if (!box_entry(node.box, ray.origin, inv_dir, best_t)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int tri = order_[i];
        const auto& t = triangles_[tri];
        auto hit = intersect_triangle(ray, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
        if (hit && (*hit < best_t || (*hit == best_t && tri < best_tri))) {
          best_t = *hit;
          best_tri = tri;
        }
      }
      continue;
    }
    const auto tl = box_entry(nodes_[node.left].box, ray.origin, inv_dir, best_t);
    const auto tr = box_entry(nodes_[node.right].box, ray.origin, inv_dir, best_t);
    // Push the farther child first so the nearer one is popped next.
    if (tl && tr) {
      const bool left_first = *tl <= *tr;
      stack[top++] = left_first ? node.right : node.left;
      stack[top++] = left_first ? node.left : node.right;
    } else if (tl) {
      stack[top++] = node.left;
    } else if (tr) {
      stack[top++] = node.right;
    }
  }
  if (best_tri < 0) return std::nullopt;
  return Hit{ray.origin + best_t * ray.direction, best_tri, best_t};
}

}  // namespace viewdir
