#pragma once

#include "viewdir/mesh.hpp"

#include <Eigen/Geometry>

#include <optional>
#include <span>
#include <vector>

namespace viewdir {

/// Binary BVH over triangles, split at the centroid median of the widest axis.
class Bvh {
 public:
  Bvh(std::span<const Vec3> vertices, std::span<const Eigen::Vector3i> triangles);

  std::optional<Hit> first_hit(const Ray& ray) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // child index, or -1 for a leaf
    int right = -1;
    int first = 0;   // leaf range in order_
    int count = 0;
  };

  int build(int first, int count, std::vector<Vec3>& centroids);

  std::span<const Vec3> vertices_;
  std::span<const Eigen::Vector3i> triangles_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
};

}  // namespace viewdir
