#pragma once

#include "viewdir/scene.hpp"

#include <Eigen/Geometry>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace viewdir {

class Bvh;

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
};

struct Hit {
  Vec3 point = Vec3::Zero();
  int triangle = -1;
  double t = 0.0;
};

/// Triangle soup with a bounding-volume hierarchy built at construction.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  /// Throws InvalidMesh on out-of-range indices or triangles with area
  /// below 1e-12.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Eigen::Vector3i> triangles);

  const std::vector<Vec3>& vertices() const;
  const std::vector<Eigen::Vector3i>& triangles() const;
  std::size_t triangle_count() const { return triangles().size(); }
  bool empty() const { return !storage_ || triangles().empty(); }

  const Vec3& corner(std::size_t tri, int k) const { return vertices()[triangles()[tri][k]]; }
  double area(std::size_t tri) const;
  double total_area() const;
  Eigen::AlignedBox3d bounds() const;

  const Bvh& bvh() const;

  /// Applies x -> rotation * x + translation to every vertex.
  TriangleMesh transformed(const Mat3& rotation, const Vec3& translation) const;

 private:
  struct Storage;
  // Geometry and its BVH live together so copies share one immutable block.
  std::shared_ptr<const Storage> storage_;
};

/// Geodesic sphere obtained by `subdivisions` rounds of 4-way splitting of an
/// icosahedron, vertices pushed to `radius`.
TriangleMesh make_icosphere(int subdivisions, double radius = 1.0,
                            const Vec3& center = Vec3::Zero());

/// Uniform point cloud on a mesh surface together with the ball radius used
/// when accumulating ray hits around each point.
struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<int> triangles;  // source triangle of each point
  double radius = 0.0;
  std::vector<double> weights;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  /// Same points, radius and seed.
  bool same_support(const SurfaceSamples& other) const;
};

/// Ray/triangle intersection (Moller-Trumbore, inclusive edges). Returns the
/// ray parameter when it exceeds 1e-9.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

/// Closest intersection with positive parameter; ties on t resolve to the
/// smaller triangle id.
std::optional<Hit> first_hit(const Ray& ray, const TriangleMesh& mesh);

}  // namespace viewdir
