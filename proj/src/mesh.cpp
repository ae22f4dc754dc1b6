#include "viewdir/mesh.hpp"

#include "viewdir/bvh.hpp"
#include "viewdir/error.hpp"

#include <array>
#include <cmath>
#include <map>
#include <utility>

namespace viewdir {

struct TriangleMesh::Storage {
  std::vector<Vec3> vertices;
  std::vector<Eigen::Vector3i> triangles;
  std::optional<Bvh> bvh;
};

namespace {

const std::vector<Vec3>& empty_vertices() {
  static const std::vector<Vec3> kEmpty;
  return kEmpty;
}

const std::vector<Eigen::Vector3i>& empty_triangles() {
  static const std::vector<Eigen::Vector3i> kEmpty;
  return kEmpty;
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Eigen::Vector3i> triangles) {
  const int n = static_cast<int>(vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    if ((tri.array() < 0).any() || (tri.array() >= n).any()) {
      throw Error(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) + " has an index out of range");
    }
    const double area =
        0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]).norm();
    if (!(area >= 1e-12)) {
      throw Error(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) + " is degenerate");
    }
  }
  auto storage = std::make_shared<Storage>();
  storage->vertices = std::move(vertices);
  storage->triangles = std::move(triangles);
  storage->bvh.emplace(storage->vertices, storage->triangles);
  storage_ = std::move(storage);
}

const std::vector<Vec3>& TriangleMesh::vertices() const {
  return storage_ ? storage_->vertices : empty_vertices();
}

const std::vector<Eigen::Vector3i>& TriangleMesh::triangles() const {
  return storage_ ? storage_->triangles : empty_triangles();
}

const Bvh& TriangleMesh::bvh() const {
  if (!storage_) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
  return *storage_->bvh;
}

double TriangleMesh::area(std::size_t tri) const {
  return 0.5 * (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0)).norm();
}

double TriangleMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangle_count(); ++t) sum += area(t);
  return sum;
}

Eigen::AlignedBox3d TriangleMesh::bounds() const {
  Eigen::AlignedBox3d box;
  for (const auto& v : vertices()) box.extend(v);
  return box;
}

TriangleMesh TriangleMesh::transformed(const Mat3& rotation, const Vec3& translation) const {
  std::vector<Vec3> moved;
  moved.reserve(vertices().size());
  for (const auto& v : vertices()) moved.push_back(rotation * v + translation);
  return TriangleMesh(std::move(moved), triangles());
}

TriangleMesh make_icosphere(int subdivisions, double radius, const Vec3& center) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.emplace_back(t[0], ab, ca);
      next.emplace_back(t[1], bc, ab);
      next.emplace_back(t[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    tris = std::move(next);
  }
  for (auto& v : verts) v = center + radius * v;
  return TriangleMesh(std::move(verts), std::move(tris));
}

bool SurfaceSamples::same_support(const SurfaceSamples& other) const {
  return seed == other.seed && radius == other.radius && points == other.points;
}

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t > 1e-9)) return std::nullopt;
  return t;
}

std::optional<Hit> first_hit(const Ray& ray, const TriangleMesh& mesh) {
  if (mesh.empty()) return std::nullopt;
  return mesh.bvh().first_hit(ray);
}

}  // namespace viewdir
