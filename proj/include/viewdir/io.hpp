#pragma once

#include "viewdir/coverage.hpp"
#include "viewdir/igs.hpp"
#include "viewdir/mesh.hpp"
#include "viewdir/scene.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace viewdir {

namespace fs = std::filesystem;

// ---- transforms.json ------------------------------------------------------

/// Reads a NeRF-style transforms file. Each frame's transform_matrix is a
/// camera-to-world matrix in the OpenGL convention. Focal lengths come from
/// per-frame or top-level fl_x/fl_y, else from camera_angle_x (and
/// camera_angle_y) with image size w x h (800 x 800 when absent). Ids come
/// from "id", else file_path, else the frame index.
///
/// Rotations within 1e-3 of orthonormal (largest singular value deviation)
/// are replaced by their polar factor with a warning; worse ones throw
/// NonOrthonormalRotation. Schema problems throw ParseError naming the frame.
ViewSet read_transforms(const fs::path& path);

/// Writes views with per-frame intrinsics so read_transforms reproduces them
/// exactly.
void write_transforms(const ViewSet& set, const fs::path& path);

// ---- COLMAP text model ----------------------------------------------------

struct ColmapModel {
  ViewSet views;
  CovisibilityMatrix covisibility;
};

/// Reads images.txt and points3D.txt (cameras.txt is optional and supplies
/// intrinsics). View ids are image names. Poses are converted from COLMAP's
/// world-to-camera (+z forward, y down) to camera-to-world with -z forward.
/// Co-visibility counts, per image pair, the points whose track contains
/// both images.
ColmapModel read_colmap_text(const fs::path& dir);

/// Writes cameras.txt, images.txt and points3D.txt. Each co-visibility count
/// c_ij becomes c_ij two-view tracks, so read_colmap_text returns the same
/// matrix. Views without intrinsics get a 1x1 placeholder camera.
void write_colmap_text(const ColmapModel& model, const fs::path& dir);

/// COLMAP quaternion (w, x, y, z) and translation for a camera-to-world
/// pose with -z forward. The quaternion is normalised with w >= 0.
std::pair<std::array<double, 4>, Vec3> colmap_pose(const CameraView& view);

/// Inverse of colmap_pose: returns (center, camera-to-world rotation).
std::pair<Vec3, Mat3> from_colmap_pose(const std::array<double, 4>& qvec, const Vec3& tvec);

// ---- meshes ---------------------------------------------------------------

/// Wavefront OBJ: v and f records only; polygons are fan-triangulated,
/// negative indices and v/vt/vn forms accepted. Zero-area faces are dropped
/// with a warning.
TriangleMesh read_obj(const fs::path& path);
void write_obj(const TriangleMesh& mesh, const fs::path& path);

// ---- selection manifests and run logs ---------------------------------------

struct ManifestEntry {
  std::size_t step = 0;
  std::string view_id;
  std::optional<double> score;
  bool operator==(const ManifestEntry&) const = default;
};

struct SelectionManifest {
  std::string method;
  std::string config_echo = "{}";  // compact JSON object
  std::vector<ManifestEntry> order;
  std::uint64_t seed = 0;
  std::string created_at;
  bool operator==(const SelectionManifest&) const = default;
};

inline constexpr int kManifestVersion = 1;

/// Throws DuplicateId or InvalidSpec (non-increasing steps) before touching
/// the file, IoError when it cannot be written.
void write_manifest(const SelectionManifest& manifest, const fs::path& path);
std::string manifest_to_string(const SelectionManifest& manifest);

/// Throws MissingFile, ParseError or SchemaVersionMismatch.
SelectionManifest read_manifest(const fs::path& path);

/// One JSON object per line for every ranked candidate of every round:
/// {"round","view_id","score","rank","drawn","relaxed_to"}.
void write_run_log(const IgsResult& result, const fs::path& path);

// ---- view sets --------------------------------------------------------------

/// Canonical JSON for a ViewSet (views, rotations row-major, selection).
/// Doubles are printed in shortest round-trip form, so parsing restores
/// every bit.
std::string view_set_to_json(const ViewSet& set);
ViewSet view_set_from_json(const std::string& text);

// ---- coverage exports -------------------------------------------------------

/// Little-endian binary: u64 M, f64 radius, f64 kappa, then M records of
/// f64 x, y, z, raw.
void write_coverage_points(const CoverageField& field, const fs::path& path);

struct CoveragePoints {
  std::vector<Vec3> points;
  std::vector<double> raw;
  double radius = 0.0;
  double normalization = 1.0;
};
CoveragePoints read_coverage_points(const fs::path& path);

/// Fixed colormap used by the PLY export: piecewise-linear through the
/// viridis anchors at 0, 0.25, 0.5, 0.75 and 1. Input is clamped to [0, 1].
std::array<std::uint8_t, 3> coverage_color(double t);

/// Binary little-endian PLY of the mesh with per-vertex colour and a float
/// "coverage" property. A vertex takes the mean normalized value of the
/// samples within the ball radius, or of its nearest sample when none is.
void write_coverage_ply(const TriangleMesh& mesh, const CoverageField& field,
                        const fs::path& path);

}  // namespace viewdir
