#pragma once

#include "mrrecon/geometry.hpp"
#include "mrrecon/scene.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace mrrecon {

enum class VoxelState : std::uint8_t { kUnknown = 0, kEmpty = 1, kOccupied = 2 };

// Pinhole depth camera casting one ray per raster cell.
struct CameraModel {
  double hfov = kPi / 2.0;        // radians
  double vfov = kPi / 3.0;        // radians
  double max_range = 5.0;         // meters
  int width = 80;
  int height = 60;

  void validate() const;
  /// True if `p` projects into the image of `view` and lies within max range.
  bool sees(const Viewpoint& view, const Vec3& p) const;
  /// Ray direction (unit) through the center of raster cell (row, col).
  Vec3 ray_direction(const Viewpoint& view, int row, int col) const;
};

struct RayHit {
  bool hit = false;
  std::size_t voxel = 0;     // hit voxel when hit
  double distance = 0.0;     // distance to the entered surface when hit
  int face_axis = -1;        // axis of the entered face, -1 if the hit is the start voxel
  Vec3 direction = Vec3::Zero();
};

struct ObservationFrame {
  Viewpoint pose;
  std::vector<RayHit> rays;
  std::size_t newly_known = 0;
};

// Known occupancy map over an immutable ground-truth scene. Copies share the
// truth and duplicate only the known state, so a copy is a cheap snapshot.
class VoxelWorld {
 public:
  explicit VoxelWorld(std::shared_ptr<const Scene> scene);

  const Scene& scene() const { return *scene_; }
  const std::shared_ptr<const Scene>& scene_ptr() const { return scene_; }
  const GridGeometry& grid() const { return scene_->grid; }
  double resolution() const { return grid().resolution(); }
  std::size_t size() const { return state_.size(); }

  VoxelState state(std::size_t index) const { return state_[index]; }
  bool truth_occupied(std::size_t index) const { return scene_->occupied[index] != 0; }
  std::int32_t truth_instance(std::size_t index) const { return scene_->instance_of[index]; }

  /// Records an observation. Throws Error(kInvariant) for occupied<->empty
  /// flips; re-observing the same state or observing unknown is a no-op.
  /// Returns true if the voxel was previously unknown.
  bool observe(std::size_t index, VoxelState observed);

  std::size_t count(VoxelState s) const;
  const std::vector<VoxelState>& states() const { return state_; }

 private:
  std::shared_ptr<const Scene> scene_;
  std::vector<VoxelState> state_;
};

/// Casts the camera raster through the truth grid and updates the known map.
/// Throws Error(kBounds) for a pose outside the extent and
/// Error(kInvalidArgument) for a pose inside an occupied voxel.
ObservationFrame sense(VoxelWorld& world, const CameraModel& camera, const Viewpoint& pose);

struct Frontier {
  std::vector<std::size_t> voxels;  // sorted ascending
  Vec3 centroid = Vec3::Zero();
};

bool is_frontier_voxel(const VoxelWorld& world, std::size_t index);

/// Maximal 26-connected components of empty voxels that touch an unknown
/// voxel through a face, ordered by centroid (x, y, z).
std::vector<Frontier> extract_frontiers(const VoxelWorld& world);

enum class ObstacleSet { kOccupiedOrUnknown, kOccupiedOnly };

// Exact Euclidean distance from each voxel center to the nearest obstacle
// voxel center. Squared distances are kept in voxel units so comparisons are
// exact.
class DistanceField {
 public:
  static constexpr std::int64_t kNoObstacle = INT64_MAX;

  DistanceField() = default;
  DistanceField(GridGeometry grid, std::vector<std::int64_t> squared_voxels);

  std::int64_t squared_voxels(std::size_t index) const { return sq_[index]; }
  /// Distance in meters; +infinity if the world has no obstacle.
  double meters(std::size_t index) const;
  const GridGeometry& grid() const { return grid_; }
  std::size_t size() const { return sq_.size(); }

 private:
  GridGeometry grid_;
  std::vector<std::int64_t> sq_;
};

DistanceField distance_field(const VoxelWorld& world,
                             ObstacleSet obstacles = ObstacleSet::kOccupiedOrUnknown);

}  // namespace mrrecon
