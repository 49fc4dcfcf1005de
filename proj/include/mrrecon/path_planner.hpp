#pragma once

#include "mrrecon/voxel_world.hpp"

#include <optional>
#include <vector>

namespace mrrecon {

// Traversability over a frozen world snapshot. A voxel is traversable when
// it is known empty and its center keeps `clearance_voxels` whole voxels
// between itself and the nearest known-occupied voxel.
class FreeSpace {
 public:
  FreeSpace(const VoxelWorld& world, int clearance_voxels = 1);

  const VoxelWorld& world() const { return *world_; }
  const GridGeometry& grid() const { return world_->grid(); }
  const DistanceField& clearance_field() const { return clearance_; }
  int clearance_voxels() const { return clearance_voxels_; }

  bool known_empty(std::size_t index) const {
    return world_->state(index) == VoxelState::kEmpty;
  }
  bool traversable(std::size_t index) const;
  bool traversable(const Vec3& p) const;
  /// Known-empty check for an arbitrary point (false outside the grid).
  bool known_empty(const Vec3& p) const;
  /// A 26-connected move is allowed when the target is traversable and every
  /// voxel of the box spanned by the two voxels is known empty.
  bool move_allowed(const Coord& from, const Coord& to) const;

 private:
  const VoxelWorld* world_;
  int clearance_voxels_;
  DistanceField clearance_;
  std::int64_t min_sq_;
};

struct PathResult {
  bool reachable = false;
  std::vector<Vec3> polyline;  // from..to, voxel centers in between
  double length = 0.0;         // meters; +inf when unreachable
};

// 26-connected A* over a FreeSpace snapshot. Endpoints must be known empty;
// they are exempt from the clearance requirement. Reuses its search buffers
// across queries, so one planner should not be shared between threads.
class PathPlanner {
 public:
  explicit PathPlanner(const FreeSpace& free_space);

  const FreeSpace& free_space() const { return *free_; }

  /// Throws Error(kInvalidArgument) if an endpoint is not in known free
  /// space. An unreachable goal is reported through PathResult::reachable.
  PathResult shortest_path(const Vec3& from, const Vec3& to) const;

 private:
  const FreeSpace* free_;
  mutable std::vector<double> g_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::vector<std::int64_t> parent_;
  mutable std::vector<std::uint8_t> closed_;
  mutable std::uint32_t generation_ = 0;
};

/// Convenience wrapper building a fresh FreeSpace and planner.
PathResult shortest_path(const VoxelWorld& world, const Vec3& from, const Vec3& to,
                         int clearance_voxels = 1);

}  // namespace mrrecon
