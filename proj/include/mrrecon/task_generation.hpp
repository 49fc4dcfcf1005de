#pragma once

#include "mrrecon/path_planner.hpp"
#include "mrrecon/semantics.hpp"
#include "mrrecon/uncertainty_cache.hpp"
#include "mrrecon/voxel_world.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrrecon {

enum class TaskKind { kExploration, kReconstruction };

const char* to_string(TaskKind kind);

struct TaskSource {
  std::int32_t id = -1;   // frontier index, or instance id (-1: raw surface set)
  std::int32_t poi = -1;  // POI index for reconstruction tasks
};

struct Task {
  TaskKind kind = TaskKind::kExploration;
  Viewpoint view;
  double gain = 0.0;
  TaskSource source;
};

// Ring layout for candidate viewpoints around a center point.
struct ViewSamplingParams {
  std::vector<double> radii{1.0, 1.8};
  int yaw_samples = 8;
  std::vector<double> pitch_levels{-kPi / 6.0, 0.0};  // camera pitch, radians
};

struct TaskGenParams {
  ViewSamplingParams rings;
  int n_down = 5;
  double d_poi = 1.2;
};

struct Poi {
  std::size_t index = 0;  // into the (downsampled) point list
  Vec3 position = Vec3::Zero();
  double uncertainty = 0.0;
};

/// Candidates on concentric rings around `center`, aimed at it, kept only if
/// the position is traversable. Order: radius, pitch level, yaw.
std::vector<Viewpoint> sample_views(const FreeSpace& free_space, const Vec3& center,
                                    const ViewSamplingParams& params);

/// True when `target` (inside `target_voxel`) is in the camera image and no
/// known-occupied voxel other than the target lies on the segment to it.
bool point_visible(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                   const Vec3& target);

/// Sum over visible points of sigma_k * exp(-0.5 * d_k), d in meters.
double info_gain(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                 std::span<const Vec3> points, std::span<const double> uncertainties);

/// Every n_down-th point (indices 0, n_down, 2 n_down, ...).
void downsample_surface(std::span<const Vec3> points, std::span<const double> uncertainties,
                        int n_down, std::vector<Vec3>& points_out,
                        std::vector<double>& uncertainties_out);

/// Greedy max-uncertainty selection under a minimum pairwise spacing.
std::vector<Poi> select_pois(std::span<const Vec3> points, std::span<const double> uncertainties,
                             double d_poi);

/// Number of frontier voxels visible from `view`.
int frontier_coverage(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                      const Frontier& frontier);

std::vector<Task> gen_exploration_tasks(const FreeSpace& free_space,
                                        std::span<const Frontier> frontiers,
                                        const CameraModel& camera, const TaskGenParams& params);

/// Reconstruction tasks for one surface set (downsample, POIs, best view per POI).
std::vector<Task> reconstruction_tasks_for_surface(const FreeSpace& free_space,
                                                   const CameraModel& camera,
                                                   std::span<const Vec3> points,
                                                   std::span<const double> uncertainties,
                                                   std::int32_t source_id,
                                                   const TaskGenParams& params);

std::vector<Task> gen_reconstruction_tasks(const FreeSpace& free_space, const CameraModel& camera,
                                           std::span<const ReconInstance> instances,
                                           const TaskGenParams& params);

/// Baseline without semantic gating: the whole cached surface is one set.
std::vector<Task> surface_uncertainty_rec_tasks(const FreeSpace& free_space,
                                                const CameraModel& camera,
                                                const UncertaintyCache& cache,
                                                const TaskGenParams& params);

std::string tasks_json(std::span<const Task> tasks);

}  // namespace mrrecon
