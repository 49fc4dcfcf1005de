#pragma once

#include "mrrecon/collaboration.hpp"
#include "mrrecon/config.hpp"
#include "mrrecon/path_planner.hpp"
#include "mrrecon/scene.hpp"
#include "mrrecon/semantics.hpp"
#include "mrrecon/task_generation.hpp"
#include "mrrecon/tour_planning.hpp"
#include "mrrecon/uncertainty_cache.hpp"
#include "mrrecon/voxel_world.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mrrecon {

// State after one planning cycle (cycle 0 is the initial sensing sweep).
struct CycleRecord {
  int cycle = 0;
  int views = 0;  // cumulative sensed views
  double coverage = 0.0;
  double residual_uncertainty = 0.0;
  int frontiers = 0;
  int gated_instances = 0;
  int exploration_tasks = 0;
  int reconstruction_tasks = 0;
  int robots_exploration = 0;
  int robots_reconstruction = 0;
  double cluster_objective = 0.0;
  double tour_objective = 0.0;  // sum of tour travel times over robots
  int collisions = 0;           // cumulative same-voxel robot encounters
  std::vector<double> path_lengths;  // cumulative, per robot
};

struct CycleTiming {
  int cycle = 0;
  double task_seconds = 0.0;
  double collaboration_seconds = 0.0;
  double planning_seconds = 0.0;
};

struct RunResult {
  Variant variant = Variant::kFull;
  std::vector<CycleRecord> cycles;
  std::vector<CycleTiming> timings;
  std::string stop_reason;
  int views = 0;
  double coverage = 0.0;
  double residual_uncertainty = 0.0;
  double total_path_length = 0.0;
  int reconstruction_tasks = 0;  // summed over cycles
};

struct CycleTasks {
  std::vector<Frontier> frontiers;
  std::vector<InstanceRecord> gated;
  std::vector<Task> tasks;  // exploration tasks first
  int exploration = 0;
  int reconstruction = 0;
};

// Closed-loop multi-robot reconstruction over a ground-truth scene. Robots
// execute sampled viewpoints in lock-step ticks; every step is deterministic
// for a given configuration and seed.
class Simulator {
 public:
  /// Validates the configuration against the scene (robot poses must lie in
  /// truth free space) and senses every start pose. Throws Error(kConfig).
  /// `record_deposits` keeps the cache's deposit log (test use).
  Simulator(Config config, std::shared_ptr<const Scene> scene, bool record_deposits = false);

  /// Plans and executes one cycle. Returns false once the run has stopped.
  bool step();
  void run();
  bool finished() const { return !stop_reason_.empty(); }

  /// Writes per-cycle task, assignment and tour JSON under `dir`/cycles.
  void set_artifact_dir(std::filesystem::path dir) { artifact_dir_ = std::move(dir); }

  /// Task set for the current map with the given reconstruction source.
  CycleTasks generate_tasks(const FreeSpace& free_space, ReconSource source) const;

  RunResult result() const;
  const Config& config() const { return config_; }
  const VoxelWorld& world() const { return world_; }
  const UncertaintyCache& cache() const { return cache_; }
  const InstanceRegistry& registry() const { return registry_; }
  const std::vector<Viewpoint>& poses() const { return poses_; }
  int views() const { return views_; }

  /// Truth voxels counted for coverage: free space 6-connected to a robot
  /// start.
  const std::vector<std::uint8_t>& reachable_mask() const { return reachable_; }
  double coverage() const;
  double residual_uncertainty() const;

 private:
  void sense_at(std::size_t robot, const Viewpoint& pose);
  void prune();
  void record(int cycle, const CycleTasks* tasks, double cluster_obj, double tour_obj,
              int robots_exp, int robots_rec);

  Config config_;
  VariantFlags flags_;
  VoxelWorld world_;
  UncertaintyCache cache_;
  InstanceRegistry registry_;
  std::vector<Viewpoint> poses_;
  std::vector<double> path_lengths_;
  static std::array<double, 5> pose_key(const Viewpoint& v) {
    return {v.position.x(), v.position.y(), v.position.z(), v.yaw, v.pitch};
  }

  std::set<std::array<double, 5>> sensed_poses_;
  std::vector<std::uint8_t> reachable_;
  std::size_t reachable_count_ = 0;
  std::vector<std::size_t> surface_instance_voxels_;
  int views_ = 0;
  int frames_since_prune_ = 0;
  int cycle_ = 0;
  int collisions_ = 0;
  int reconstruction_total_ = 0;
  std::vector<CycleRecord> records_;
  std::vector<CycleTiming> timings_;
  std::string stop_reason_;
  std::optional<std::filesystem::path> artifact_dir_;
};

/// Loads the scene, runs to completion and, with a non-empty `out_dir`,
/// writes metrics.csv, timings.csv, summary.json, effective_config.json,
/// cache.csv, instances.json and the per-cycle dumps.
RunResult run_simulation(const Config& config, const std::filesystem::path& out_dir = {});

/// Runs each configuration; all must share scene and seed (Error(kConfig)).
std::vector<RunResult> compare_variants(const std::vector<Config>& configs,
                                        const std::filesystem::path& out_dir = {});

}  // namespace mrrecon
