#pragma once

#include "mrrecon/task_generation.hpp"

#include <span>
#include <string>
#include <vector>

namespace mrrecon {

enum class Mode { kExploration, kReconstruction, kIdle };

const char* to_string(Mode mode);

struct RobotState {
  int id = 0;
  Viewpoint pose;
  Mode mode = Mode::kIdle;
  std::vector<Task> assigned;
};

struct ModeCounts {
  int exploration = 0;
  int reconstruction = 0;
  friend bool operator==(const ModeCounts&, const ModeCounts&) = default;
};

/// Splits robots between modes in proportion to the global task counts.
ModeCounts mode_counts(int n_exploration_tasks, int n_reconstruction_tasks, int n_robots);

/// Per-robot mode (input order). Robots are ranked by local exploration
/// minus reconstruction task count within d_local, ties by robot id; the top
/// `counts.exploration` robots explore. With counts summing to zero all idle.
std::vector<Mode> assign_modes(std::span<const RobotState> robots, std::span<const Task> tasks,
                               double d_local, const ModeCounts& counts);

// Weights on the four terms of the clustering objective.
struct ClusterWeights {
  double compactness = 1.0;  // D_r
  double robot_distance = 1.0;  // robot to centroid
  double count_balance = 1.0;   // (N_r - mean N)^2
  double distance_balance = 1.0;  // |D_r - mean D|
};

struct ClusterParams {
  ClusterWeights weights;
  int max_iterations = 100;
  double tolerance = 1e-9;
};

struct ClusterAssignment {
  // Per robot (input order): task indices, centroid, D_r, N_r.
  std::vector<std::vector<std::size_t>> robot_tasks;
  std::vector<Vec3> centroids;
  std::vector<double> distance_sums;
  std::vector<int> counts;
  double objective = 0.0;
  std::vector<double> objective_history;  // objective of each iterate
  std::vector<double> best_history;       // best objective so far, per iterate
  int iterations = 0;
};

/// Objective for a labeling (task -> robot index) with the given centroids.
/// An empty cluster has no compactness cost; its robot still pays the
/// distance to its centroid.
double clustering_objective(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                            std::span<const int> labels, std::span<const Vec3> centroids,
                            const ClusterWeights& weights);

/// Same, with centroids taken as the subset means; an empty cluster's
/// centroid is the mean of all tasks.
double clustering_objective(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                            std::span<const int> labels, const ClusterWeights& weights);

/// Balanced clustering minimizing the weighted objective by marginal-cost
/// assignment and centroid updates; clusters are matched to robots greedily
/// by distance.
ClusterAssignment cluster_tasks(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                                const ClusterParams& params);

/// Lloyd k-means seeded at the robot positions, same matching and reporting.
ClusterAssignment plain_kmeans(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                               const ClusterParams& params);

}  // namespace mrrecon
