#pragma once

#include "mrrecon/path_planner.hpp"
#include "mrrecon/task_generation.hpp"

#include <span>
#include <vector>

namespace mrrecon {

enum class CostCombine { kMax, kSum };

struct TravelCostParams {
  double v_max = 2.0;          // m/s
  double yaw_rate = kPi;       // rad/s
  double pitch_rate = kPi / 2;  // rad/s
  CostCombine combine = CostCombine::kMax;
  void validate() const;
};

/// Travel time for a known path length and the wrapped yaw/pitch change.
double travel_time(double path_length, const Viewpoint& from, const Viewpoint& to,
                   const TravelCostParams& params);

/// Travel time along the shortest free-space path; +inf when unreachable.
double travel_cost(const PathPlanner& planner, const Viewpoint& from, const Viewpoint& to,
                   const TravelCostParams& params);

// Square matrix of directed costs; node 0 is the tour start.
class CostMatrix {
 public:
  explicit CostMatrix(std::size_t nodes = 0) : n_(nodes), c_(nodes * nodes, 0.0) {}
  std::size_t nodes() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return c_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> c_;
};

enum class AtspMethod { kAuto, kExact, kHeuristic, kNearestNeighbor };

struct Tour {
  int robot_id = 0;
  std::vector<std::size_t> order;    // task indices (matrix node - 1)
  std::vector<double> leg_costs;     // leg k ends at order[k]
  double total = 0.0;
  std::vector<std::size_t> dropped;  // tasks unreachable from the start
};

inline constexpr std::size_t kExactTaskLimit = 10;

/// Open tour from node 0 through every task reachable from it. kAuto uses
/// Held-Karp up to kExactTaskLimit tasks and the local-search heuristic above.
Tour solve_atsp(const CostMatrix& costs, AtspMethod method = AtspMethod::kAuto);

/// Cost of visiting `order` (task indices) from node 0.
double tour_cost(const CostMatrix& costs, std::span<const std::size_t> order);

/// Uniform cubic B-spline through clamped control points, sampled every
/// `step` meters or finer. Spans with a sample outside known free space fall
/// back to the control polygon; if that fails too the input is returned.
std::vector<Vec3> smooth_path(const FreeSpace& free_space, std::span<const Vec3> waypoints,
                              double step);

struct OrientationKey {
  double arc = 0.0;  // arc length along the path, meters
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Poses every `speed * dt` meters of arc length from the path start, while
/// the arc length stays within min(l_exec, path length). Orientation is
/// interpolated between keys (wrapped). With `free_space`, a sample that
/// falls outside known free space snaps to the nearer segment endpoint.
std::vector<Viewpoint> sample_execution(std::span<const Vec3> path,
                                        std::span<const OrientationKey> keys, double speed,
                                        double dt, double l_exec,
                                        const FreeSpace* free_space = nullptr);

double polyline_length(std::span<const Vec3> path);

struct TourPlanParams {
  TravelCostParams cost;
  AtspMethod method = AtspMethod::kAuto;
  double smoothing_step = 0.05;  // meters
  double dt = 0.4;               // seconds
  double l_exec = 6.0;           // meters
};

struct RobotPlan {
  Tour tour;
  std::vector<Vec3> path;  // smoothed, start pose to last task
  std::vector<OrientationKey> keys;
  std::vector<Viewpoint> samples;
};

/// Orders `tasks` from `start`, smooths each leg and samples the execution.
RobotPlan plan_robot(const PathPlanner& planner, const Viewpoint& start,
                     std::span<const Task> tasks, const TourPlanParams& params);

}  // namespace mrrecon
