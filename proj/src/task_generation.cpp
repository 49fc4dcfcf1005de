#include "mrrecon/task_generation.hpp"

#include "mrrecon/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace mrrecon {

const char* to_string(TaskKind kind) {
  return kind == TaskKind::kExploration ? "exploration" : "reconstruction";
}

std::vector<Viewpoint> sample_views(const FreeSpace& free_space, const Vec3& center,
                                    const ViewSamplingParams& params) {
  std::vector<Viewpoint> out;
  if (params.yaw_samples <= 0) return out;
  for (double r : params.radii) {
    for (double pitch : params.pitch_levels) {
      for (int k = 0; k < params.yaw_samples; ++k) {
        Viewpoint v;
        v.yaw = wrap_angle(2.0 * kPi * k / params.yaw_samples);
        v.pitch = pitch;
        v.position = center - r * view_direction(v.yaw, v.pitch);
        if (free_space.traversable(v.position)) out.push_back(v);
      }
    }
  }
  return out;
}

bool point_visible(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                   const Vec3& target) {
  const GridGeometry& g = world.grid();
  const auto target_voxel = g.index_of(target);
  const Vec3 delta = target - view.position;
  const double dist = delta.norm();
  // A point at the camera center counts as seen.
  if (!target_voxel || dist == 0.0) return target_voxel.has_value();
  if (!camera.sees(view, target)) return false;
  bool visible = true;
  traverse_ray(g, view.position, delta / dist, dist, [&](const RayStep& s) {
    if (s.index == *target_voxel) return false;
    if (world.state(s.index) == VoxelState::kOccupied) {
      visible = false;
      return false;
    }
    return true;
  });
  return visible;
}

double info_gain(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                 std::span<const Vec3> points, std::span<const double> uncertainties) {
  if (points.size() != uncertainties.size()) {
    fail(ErrorCode::kInvalidArgument, "points and uncertainties are not aligned");
  }
  double gain = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!point_visible(world, camera, view, points[k])) continue;
    gain += uncertainties[k] * std::exp(-0.5 * (points[k] - view.position).norm());
  }
  return gain;
}

void downsample_surface(std::span<const Vec3> points, std::span<const double> uncertainties,
                        int n_down, std::vector<Vec3>& points_out,
                        std::vector<double>& uncertainties_out) {
  if (n_down < 1) fail(ErrorCode::kInvalidArgument, "n_down must be >= 1");
  if (points.size() != uncertainties.size()) {
    fail(ErrorCode::kInvalidArgument, "points and uncertainties are not aligned");
  }
  points_out.clear();
  uncertainties_out.clear();
  for (std::size_t i = 0; i < points.size(); i += static_cast<std::size_t>(n_down)) {
    points_out.push_back(points[i]);
    uncertainties_out.push_back(uncertainties[i]);
  }
}

std::vector<Poi> select_pois(std::span<const Vec3> points, std::span<const double> uncertainties,
                             double d_poi) {
  if (!(d_poi > 0.0)) fail(ErrorCode::kInvalidArgument, "d_poi must be > 0");
  if (points.size() != uncertainties.size()) {
    fail(ErrorCode::kInvalidArgument, "points and uncertainties are not aligned");
  }
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Descending uncertainty, ascending index; a single pass over this order
  // reproduces the iterative max-then-filter greedy since the admissible set
  // only shrinks.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return uncertainties[a] > uncertainties[b];
  });
  const double d2 = d_poi * d_poi;
  std::vector<Poi> pois;
  for (std::size_t i : order) {
    bool far = true;
    for (const Poi& p : pois) {
      if ((points[i] - p.position).squaredNorm() < d2) {
        far = false;
        break;
      }
    }
    if (far) pois.push_back(Poi{i, points[i], uncertainties[i]});
  }
  return pois;
}

int frontier_coverage(const VoxelWorld& world, const CameraModel& camera, const Viewpoint& view,
                      const Frontier& frontier) {
  int n = 0;
  for (std::size_t v : frontier.voxels) {
    if (point_visible(world, camera, view, world.grid().center(v))) ++n;
  }
  return n;
}

std::vector<Task> gen_exploration_tasks(const FreeSpace& free_space,
                                        std::span<const Frontier> frontiers,
                                        const CameraModel& camera, const TaskGenParams& params) {
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < frontiers.size(); ++i) {
    const auto candidates = sample_views(free_space, frontiers[i].centroid, params.rings);
    int best = -1;
    int best_score = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const int score = frontier_coverage(free_space.world(), camera, candidates[c], frontiers[i]);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(c);
      }
    }
    if (best < 0) continue;
    Task t;
    t.kind = TaskKind::kExploration;
    t.view = candidates[static_cast<std::size_t>(best)];
    t.gain = best_score;
    t.source = TaskSource{static_cast<std::int32_t>(i), -1};
    tasks.push_back(t);
  }
  return tasks;
}

std::vector<Task> reconstruction_tasks_for_surface(const FreeSpace& free_space,
                                                   const CameraModel& camera,
                                                   std::span<const Vec3> points,
                                                   std::span<const double> uncertainties,
                                                   std::int32_t source_id,
                                                   const TaskGenParams& params) {
  std::vector<Vec3> pts;
  std::vector<double> unc;
  downsample_surface(points, uncertainties, params.n_down, pts, unc);
  const auto pois = select_pois(pts, unc, params.d_poi);
  std::vector<Task> tasks;
  for (std::size_t j = 0; j < pois.size(); ++j) {
    const auto candidates = sample_views(free_space, pois[j].position, params.rings);
    if (candidates.empty()) continue;
    std::size_t best = 0;
    double best_gain = -kInf;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double g = info_gain(free_space.world(), camera, candidates[c], pts, unc);
      if (g > best_gain) {
        best_gain = g;
        best = c;
      }
    }
    Task t;
    t.kind = TaskKind::kReconstruction;
    t.view = candidates[best];
    t.gain = best_gain;
    t.source = TaskSource{source_id, static_cast<std::int32_t>(j)};
    tasks.push_back(t);
  }
  return tasks;
}

std::vector<Task> gen_reconstruction_tasks(const FreeSpace& free_space, const CameraModel& camera,
                                           std::span<const ReconInstance> instances,
                                           const TaskGenParams& params) {
  std::vector<Task> tasks;
  for (const ReconInstance& inst : instances) {
    auto t = reconstruction_tasks_for_surface(free_space, camera, inst.points, inst.uncertainties,
                                              inst.id, params);
    tasks.insert(tasks.end(), t.begin(), t.end());
  }
  return tasks;
}

std::vector<Task> surface_uncertainty_rec_tasks(const FreeSpace& free_space,
                                                const CameraModel& camera,
                                                const UncertaintyCache& cache,
                                                const TaskGenParams& params) {
  const auto surface = cache.surface_points();
  std::vector<Vec3> pts;
  std::vector<double> unc;
  pts.reserve(surface.size());
  unc.reserve(surface.size());
  for (const SurfacePoint& p : surface) {
    pts.push_back(p.position);
    unc.push_back(p.uncertainty);
  }
  return reconstruction_tasks_for_surface(free_space, camera, pts, unc, -1, params);
}

std::string tasks_json(std::span<const Task> tasks) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    arr.push_back({{"id", i},
                   {"kind", to_string(t.kind)},
                   {"position", {t.view.position.x(), t.view.position.y(), t.view.position.z()}},
                   {"yaw", t.view.yaw},
                   {"pitch", t.view.pitch},
                   {"gain", t.gain},
                   {"source", {{"id", t.source.id}, {"poi", t.source.poi}}}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace mrrecon
