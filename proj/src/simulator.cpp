#include "mrrecon/simulator.hpp"

#include "mrrecon/error.hpp"
#include "mrrecon/reports.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <fstream>

namespace mrrecon {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json pose_json(const Viewpoint& v) {
  return {{"position", vec_json(v.position)}, {"yaw", v.yaw}, {"pitch", v.pitch}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

bool same_pose(const Viewpoint& a, const Viewpoint& b) {
  return (a.position - b.position).norm() <= 1e-9 && std::abs(wrap_angle(a.yaw - b.yaw)) <= 1e-9 &&
         std::abs(a.pitch - b.pitch) <= 1e-9;
}

constexpr int kNeighbors6[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                   {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};

}  // namespace

Simulator::Simulator(Config config, std::shared_ptr<const Scene> scene, bool record_deposits)
    : config_(std::move(config)),
      flags_(flags_for(config_.variant)),
      world_(scene),
      cache_(scene->grid),
      registry_(scene, config_.lambda_e) {
  config_.validate();
  config_.camera.validate();
  config_.loss.validate();
  if (config_.robots.empty()) fail(ErrorCode::kConfig, "/robots: at least one robot is required");
  const GridGeometry& g = world_.grid();
  for (std::size_t r = 0; r < config_.robots.size(); ++r) {
    const auto idx = g.index_of(config_.robots[r].position);
    if (!idx) fail(ErrorCode::kConfig, "/robots/" + std::to_string(r) + ": start outside the scene");
    if (world_.truth_occupied(*idx)) {
      fail(ErrorCode::kConfig, "/robots/" + std::to_string(r) + ": start inside an obstacle");
    }
  }
  cache_.set_deposit_log(record_deposits);
  poses_ = config_.robots;
  path_lengths_.assign(poses_.size(), 0.0);

  // Reachable truth: free space 6-connected to a start.
  reachable_.assign(world_.size(), 0);
  std::deque<std::size_t> queue;
  for (const Viewpoint& p : poses_) {
    const std::size_t i = *g.index_of(p.position);
    if (!reachable_[i]) {
      reachable_[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const Coord c = g.coord(i);
    for (const auto& d : kNeighbors6) {
      const Coord n{c.x + d[0], c.y + d[1], c.z + d[2]};
      if (!g.contains(n)) continue;
      const std::size_t j = g.index(n);
      if (reachable_[j]) continue;
      if (world_.truth_occupied(j)) continue;
      reachable_[j] = 1;
      queue.push_back(j);
    }
  }
  reachable_count_ = static_cast<std::size_t>(
      std::count_if(reachable_.begin(), reachable_.end(), [](std::uint8_t v) { return v != 0; }));

  // Instance voxels with a free face: the surfaces residual uncertainty covers.
  for (std::size_t i = 0; i < world_.size(); ++i) {
    if (world_.truth_instance(i) == kNoInstance) continue;
    const Coord c = g.coord(i);
    for (const auto& d : kNeighbors6) {
      const Coord n{c.x + d[0], c.y + d[1], c.z + d[2]};
      if (g.contains(n) && !world_.truth_occupied(g.index(n))) {
        surface_instance_voxels_.push_back(i);
        break;
      }
    }
  }

  for (std::size_t r = 0; r < poses_.size() && views_ < config_.budget; ++r) sense_at(r, poses_[r]);
  record(0, nullptr, 0.0, 0.0, 0, 0);
  timings_.push_back(CycleTiming{0, 0.0, 0.0, 0.0});
  if (views_ >= config_.budget) stop_reason_ = "budget";
}

void Simulator::sense_at(std::size_t robot, const Viewpoint& pose) {
  (void)robot;
  const ObservationFrame frame = sense(world_, config_.camera, pose);
  sensed_poses_.insert(pose_key(pose));
  LossFrame losses;
  std::vector<InstanceHit> hits;
  losses.reserve(frame.rays.size());
  hits.reserve(frame.rays.size());
  const GridGeometry& g = world_.grid();
  for (const RayHit& h : frame.rays) {
    if (!h.hit) continue;
    const auto [color, depth] =
        synth_loss(world_, pose, h, cache_.count(h.voxel), config_.loss, config_.seed);
    losses.push_back(LossSample{g.center(h.voxel), color, depth});
    hits.push_back(InstanceHit{h.voxel, world_.truth_instance(h.voxel)});
  }
  cache_.project_losses(losses, config_.lambda_d);
  registry_.register_observation(hits);
  ++views_;
  if (++frames_since_prune_ >= config_.prune_interval) {
    frames_since_prune_ = 0;
    prune();
  }
}

// Cache entries with no known-occupied voxel within the threshold are
// treated as floaters and dropped.
void Simulator::prune() {
  const auto surface = cache_.surface_points();
  std::vector<Vec3> points;
  points.reserve(surface.size());
  for (const SurfacePoint& p : surface) points.push_back(p.position);
  std::vector<Vec3> reference;
  for (std::size_t i = 0; i < world_.size(); ++i) {
    if (world_.state(i) == VoxelState::kOccupied) reference.push_back(world_.grid().center(i));
  }
  const PruneResult kept = prune_outliers(points, reference, config_.prune_threshold);
  std::size_t k = 0;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    if (k < kept.retained.size() && kept.retained[k] == i) {
      ++k;
      continue;
    }
    cache_.erase(surface[i].voxel);
  }
}

double Simulator::coverage() const {
  if (reachable_count_ == 0) return 1.0;
  std::size_t known = 0;
  for (std::size_t i = 0; i < reachable_.size(); ++i) {
    if (reachable_[i] && world_.state(i) != VoxelState::kUnknown) ++known;
  }
  return static_cast<double>(known) / static_cast<double>(reachable_count_);
}

double Simulator::residual_uncertainty() const {
  if (surface_instance_voxels_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t v : surface_instance_voxels_) {
    if (const CacheEntry* e = cache_.find(v)) {
      sum += e->mean_loss;
    } else {
      // Never observed: the projected loss a first head-on observation would deposit.
      const InstanceSpec* spec = world_.scene().find_instance(world_.truth_instance(v));
      const double color = config_.loss.base * spec->complexity;
      sum += projected_loss(color, config_.loss.depth_ratio * color, config_.lambda_d);
    }
  }
  return sum / static_cast<double>(surface_instance_voxels_.size());
}

CycleTasks Simulator::generate_tasks(const FreeSpace& free_space, ReconSource source) const {
  CycleTasks out;
  out.frontiers = extract_frontiers(world_);
  out.tasks = gen_exploration_tasks(free_space, out.frontiers, config_.camera, config_.tasks);
  // Sensing is a function of pose and truth only, so an exact repeat of a
  // sensed pose cannot reveal anything.
  std::erase_if(out.tasks, [&](const Task& t) { return sensed_poses_.count(pose_key(t.view)) > 0; });
  out.exploration = static_cast<int>(out.tasks.size());
  std::vector<Task> rec;
  if (source == ReconSource::kSemantic) {
    const auto records = registry_.snapshot();
    out.gated = gate_reconstruction(records, config_.c_min, config_.c_max);
    std::vector<ReconInstance> instances;
    for (const InstanceRecord& r : out.gated) instances.push_back(make_recon_instance(r, cache_));
    rec = gen_reconstruction_tasks(free_space, config_.camera, instances, config_.tasks);
  } else if (source == ReconSource::kSurface) {
    rec = surface_uncertainty_rec_tasks(free_space, config_.camera, cache_, config_.tasks);
  }
  out.reconstruction = static_cast<int>(rec.size());
  out.tasks.insert(out.tasks.end(), rec.begin(), rec.end());
  return out;
}

void Simulator::record(int cycle, const CycleTasks* tasks, double cluster_obj, double tour_obj,
                       int robots_exp, int robots_rec) {
  CycleRecord r;
  r.cycle = cycle;
  r.views = views_;
  r.coverage = coverage();
  r.residual_uncertainty = residual_uncertainty();
  if (tasks) {
    r.frontiers = static_cast<int>(tasks->frontiers.size());
    r.gated_instances = static_cast<int>(tasks->gated.size());
    r.exploration_tasks = tasks->exploration;
    r.reconstruction_tasks = tasks->reconstruction;
  }
  r.robots_exploration = robots_exp;
  r.robots_reconstruction = robots_rec;
  r.cluster_objective = cluster_obj;
  r.tour_objective = tour_obj;
  r.collisions = collisions_;
  r.path_lengths = path_lengths_;
  if (!records_.empty()) {
    const CycleRecord& prev = records_.back();
    if (r.coverage < prev.coverage) fail(ErrorCode::kInvariant, "coverage decreased");
    for (std::size_t i = 0; i < r.path_lengths.size(); ++i) {
      if (r.path_lengths[i] < prev.path_lengths[i]) fail(ErrorCode::kInvariant, "path length decreased");
    }
  }
  if (views_ > config_.budget) fail(ErrorCode::kInvariant, "view budget exceeded");
  records_.push_back(std::move(r));
}

bool Simulator::step() {
  if (finished()) return false;
  const int cycle = ++cycle_;
  const std::size_t n = poses_.size();
  CycleTiming timing{cycle, 0.0, 0.0, 0.0};

  auto t0 = std::chrono::steady_clock::now();
  const FreeSpace free_space(world_, config_.clearance_voxels);
  const PathPlanner planner(free_space);
  const CycleTasks ct = generate_tasks(free_space, flags_.recon);
  timing.task_seconds = seconds_since(t0);
  reconstruction_total_ += ct.reconstruction;
  if (ct.tasks.empty()) {
    record(cycle, &ct, 0.0, 0.0, 0, 0);
    timings_.push_back(timing);
    stop_reason_ = "no_tasks";
    return false;
  }

  // Mode assignment and clustering.
  t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<std::size_t>> robot_tasks(n);
  std::vector<std::string> modes(n, "idle");
  std::vector<Vec3> centroids(n, Vec3::Zero());
  std::vector<double> distance_sums(n, 0.0);
  double cluster_obj = 0.0;
  int robots_exp = 0;
  int robots_rec = 0;
  ModeCounts counts;
  auto cluster_group = [&](const std::vector<std::size_t>& group,
                           const std::vector<std::size_t>& task_ids, const char* mode) {
    if (group.empty() || task_ids.empty()) return;
    std::vector<Vec3> robot_pos;
    std::vector<Vec3> task_pos;
    for (std::size_t r : group) robot_pos.push_back(poses_[r].position);
    for (std::size_t t : task_ids) task_pos.push_back(ct.tasks[t].view.position);
    const ClusterAssignment ca = flags_.improved_clustering
                                     ? cluster_tasks(robot_pos, task_pos, config_.cluster)
                                     : plain_kmeans(robot_pos, task_pos, config_.cluster);
    cluster_obj += ca.objective;
    for (std::size_t k = 0; k < group.size(); ++k) {
      const std::size_t r = group[k];
      for (std::size_t t : ca.robot_tasks[k]) robot_tasks[r].push_back(task_ids[t]);
      centroids[r] = ca.centroids[k];
      distance_sums[r] = ca.distance_sums[k];
      if (!robot_tasks[r].empty()) modes[r] = mode;
    }
  };
  std::vector<std::size_t> exp_ids;
  std::vector<std::size_t> rec_ids;
  for (std::size_t t = 0; t < ct.tasks.size(); ++t) {
    (ct.tasks[t].kind == TaskKind::kExploration ? exp_ids : rec_ids).push_back(t);
  }
  if (flags_.mode_assignment) {
    counts = mode_counts(ct.exploration, ct.reconstruction, static_cast<int>(n));
    std::vector<RobotState> states(n);
    for (std::size_t r = 0; r < n; ++r) {
      states[r].id = static_cast<int>(r);
      states[r].pose = poses_[r];
    }
    const auto assigned = assign_modes(states, ct.tasks, config_.d_local, counts);
    std::vector<std::size_t> exp_group;
    std::vector<std::size_t> rec_group;
    for (std::size_t r = 0; r < n; ++r) {
      if (assigned[r] == Mode::kExploration) exp_group.push_back(r);
      if (assigned[r] == Mode::kReconstruction) rec_group.push_back(r);
    }
    cluster_group(exp_group, exp_ids, "exploration");
    cluster_group(rec_group, rec_ids, "reconstruction");
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t r = 0; r < n; ++r) all[r] = r;
    std::vector<std::size_t> task_ids(ct.tasks.size());
    for (std::size_t t = 0; t < task_ids.size(); ++t) task_ids[t] = t;
    cluster_group(all, task_ids, "mixed");
  }
  for (std::size_t r = 0; r < n; ++r) {
    robots_exp += modes[r] == "exploration";
    robots_rec += modes[r] == "reconstruction";
  }
  timing.collaboration_seconds = seconds_since(t0);

  // Tours, smoothing and execution sampling.
  t0 = std::chrono::steady_clock::now();
  std::vector<RobotPlan> plans(n);
  std::vector<std::vector<Viewpoint>> samples(n);
  double tour_obj = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (robot_tasks[r].empty()) continue;
    std::vector<Task> mine;
    for (std::size_t t : robot_tasks[r]) mine.push_back(ct.tasks[t]);
    plans[r] = plan_robot(planner, poses_[r], mine, config_.tour);
    plans[r].tour.robot_id = static_cast<int>(r);
    tour_obj += plans[r].tour.total;
    auto& s = samples[r];
    s = plans[r].samples;
    // A tour that fits the execution budget ends at its last task's view.
    if (!plans[r].tour.order.empty() && polyline_length(plans[r].path) <= config_.tour.l_exec) {
      Viewpoint last = mine[plans[r].tour.order.back()].view;
      last.position = plans[r].path.back();
      if (s.empty() || !same_pose(s.back(), last)) s.push_back(last);
    }
    // The current pose was sensed already, unless it is all the tour asks for.
    if (s.size() > 1 && same_pose(s.front(), poses_[r])) s.erase(s.begin());
  }
  timing.planning_seconds = seconds_since(t0);

  if (artifact_dir_) {
    const auto dir = *artifact_dir_ / "cycles";
    std::filesystem::create_directories(dir);
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "cycle_%03d_", cycle);
    write_text(dir / (std::string(prefix) + "tasks.json"), tasks_json(ct.tasks));
    json robots = json::array();
    json tours = json::array();
    for (std::size_t r = 0; r < n; ++r) {
      robots.push_back({{"robot", r},
                        {"mode", modes[r]},
                        {"tasks", robot_tasks[r]},
                        {"centroid", vec_json(centroids[r])},
                        {"distance_sum", distance_sums[r]},
                        {"count", robot_tasks[r].size()}});
      json order = json::array();
      json dropped = json::array();
      for (std::size_t t : plans[r].tour.order) order.push_back(robot_tasks[r][t]);
      for (std::size_t t : plans[r].tour.dropped) dropped.push_back(robot_tasks[r][t]);
      json poses = json::array();
      for (const Viewpoint& v : samples[r]) poses.push_back(pose_json(v));
      tours.push_back({{"robot", r},
                       {"order", order},
                       {"leg_costs", plans[r].tour.leg_costs},
                       {"total", plans[r].tour.total},
                       {"dropped", dropped},
                       {"samples", poses}});
    }
    json assignments = {{"cycle", cycle},
                        {"mode_assignment", flags_.mode_assignment},
                        {"mode_counts",
                         {{"exploration", counts.exploration},
                          {"reconstruction", counts.reconstruction}}},
                        {"cluster_objective", cluster_obj},
                        {"tour_objective", tour_obj},
                        {"robots", robots}};
    write_text(dir / (std::string(prefix) + "assignments.json"), assignments.dump(2) + "\n");
    write_text(dir / (std::string(prefix) + "tours.json"), tours.dump(2) + "\n");
  }

  // Lock-step execution: one viewpoint per robot per tick, robot-id order.
  const int views_before = views_;
  std::size_t ticks = 0;
  for (const auto& s : samples) ticks = std::max(ticks, s.size());
  const GridGeometry& g = world_.grid();
  for (std::size_t t = 0; t < ticks && views_ < config_.budget; ++t) {
    for (std::size_t r = 0; r < n && views_ < config_.budget; ++r) {
      if (t >= samples[r].size()) continue;
      path_lengths_[r] += (samples[r][t].position - poses_[r].position).norm();
      poses_[r] = samples[r][t];
      sense_at(r, poses_[r]);
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (g.index_of(poses_[a].position) == g.index_of(poses_[b].position)) ++collisions_;
  }

  record(cycle, &ct, cluster_obj, tour_obj, robots_exp, robots_rec);
  timings_.push_back(timing);
  if (views_ >= config_.budget) {
    stop_reason_ = "budget";
  } else if (views_ == views_before) {
    stop_reason_ = "stalled";
  } else if (cycle >= config_.max_cycles) {
    stop_reason_ = "max_cycles";
  }
  return !finished();
}

void Simulator::run() {
  while (step()) {
  }
}

RunResult Simulator::result() const {
  RunResult r;
  r.variant = config_.variant;
  r.cycles = records_;
  r.timings = timings_;
  r.stop_reason = stop_reason_;
  r.views = views_;
  r.coverage = coverage();
  r.residual_uncertainty = residual_uncertainty();
  for (double l : path_lengths_) r.total_path_length += l;
  r.reconstruction_tasks = reconstruction_total_;
  return r;
}

RunResult run_simulation(const Config& config, const std::filesystem::path& out_dir) {
  config.validate();
  if (config.scene.empty()) fail(ErrorCode::kConfig, "/scene: a scene file is required");
  std::shared_ptr<const Scene> scene;
  try {
    scene = load_scene(config.scene);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, "/scene: " + std::string(e.what()));
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "effective_config.json", config_json(config));
  }
  Simulator sim(config, scene);
  if (!out_dir.empty()) sim.set_artifact_dir(out_dir);
  sim.run();
  RunResult result = sim.result();
  if (!out_dir.empty()) {
    {
      std::ofstream out(out_dir / "metrics.csv", std::ios::binary);
      write_metrics_csv(result, out);
    }
    {
      std::ofstream out(out_dir / "timings.csv", std::ios::binary);
      write_timings_csv(result, out);
    }
    {
      std::ofstream out(out_dir / "cache.csv", std::ios::binary);
      write_cache_csv(sim.cache(), out);
    }
    write_text(out_dir / "summary.json", summary_json(result));
    write_text(out_dir / "instances.json", registry_json(sim.registry()));
  }
  return result;
}

std::vector<RunResult> compare_variants(const std::vector<Config>& configs,
                                        const std::filesystem::path& out_dir) {
  for (const Config& c : configs) {
    if (c.scene != configs.front().scene || c.seed != configs.front().seed) {
      fail(ErrorCode::kConfig, "compared configurations must share scene and seed");
    }
  }
  std::vector<RunResult> results;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::filesystem::path dir;
    if (!out_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof name, "%02zu_%s", i, to_string(configs[i].variant));
      dir = out_dir / name;
    }
    results.push_back(run_simulation(configs[i], dir));
  }
  if (!out_dir.empty()) {
    std::ofstream out(out_dir / "comparison.csv", std::ios::binary);
    write_comparison_csv(results, out);
  }
  return results;
}

}  // namespace mrrecon
