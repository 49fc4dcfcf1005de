#include "mrrecon/collaboration.hpp"

#include "mrrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace mrrecon {

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kExploration: return "exploration";
    case Mode::kReconstruction: return "reconstruction";
    case Mode::kIdle: return "idle";
  }
  return "idle";
}

ModeCounts mode_counts(int n_exploration_tasks, int n_reconstruction_tasks, int n_robots) {
  if (n_robots < 1) fail(ErrorCode::kInvalidArgument, "mode_counts needs at least one robot");
  if (n_exploration_tasks < 0 || n_reconstruction_tasks < 0) {
    fail(ErrorCode::kInvalidArgument, "task counts must be >= 0");
  }
  if (n_exploration_tasks == 0 && n_reconstruction_tasks == 0) return {0, 0};
  if (n_exploration_tasks == 0) return {0, n_robots};
  if (n_reconstruction_tasks == 0) return {n_robots, 0};
  const double share = static_cast<double>(n_robots) * n_exploration_tasks /
                       (n_exploration_tasks + n_reconstruction_tasks);
  int exp = static_cast<int>(std::lround(share));
  if (n_robots >= 2) exp = std::clamp(exp, 1, n_robots - 1);
  return {exp, n_robots - exp};
}

std::vector<Mode> assign_modes(std::span<const RobotState> robots, std::span<const Task> tasks,
                               double d_local, const ModeCounts& counts) {
  if (!(d_local > 0.0)) fail(ErrorCode::kInvalidArgument, "d_local must be > 0");
  if (counts.exploration < 0 || counts.reconstruction < 0 ||
      counts.exploration + counts.reconstruction > static_cast<int>(robots.size())) {
    fail(ErrorCode::kInvalidArgument, "mode counts do not fit the robot team");
  }
  std::vector<int> score(robots.size(), 0);
  for (std::size_t r = 0; r < robots.size(); ++r) {
    for (const Task& t : tasks) {
      if ((t.view.position - robots[r].pose.position).norm() > d_local) continue;
      score[r] += t.kind == TaskKind::kExploration ? 1 : -1;
    }
  }
  std::vector<std::size_t> order(robots.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(-score[a], robots[a].id, a) < std::make_tuple(-score[b], robots[b].id, b);
  });
  std::vector<Mode> modes(robots.size(), Mode::kIdle);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int rank = static_cast<int>(k);
    if (rank < counts.exploration) {
      modes[order[k]] = Mode::kExploration;
    } else if (rank < counts.exploration + counts.reconstruction) {
      modes[order[k]] = Mode::kReconstruction;
    }
  }
  return modes;
}

// ---------------------------------------------------------------------------

namespace {

struct ClusterStats {
  std::vector<double> d;  // D_r
  std::vector<int> n;     // N_r
  std::vector<double> robot_gap;  // robot to centroid
};

double objective_from_stats(const ClusterStats& s, double mean_n, const ClusterWeights& w) {
  const std::size_t k = s.d.size();
  const double mean_d = std::accumulate(s.d.begin(), s.d.end(), 0.0) / static_cast<double>(k);
  double obj = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    obj += w.compactness * s.d[r] + w.robot_distance * s.robot_gap[r];
    const double dn = s.n[r] - mean_n;
    obj += w.count_balance * dn * dn + w.distance_balance * std::abs(s.d[r] - mean_d);
  }
  return obj;
}

// Subset means; an empty cluster sits at the mean of all tasks (at the
// robot when there are no tasks at all).
std::vector<Vec3> subset_means(std::span<const Vec3> tasks, std::span<const int> labels,
                               std::span<const Vec3> robots) {
  std::vector<Vec3> sum(robots.size(), Vec3::Zero());
  std::vector<int> n(robots.size(), 0);
  Vec3 all = Vec3::Zero();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    sum[static_cast<std::size_t>(labels[t])] += tasks[t];
    ++n[static_cast<std::size_t>(labels[t])];
    all += tasks[t];
  }
  std::vector<Vec3> out(robots.begin(), robots.end());
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (n[r] > 0) {
      out[r] = sum[r] / n[r];
    } else if (!tasks.empty()) {
      out[r] = all / static_cast<double>(tasks.size());
    }
  }
  return out;
}

void check_inputs(std::span<const Vec3> robots, std::span<const int> labels,
                  std::span<const Vec3> tasks) {
  if (robots.empty()) fail(ErrorCode::kInvalidArgument, "clustering needs at least one robot");
  if (labels.size() != tasks.size()) fail(ErrorCode::kInvalidArgument, "labels and tasks differ in size");
  for (int l : labels) {
    if (l < 0 || l >= static_cast<int>(robots.size())) {
      fail(ErrorCode::kInvalidArgument, "label out of range");
    }
  }
}

// Assigns each task, in order, to the cluster with the smallest objective
// increase given fixed centroids and the partially built clusters.
std::vector<int> marginal_assignment(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                                     std::span<const Vec3> centroids, const ClusterWeights& w) {
  const std::size_t k = robots.size();
  const double mean_n = static_cast<double>(tasks.size()) / static_cast<double>(k);
  ClusterStats s{std::vector<double>(k, 0.0), std::vector<int>(k, 0), std::vector<double>(k)};
  for (std::size_t r = 0; r < k; ++r) s.robot_gap[r] = (robots[r] - centroids[r]).norm();
  std::vector<int> labels(tasks.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const double base = objective_from_stats(s, mean_n, w);
    double best = kInf;
    std::size_t best_r = 0;
    for (std::size_t r = 0; r < k; ++r) {
      const double add = (tasks[t] - centroids[r]).norm();
      s.d[r] += add;
      s.n[r] += 1;
      const double delta = objective_from_stats(s, mean_n, w) - base;
      s.d[r] -= add;
      s.n[r] -= 1;
      if (delta < best) {
        best = delta;
        best_r = r;
      }
    }
    labels[t] = static_cast<int>(best_r);
    s.d[best_r] += (tasks[t] - centroids[best_r]).norm();
    s.n[best_r] += 1;
  }
  return labels;
}

// One-to-one matching of non-empty clusters to robots: greedy by distance,
// then pairwise exchanges.
std::vector<int> match_clusters(std::span<const Vec3> robots, std::span<const Vec3> centroids,
                                std::span<const int> labels) {
  const std::size_t k = robots.size();
  std::vector<int> size(k, 0);
  for (int l : labels) ++size[static_cast<std::size_t>(l)];
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c)
      if (size[c] > 0) pairs.emplace_back((robots[r] - centroids[c]).norm(), r, c);
  std::sort(pairs.begin(), pairs.end());
  std::vector<int> robot_of_cluster(k, -1);
  std::vector<bool> robot_used(k, false);
  for (const auto& [dist, r, c] : pairs) {
    if (robot_used[r] || robot_of_cluster[c] >= 0) continue;
    robot_used[r] = true;
    robot_of_cluster[c] = static_cast<int>(r);
  }
  // Greedy pairing can leave a larger total gap than needed, and the total
  // gap is the only part of the objective the pairing changes. Exchange
  // robots between clusters while that shortens it. Unmatched robots take
  // part too, since a non-empty cluster may move over to them.
  std::vector<int> cluster_of_robot(k, -1);
  for (std::size_t c = 0; c < k; ++c)
    if (robot_of_cluster[c] >= 0) cluster_of_robot[static_cast<std::size_t>(robot_of_cluster[c])] = static_cast<int>(c);
  // A robot left without a cluster still pays its gap to the all-task mean.
  Vec3 idle_spot = Vec3::Zero();
  for (std::size_t c = 0; c < k; ++c)
    if (size[c] > 0) idle_spot += size[c] * centroids[c];
  if (!labels.empty()) idle_spot /= static_cast<double>(labels.size());
  auto gap = [&](std::size_t r, int c) {
    return (robots[r] - (c < 0 ? idle_spot : centroids[static_cast<std::size_t>(c)])).norm();
  };
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        const int ca = cluster_of_robot[a], cb = cluster_of_robot[b];
        if (ca < 0 && cb < 0) continue;
        if (gap(a, cb) + gap(b, ca) < gap(a, ca) + gap(b, cb) - 1e-12) {
          std::swap(cluster_of_robot[a], cluster_of_robot[b]);
          improved = true;
        }
      }
  }
  for (std::size_t r = 0; r < k; ++r)
    if (cluster_of_robot[r] >= 0) robot_of_cluster[static_cast<std::size_t>(cluster_of_robot[r])] = static_cast<int>(r);
  return robot_of_cluster;
}

std::vector<int> relabel(std::span<const int> labels, std::span<const int> robot_of_cluster) {
  std::vector<int> matched(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    matched[t] = robot_of_cluster[static_cast<std::size_t>(labels[t])];
  }
  return matched;
}

std::vector<int> matched_labels(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                                std::span<const int> labels) {
  const auto means = subset_means(tasks, labels, robots);
  return relabel(labels, match_clusters(robots, means, labels));
}

ClusterAssignment finish(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                         std::span<const int> labels, std::span<const Vec3> centroids,
                         const ClusterWeights& w) {
  const std::size_t k = robots.size();
  const auto matched = relabel(labels, match_clusters(robots, centroids, labels));
  ClusterAssignment out;
  out.robot_tasks.assign(k, {});
  out.centroids.assign(robots.begin(), robots.end());
  out.distance_sums.assign(k, 0.0);
  out.counts.assign(k, 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    out.robot_tasks[static_cast<std::size_t>(matched[t])].push_back(t);
  }
  const auto means = subset_means(tasks, matched, robots);
  for (std::size_t r = 0; r < k; ++r) {
    out.counts[r] = static_cast<int>(out.robot_tasks[r].size());
    out.centroids[r] = means[r];
    if (out.counts[r] == 0) continue;
    for (std::size_t t : out.robot_tasks[r]) out.distance_sums[r] += (tasks[t] - means[r]).norm();
  }
  out.objective = clustering_objective(robots, tasks, matched, w);
  return out;
}

std::vector<int> nearest_robot_labels(std::span<const Vec3> robots, std::span<const Vec3> tasks) {
  std::vector<int> labels(tasks.size(), 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    double best = kInf;
    for (std::size_t r = 0; r < robots.size(); ++r) {
      const double d = (tasks[t] - robots[r]).squaredNorm();
      if (d < best) {
        best = d;
        labels[t] = static_cast<int>(r);
      }
    }
  }
  return labels;
}

// Hill climbing over moves and swaps; returns whether anything improved.
bool refine_labels(std::span<const Vec3> robots, std::span<const Vec3> tasks, std::vector<int>& labels,
                   const ClusterParams& params);

}  // namespace

double clustering_objective(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                            std::span<const int> labels, std::span<const Vec3> centroids,
                            const ClusterWeights& weights) {
  check_inputs(robots, labels, tasks);
  const std::size_t k = robots.size();
  if (centroids.size() != k) fail(ErrorCode::kInvalidArgument, "one centroid per robot required");
  ClusterStats s{std::vector<double>(k, 0.0), std::vector<int>(k, 0), std::vector<double>(k)};
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto r = static_cast<std::size_t>(labels[t]);
    s.d[r] += (tasks[t] - centroids[r]).norm();
    s.n[r] += 1;
  }
  for (std::size_t r = 0; r < k; ++r) s.robot_gap[r] = (robots[r] - centroids[r]).norm();
  return objective_from_stats(s, static_cast<double>(tasks.size()) / static_cast<double>(k), weights);
}

double clustering_objective(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                            std::span<const int> labels, const ClusterWeights& weights) {
  check_inputs(robots, labels, tasks);
  const auto means = subset_means(tasks, labels, robots);
  return clustering_objective(robots, tasks, labels, means, weights);
}

ClusterAssignment cluster_tasks(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                                const ClusterParams& params) {
  if (robots.empty()) fail(ErrorCode::kInvalidArgument, "clustering needs at least one robot");
  std::vector<Vec3> centroids(robots.begin(), robots.end());
  std::vector<int> best_labels(tasks.size(), 0);
  std::vector<Vec3> best_centroids = centroids;
  double best = kInf;
  double previous = kInf;
  std::vector<double> history;
  std::vector<double> best_history;
  int iterations = 0;
  for (int it = 0; it < std::max(1, params.max_iterations); ++it) {
    ++iterations;
    const auto labels = marginal_assignment(robots, tasks, centroids, params.weights);
    const auto means = subset_means(tasks, labels, robots);
    const double obj = clustering_objective(robots, tasks, labels, means, params.weights);
    history.push_back(obj);
    if (obj < best) {
      best = obj;
      best_labels = labels;
      best_centroids = means;
    }
    best_history.push_back(best);
    if (it > 0 && previous - obj < params.tolerance) break;
    previous = obj;
    centroids = means;
  }
  // The assign/recompute loop stalls in local minima; finish with exact
  // single-task moves and pair swaps on the objective at subset means.
  // A couple of cheap alternative starts guard against a poor basin.
  std::vector<std::vector<int>> starts{best_labels, nearest_robot_labels(robots, tasks)};
  if (!tasks.empty()) {
    const ClusterAssignment plain = plain_kmeans(robots, tasks, params);
    std::vector<int> plain_labels(tasks.size());
    for (std::size_t r = 0; r < plain.robot_tasks.size(); ++r)
      for (std::size_t t : plain.robot_tasks[r]) plain_labels[t] = static_cast<int>(r);
    starts.push_back(std::move(plain_labels));
  }
  double refined = kInf;
  bool changed = false;
  for (std::vector<int>& start : starts) {
    const bool moved = refine_labels(robots, tasks, start, params);
    const double obj =
        clustering_objective(robots, tasks, matched_labels(robots, tasks, start), params.weights);
    if (obj < refined - params.tolerance) {
      refined = obj;
      changed = moved || &start != &starts.front();
      if (changed) best_labels = start;
    }
  }
  if (changed) {
    best_centroids = subset_means(tasks, best_labels, robots);
    history.push_back(refined);
    best = std::min(best, refined);
    best_history.push_back(best);
  }
  ClusterAssignment out = finish(robots, tasks, best_labels, best_centroids, params.weights);
  out.objective_history = std::move(history);
  out.best_history = std::move(best_history);
  out.iterations = iterations;
  return out;
}

ClusterAssignment plain_kmeans(std::span<const Vec3> robots, std::span<const Vec3> tasks,
                               const ClusterParams& params) {
  if (robots.empty()) fail(ErrorCode::kInvalidArgument, "clustering needs at least one robot");
  std::vector<Vec3> centroids(robots.begin(), robots.end());
  std::vector<int> labels(tasks.size(), -1);
  std::vector<double> history;
  int iterations = 0;
  for (int it = 0; it < std::max(1, params.max_iterations); ++it) {
    ++iterations;
    bool changed = false;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      int best = 0;
      double best_d = kInf;
      for (std::size_t r = 0; r < centroids.size(); ++r) {
        const double d = (tasks[t] - centroids[r]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(r);
        }
      }
      changed = changed || labels[t] != best;
      labels[t] = best;
    }
    centroids = subset_means(tasks, labels, robots);
    history.push_back(clustering_objective(robots, tasks, labels, centroids, params.weights));
    if (!changed) break;
  }
  if (tasks.empty()) labels.clear();
  ClusterAssignment out = finish(robots, tasks, labels, centroids, params.weights);
  out.objective_history = history;
  double best = kInf;
  for (double h : history) {
    best = std::min(best, h);
    out.best_history.push_back(best);
  }
  out.iterations = iterations;
  return out;
}

}  // namespace mrrecon

namespace mrrecon {
namespace {

bool refine_labels(std::span<const Vec3> robots, std::span<const Vec3> tasks, std::vector<int>& labels,
                   const ClusterParams& params) {
  const int k = static_cast<int>(robots.size());
  if (k < 2 || tasks.empty()) return false;
  // Scored after the final cluster-to-robot matching, which is what gets reported.
  auto cost = [&] {
    const auto matched = matched_labels(robots, tasks, labels);
    return clustering_objective(robots, tasks, matched, params.weights);
  };
  double current = cost();
  bool improved_any = false;
  for (int round = 0; round < std::max(1, params.max_iterations); ++round) {
    bool improved = false;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      // Best target rather than first, so robot order does not matter.
      const int from = labels[t];
      int target = from;
      double target_cost = current - params.tolerance;
      for (int r = 0; r < k; ++r) {
        if (r == from) continue;
        labels[t] = r;
        const double c = cost();
        if (c < target_cost) {
          target_cost = c;
          target = r;
        }
      }
      labels[t] = target;
      if (target != from) {
        current = target_cost;
        improved = true;
      }
    }
    for (std::size_t a = 0; a < tasks.size(); ++a)
      for (std::size_t b = a + 1; b < tasks.size(); ++b) {
        if (labels[a] == labels[b]) continue;
        std::swap(labels[a], labels[b]);
        const double c = cost();
        if (c < current - params.tolerance) {
          current = c;
          improved = true;
        } else {
          std::swap(labels[a], labels[b]);
        }
      }
    if (!improved) break;
    improved_any = true;
  }
  return improved_any;
}

}  // namespace
}  // namespace mrrecon
