#include "mrrecon/tour_planning.hpp"

#include "mrrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace mrrecon {

void TravelCostParams::validate() const {
  if (!(v_max > 0.0) || !(yaw_rate > 0.0) || !(pitch_rate > 0.0)) {
    fail(ErrorCode::kConfig, "travel speeds and rotation rates must be > 0");
  }
}

double travel_time(double path_length, const Viewpoint& from, const Viewpoint& to,
                   const TravelCostParams& params) {
  if (!std::isfinite(path_length)) return kInf;
  const double t_move = path_length / params.v_max;
  const double t_yaw = std::abs(wrap_angle(to.yaw - from.yaw)) / params.yaw_rate;
  const double t_pitch = std::abs(wrap_angle(to.pitch - from.pitch)) / params.pitch_rate;
  if (params.combine == CostCombine::kSum) return t_move + t_yaw + t_pitch;
  return std::max({t_move, t_yaw, t_pitch});
}

double travel_cost(const PathPlanner& planner, const Viewpoint& from, const Viewpoint& to,
                   const TravelCostParams& params) {
  const PathResult r = planner.shortest_path(from.position, to.position);
  return r.reachable ? travel_time(r.length, from, to, params) : kInf;
}

double tour_cost(const CostMatrix& costs, std::span<const std::size_t> order) {
  double total = 0.0;
  std::size_t prev = 0;
  for (std::size_t t : order) {
    total += costs.at(prev, t + 1);
    prev = t + 1;
  }
  return total;
}

namespace {

constexpr std::size_t kHeldKarpMax = 16;
constexpr std::size_t kMultiStart = 12;

std::vector<std::size_t> held_karp(const CostMatrix& c, std::span<const std::size_t> tasks) {
  const std::size_t n = tasks.size();
  if (n == 0) return {};
  if (n > kHeldKarpMax) fail(ErrorCode::kInvalidArgument, "too many tasks for the exact solver");
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> dp((full + 1) * n, kInf);
  std::vector<std::int8_t> parent((full + 1) * n, -1);
  auto node = [&](std::size_t j) { return tasks[j] + 1; };
  for (std::size_t j = 0; j < n; ++j) dp[(std::size_t{1} << j) * n + j] = c.at(0, node(j));
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double here = dp[mask * n + j];
      if (here == kInf) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (std::size_t{1} << k)) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const double cand = here + c.at(node(j), node(k));
        if (cand < dp[next * n + k]) {
          dp[next * n + k] = cand;
          parent[next * n + k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }
  std::size_t end = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (dp[full * n + j] < dp[full * n + end]) end = j;
  }
  std::vector<std::size_t> order;
  std::size_t mask = full;
  std::int64_t j = static_cast<std::int64_t>(end);
  while (j >= 0) {
    order.push_back(tasks[static_cast<std::size_t>(j)]);
    const std::int8_t p = parent[mask * n + static_cast<std::size_t>(j)];
    mask &= ~(std::size_t{1} << static_cast<std::size_t>(j));
    j = p;
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Greedy chain from the start; `first` (an index into `tasks`) forces the
// opening task.
std::vector<std::size_t> nearest_neighbor(const CostMatrix& c, std::span<const std::size_t> tasks,
                                          std::optional<std::size_t> first = std::nullopt) {
  std::vector<std::size_t> left(tasks.begin(), tasks.end());
  std::vector<std::size_t> order;
  std::size_t prev = 0;
  if (first) {
    order.push_back(left[*first]);
    prev = left[*first] + 1;
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(*first));
  }
  while (!left.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < left.size(); ++k) {
      if (c.at(prev, left[k] + 1) < c.at(prev, left[best] + 1)) best = k;
    }
    order.push_back(left[best]);
    prev = left[best] + 1;
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

bool improves(double candidate, double current) {
  return candidate < current - 1e-12 * std::max(1.0, std::abs(current));
}

// First-improvement Or-opt (segments of 1-3 tasks, kept in direction) and
// segment reversal, repeated until neither finds an improving move.
void local_search(const CostMatrix& c, std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  if (n < 2) return;
  double current = tour_cost(c, order);
  std::vector<std::size_t> trial;
  trial.reserve(n);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t len = 1; len <= 3 && !improved; ++len) {
      for (std::size_t i = 0; i + len <= n && !improved; ++i) {
        std::vector<std::size_t> rest;
        rest.reserve(n - len);
        rest.insert(rest.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i));
        rest.insert(rest.end(), order.begin() + static_cast<std::ptrdiff_t>(i + len), order.end());
        for (std::size_t p = 0; p <= rest.size(); ++p) {
          if (p == i) continue;
          trial.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(p));
          trial.insert(trial.end(), order.begin() + static_cast<std::ptrdiff_t>(i),
                       order.begin() + static_cast<std::ptrdiff_t>(i + len));
          trial.insert(trial.end(), rest.begin() + static_cast<std::ptrdiff_t>(p), rest.end());
          const double cost = tour_cost(c, trial);
          if (improves(cost, current)) {
            order = trial;
            current = cost;
            improved = true;
            break;
          }
        }
      }
    }
    for (std::size_t i = 0; i + 1 < n && !improved; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        trial = order;
        std::reverse(trial.begin() + static_cast<std::ptrdiff_t>(i),
                     trial.begin() + static_cast<std::ptrdiff_t>(j + 1));
        const double cost = tour_cost(c, trial);
        if (improves(cost, current)) {
          order = trial;
          current = cost;
          improved = true;
          break;
        }
      }
    }
  }
}

}  // namespace

Tour solve_atsp(const CostMatrix& costs, AtspMethod method) {
  if (costs.nodes() == 0) fail(ErrorCode::kInvalidArgument, "cost matrix has no start node");
  Tour tour;
  std::vector<std::size_t> tasks;
  for (std::size_t j = 1; j < costs.nodes(); ++j) {
    if (std::isfinite(costs.at(0, j))) {
      tasks.push_back(j - 1);
    } else {
      tour.dropped.push_back(j - 1);
    }
  }
  if (method == AtspMethod::kAuto) {
    method = tasks.size() <= kExactTaskLimit ? AtspMethod::kExact : AtspMethod::kHeuristic;
  }
  switch (method) {
    case AtspMethod::kExact:
      tour.order = held_karp(costs, tasks);
      break;
    case AtspMethod::kNearestNeighbor:
      tour.order = nearest_neighbor(costs, tasks);
      break;
    default: {
      // Plain greedy chain plus chains forced to open with each of the
      // cheapest first legs; each is polished and the best kept.
      tour.order = nearest_neighbor(costs, tasks);
      local_search(costs, tour.order);
      double best = tour_cost(costs, tour.order);
      std::vector<std::size_t> by_first(tasks.size());
      std::iota(by_first.begin(), by_first.end(), std::size_t{0});
      std::stable_sort(by_first.begin(), by_first.end(), [&](std::size_t a, std::size_t b) {
        return costs.at(0, tasks[a] + 1) < costs.at(0, tasks[b] + 1);
      });
      by_first.resize(std::min(by_first.size(), kMultiStart));
      for (std::size_t f : by_first) {
        auto order = nearest_neighbor(costs, tasks, f);
        local_search(costs, order);
        const double cost = tour_cost(costs, order);
        if (improves(cost, best)) {
          best = cost;
          tour.order = std::move(order);
        }
      }
      break;
    }
  }
  std::size_t prev = 0;
  for (std::size_t t : tour.order) {
    tour.leg_costs.push_back(costs.at(prev, t + 1));
    tour.total += tour.leg_costs.back();
    prev = t + 1;
  }
  return tour;
}

// ---------------------------------------------------------------------------

double polyline_length(std::span<const Vec3> path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

namespace {

// Appends points along a->b every `step` (excluding a); false if one of them
// is not known free.
bool append_segment(const FreeSpace& fs, const Vec3& a, const Vec3& b, double step,
                    std::vector<Vec3>& out) {
  const double len = (b - a).norm();
  const int m = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int k = 1; k <= m; ++k) {
    const Vec3 p = a + (b - a) * (static_cast<double>(k) / m);
    if (!fs.known_empty(p)) return false;
    out.push_back(p);
  }
  return true;
}

void push_distinct(std::vector<Vec3>& out, const Vec3& p) {
  if (out.empty() || (out.back() - p).norm() > 1e-12) out.push_back(p);
}

}  // namespace

std::vector<Vec3> smooth_path(const FreeSpace& free_space, std::span<const Vec3> waypoints,
                              double step) {
  if (waypoints.size() < 2) fail(ErrorCode::kInvalidArgument, "smoothing needs two waypoints");
  if (!(step > 0.0)) fail(ErrorCode::kInvalidArgument, "smoothing step must be > 0");
  const auto n = static_cast<std::int64_t>(waypoints.size());
  // Control point k of the clamped sequence: waypoints tripled at both ends.
  auto ctrl = [&](std::int64_t k) -> const Vec3& {
    return waypoints[static_cast<std::size_t>(std::clamp<std::int64_t>(k - 2, 0, n - 1))];
  };
  auto span_start = [&](std::int64_t i) -> Vec3 {
    return (ctrl(i) + 4.0 * ctrl(i + 1) + ctrl(i + 2)) / 6.0;
  };
  std::vector<Vec3> out{waypoints.front()};
  std::vector<Vec3> piece;
  for (std::int64_t i = 0; i <= n; ++i) {
    const Vec3& q0 = ctrl(i);
    const Vec3& q1 = ctrl(i + 1);
    const Vec3& q2 = ctrl(i + 2);
    const Vec3& q3 = ctrl(i + 3);
    const double hull = (q1 - q0).norm() + (q2 - q1).norm() + (q3 - q2).norm();
    const int m = std::max(1, static_cast<int>(std::ceil(hull / step)));
    piece.clear();
    bool ok = true;
    for (int k = 1; k <= m && ok; ++k) {
      const double u = static_cast<double>(k) / m;
      const double v = 1.0 - u;
      const Vec3 p = (v * v * v * q0 + (3 * u * u * u - 6 * u * u + 4) * q1 +
                      (-3 * u * u * u + 3 * u * u + 3 * u + 1) * q2 + u * u * u * q3) /
                     6.0;
      ok = free_space.known_empty(p);
      piece.push_back(p);
    }
    if (!ok) {
      piece.clear();
      const Vec3 from = span_start(i);
      const Vec3 to = span_start(i + 1);
      if (!append_segment(free_space, from, q1, step, piece) ||
          !append_segment(free_space, q1, q2, step, piece) ||
          !append_segment(free_space, q2, to, step, piece)) {
        return {waypoints.begin(), waypoints.end()};
      }
    }
    for (const Vec3& p : piece) push_distinct(out, p);
  }
  if ((out.back() - waypoints.back()).norm() <= 1e-9) {
    out.back() = waypoints.back();
  } else {
    out.push_back(waypoints.back());
  }
  return out;
}

std::vector<Viewpoint> sample_execution(std::span<const Vec3> path,
                                        std::span<const OrientationKey> keys, double speed,
                                        double dt, double l_exec, const FreeSpace* free_space) {
  if (!(speed > 0.0) || !(dt > 0.0) || !(l_exec > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "speed, dt and l_exec must be > 0");
  }
  std::vector<Viewpoint> out;
  if (path.empty()) return out;
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + (path[i] - path[i - 1]).norm();
  const double limit = std::min(l_exec, cum.back());
  const double spacing = speed * dt;

  auto orientation = [&](double s, Viewpoint& v) {
    if (keys.empty()) return;
    if (s <= keys.front().arc) {
      v.yaw = keys.front().yaw;
      v.pitch = keys.front().pitch;
      return;
    }
    for (std::size_t k = 1; k < keys.size(); ++k) {
      if (s > keys[k].arc) continue;
      const double span = keys[k].arc - keys[k - 1].arc;
      const double t = span > 0.0 ? (s - keys[k - 1].arc) / span : 1.0;
      v.yaw = wrap_angle(keys[k - 1].yaw + t * wrap_angle(keys[k].yaw - keys[k - 1].yaw));
      v.pitch = keys[k - 1].pitch + t * wrap_angle(keys[k].pitch - keys[k - 1].pitch);
      return;
    }
    v.yaw = keys.back().yaw;
    v.pitch = keys.back().pitch;
  };

  std::size_t seg = 0;
  for (std::int64_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (!(s <= limit)) break;
    while (seg + 1 < path.size() - 1 && cum[seg + 1] < s) ++seg;
    Viewpoint v;
    if (path.size() == 1) {
      v.position = path[0];
    } else {
      const double len = cum[seg + 1] - cum[seg];
      const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
      v.position = path[seg] + t * (path[seg + 1] - path[seg]);
      if (free_space && !free_space->known_empty(v.position)) {
        v.position = t < 0.5 ? path[seg] : path[seg + 1];
      }
    }
    orientation(s, v);
    out.push_back(v);
    if (path.size() == 1) break;
  }
  return out;
}

RobotPlan plan_robot(const PathPlanner& planner, const Viewpoint& start,
                     std::span<const Task> tasks, const TourPlanParams& params) {
  params.cost.validate();
  const std::size_t nodes = tasks.size() + 1;
  auto view = [&](std::size_t i) -> const Viewpoint& { return i == 0 ? start : tasks[i - 1].view; };
  CostMatrix costs(nodes);
  // Shortest-path lengths are symmetric; each unordered pair is searched once.
  std::vector<PathResult> legs(nodes * nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) {
      PathResult r = planner.shortest_path(view(i).position, view(j).position);
      costs.at(i, j) = r.reachable ? travel_time(r.length, view(i), view(j), params.cost) : kInf;
      costs.at(j, i) = r.reachable ? travel_time(r.length, view(j), view(i), params.cost) : kInf;
      PathResult back = r;
      std::reverse(back.polyline.begin(), back.polyline.end());
      if (!back.polyline.empty()) {
        back.polyline.front() = view(j).position;
        back.polyline.back() = view(i).position;
      }
      legs[i * nodes + j] = std::move(r);
      legs[j * nodes + i] = std::move(back);
    }
  }
  RobotPlan plan;
  plan.tour = solve_atsp(costs, params.method);
  plan.path.push_back(start.position);
  plan.keys.push_back(OrientationKey{0.0, start.yaw, start.pitch});
  std::size_t prev = 0;
  double arc = 0.0;
  for (std::size_t t : plan.tour.order) {
    const PathResult& leg = legs[prev * nodes + (t + 1)];
    if (leg.polyline.size() >= 2) {
      const auto smooth = smooth_path(planner.free_space(), leg.polyline, params.smoothing_step);
      for (std::size_t k = 1; k < smooth.size(); ++k) {
        arc += (smooth[k] - plan.path.back()).norm();
        plan.path.push_back(smooth[k]);
      }
    }
    plan.keys.push_back(OrientationKey{arc, tasks[t].view.yaw, tasks[t].view.pitch});
    prev = t + 1;
  }
  plan.samples = sample_execution(plan.path, plan.keys, params.cost.v_max, params.dt,
                                  params.l_exec, &planner.free_space());
  return plan;
}

}  // namespace mrrecon
