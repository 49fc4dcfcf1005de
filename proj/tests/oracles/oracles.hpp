#pragma once
// Brute-force reference implementations. Each one is written independently
// of the library code it checks and favours obviousness over speed.

#include "mrrecon/geometry.hpp"
#include "mrrecon/voxel_world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <vector>

namespace oracle {

using mrrecon::Coord;
using mrrecon::GridGeometry;
using mrrecon::Vec3;
using mrrecon::VoxelState;
using mrrecon::VoxelWorld;

// ---------------------------------------------------------------- softmax

inline std::vector<double> softmax_naive(const std::vector<double>& s, double scale) {
  // Sum in long double without max-subtraction; inputs are kept small enough.
  std::vector<long double> e(s.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(scale) * s[i]);
    total += e[i];
  }
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(e[i] / total);
  return out;
}

// ---------------------------------------------------------------- frontiers

struct FrontierSet {
  std::vector<std::size_t> voxels;  // sorted
  Vec3 centroid;
};

inline std::vector<FrontierSet> frontiers(const VoxelWorld& w) {
  const GridGeometry& g = w.grid();
  const auto& d = g.dims();
  std::vector<char> is_f(w.size(), 0);
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const std::size_t i = g.index(Coord{x, y, z});
        if (w.state(i) != VoxelState::kEmpty) continue;
        const Coord n6[6] = {{x + 1, y, z}, {x - 1, y, z}, {x, y + 1, z},
                             {x, y - 1, z}, {x, y, z + 1}, {x, y, z - 1}};
        for (const Coord& n : n6) {
          if (g.contains(n) && w.state(g.index(n)) == VoxelState::kUnknown) is_f[i] = 1;
        }
      }
  // Union-find over 26-neighbourhoods.
  std::vector<std::size_t> parent(w.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!is_f[i]) continue;
    const Coord c = g.coord(i);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Coord n{c.x + dx, c.y + dy, c.z + dz};
          if (!g.contains(n)) continue;
          const std::size_t j = g.index(n);
          if (is_f[j]) parent[find(i)] = find(j);
        }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_f[i]) groups[find(i)].push_back(i);
  }
  std::vector<FrontierSet> out;
  for (auto& [root, members] : groups) {
    FrontierSet f;
    f.voxels = members;
    Vec3 sum = Vec3::Zero();
    for (std::size_t v : members) sum += g.center(v);
    f.centroid = sum / static_cast<double>(members.size());
    out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const FrontierSet& a, const FrontierSet& b) {
    if (a.centroid.x() != b.centroid.x()) return a.centroid.x() < b.centroid.x();
    if (a.centroid.y() != b.centroid.y()) return a.centroid.y() < b.centroid.y();
    if (a.centroid.z() != b.centroid.z()) return a.centroid.z() < b.centroid.z();
    return a.voxels.front() < b.voxels.front();
  });
  return out;
}

// ---------------------------------------------------------------- distance field

// Squared voxel distance from every voxel to the nearest obstacle; -1 when
// there is none.
inline std::vector<std::int64_t> squared_distances(const VoxelWorld& w, bool unknown_is_obstacle) {
  const GridGeometry& g = w.grid();
  std::vector<Coord> obstacles;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const VoxelState s = w.state(i);
    if (s == VoxelState::kOccupied || (unknown_is_obstacle && s == VoxelState::kUnknown)) {
      obstacles.push_back(g.coord(i));
    }
  }
  std::vector<std::int64_t> out(w.size(), -1);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Coord c = g.coord(i);
    for (const Coord& o : obstacles) {
      const std::int64_t dx = c.x - o.x, dy = c.y - o.y, dz = c.z - o.z;
      const std::int64_t d2 = dx * dx + dy * dy + dz * dz;
      if (out[i] < 0 || d2 < out[i]) out[i] = d2;
    }
  }
  return out;
}

// ---------------------------------------------------------------- shortest path

// Dijkstra over voxel centers with the planner's movement rules restated:
// intermediate and goal voxels need known-empty plus clearance (occupied-only,
// squared distance >= (c+1)^2) except the goal's clearance; every voxel in the
// box spanned by a move must be known empty.
inline double path_length(const VoxelWorld& w, const Vec3& from, const Vec3& to, int clearance) {
  const GridGeometry& g = w.grid();
  const auto s = g.index_of(from);
  const auto t = g.index_of(to);
  if (!s || !t) return -1.0;
  if (*s == *t) return (to - from).norm();
  const auto sq = squared_distances(w, false);
  const std::int64_t need = static_cast<std::int64_t>(clearance + 1) * (clearance + 1);
  auto empty = [&](const Coord& c) { return w.state(g.index(c)) == VoxelState::kEmpty; };
  auto clear = [&](std::size_t i) { return sq[i] < 0 || sq[i] >= need; };
  std::vector<double> dist(w.size(), std::numeric_limits<double>::infinity());
  using E = std::pair<double, std::size_t>;
  std::priority_queue<E, std::vector<E>, std::greater<>> pq;
  dist[*s] = 0.0;
  pq.emplace(0.0, *s);
  while (!pq.empty()) {
    auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    if (i == *t) break;
    const Coord c = g.coord(i);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!dx && !dy && !dz) continue;
          const Coord n{c.x + dx, c.y + dy, c.z + dz};
          if (!g.contains(n) || !empty(n)) continue;
          const std::size_t j = g.index(n);
          if (j != *t && !clear(j)) continue;
          bool box = true;
          for (int z = std::min(c.z, n.z); z <= std::max(c.z, n.z); ++z)
            for (int y = std::min(c.y, n.y); y <= std::max(c.y, n.y); ++y)
              for (int x = std::min(c.x, n.x); x <= std::max(c.x, n.x); ++x)
                box = box && empty(Coord{x, y, z});
          if (!box) continue;
          const double nd = d + g.resolution() * std::sqrt(double(dx * dx + dy * dy + dz * dz));
          if (nd < dist[j]) {
            dist[j] = nd;
            pq.emplace(nd, j);
          }
        }
  }
  if (!std::isfinite(dist[*t])) return std::numeric_limits<double>::infinity();
  // Endpoint stubs: the polyline runs from `from` to the start center and
  // from the goal center to `to`.
  return dist[*t] + (g.center(*s) - from).norm() + (to - g.center(*t)).norm();
}

// ---------------------------------------------------------------- visibility

// Camera frame from yaw/pitch, written from spherical coordinates.
inline void camera_axes(double yaw, double pitch, Vec3& fwd, Vec3& right, Vec3& up) {
  fwd = Vec3(std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), std::sin(pitch));
  right = Vec3(std::sin(yaw), -std::cos(yaw), 0.0);
  up = Vec3(-std::cos(yaw) * std::sin(pitch), -std::sin(yaw) * std::sin(pitch), std::cos(pitch));
}

inline bool in_frustum(const mrrecon::CameraModel& cam, const mrrecon::Viewpoint& v, const Vec3& p) {
  Vec3 f, r, u;
  camera_axes(v.yaw, v.pitch, f, r, u);
  const Vec3 d = p - v.position;
  if (d.norm() > cam.max_range) return false;
  const double depth = d.dot(f);
  if (depth <= 0) return false;
  const double az = std::atan2(std::abs(d.dot(r)), depth);
  const double el = std::atan2(std::abs(d.dot(u)), depth);
  return az <= cam.hfov / 2 && el <= cam.vfov / 2;
}

// Segment/box overlap by the slab method over [0, t_end] (open interval).
inline bool segment_hits_box(const Vec3& a, const Vec3& dir, double t_end, const Vec3& lo,
                             const Vec3& hi) {
  double t0 = 0.0, t1 = t_end;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir[k]) < 1e-300) {
      if (a[k] <= lo[k] || a[k] >= hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - a[k]) / dir[k];
    double tb = (hi[k] - a[k]) / dir[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  return t0 < t1;
}

// Visible when in the frustum and no known-occupied voxel other than the
// target's own voxel crosses the segment before the target voxel is entered.
inline bool visible(const VoxelWorld& w, const mrrecon::CameraModel& cam,
                    const mrrecon::Viewpoint& v, const Vec3& p) {
  const GridGeometry& g = w.grid();
  const auto target = g.index_of(p);
  if (!target) return false;
  const Vec3 d = p - v.position;
  const double len = d.norm();
  if (len == 0.0) return true;
  if (!in_frustum(cam, v, p)) return false;
  const Vec3 dir = d / len;
  const double res = g.resolution();
  const Vec3 tlo = g.center(*target) - Vec3::Constant(res / 2);
  const Vec3 thi = g.center(*target) + Vec3::Constant(res / 2);
  // Entry parameter of the target voxel along the ray.
  double t_enter = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir[k]) < 1e-300) continue;
    double ta = (tlo[k] - v.position[k]) / dir[k];
    double tb = (thi[k] - v.position[k]) / dir[k];
    t_enter = std::max(t_enter, std::min(ta, tb));
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i == *target || w.state(i) != VoxelState::kOccupied) continue;
    const Vec3 c = g.center(i);
    if (segment_hits_box(v.position, dir, t_enter, c - Vec3::Constant(res / 2),
                         c + Vec3::Constant(res / 2))) {
      return false;
    }
  }
  return true;
}

inline double gain(const VoxelWorld& w, const mrrecon::CameraModel& cam, const mrrecon::Viewpoint& v,
                   const std::vector<Vec3>& pts, const std::vector<double>& sig) {
  double total = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (visible(w, cam, v, pts[k])) total += sig[k] * std::exp(-0.5 * (pts[k] - v.position).norm());
  }
  return total;
}

// ---------------------------------------------------------------- POIs

// The greedy selection restated literally: repeatedly take the
// highest-uncertainty admissible point (lowest index on ties).
inline std::vector<std::size_t> greedy_pois(const std::vector<Vec3>& pts,
                                            const std::vector<double>& sig, double d_poi) {
  std::vector<std::size_t> chosen;
  std::vector<char> taken(pts.size(), 0);
  for (;;) {
    long best = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (taken[i]) continue;
      bool ok = true;
      for (std::size_t c : chosen) ok = ok && (pts[i] - pts[c]).norm() >= d_poi;
      if (!ok) continue;
      if (best < 0 || sig[i] > sig[static_cast<std::size_t>(best)]) best = static_cast<long>(i);
    }
    if (best < 0) return chosen;
    chosen.push_back(static_cast<std::size_t>(best));
    taken[static_cast<std::size_t>(best)] = 1;
  }
}

// ---------------------------------------------------------------- pruning

inline std::vector<std::size_t> prune(const std::vector<Vec3>& pts, const std::vector<Vec3>& ref,
                                      double threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& r : ref) best = std::min(best, (pts[i] - r).norm());
    if (best <= threshold) keep.push_back(i);
  }
  return keep;
}

// ---------------------------------------------------------------- ATSP

// Best open tour from node 0 over nodes 1..n by full permutation.
inline double atsp_brute(const std::vector<std::vector<double>>& c, std::vector<std::size_t>& best_order) {
  std::vector<std::size_t> perm(c.size() - 1);
  std::iota(perm.begin(), perm.end(), 1);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    std::size_t prev = 0;
    for (std::size_t p : perm) {
      cost += c[prev][p];
      prev = p;
    }
    if (cost < best) {
      best = cost;
      best_order = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---------------------------------------------------------------- clustering

// Objective of a labeling with centroids at subset means, restated. An
// empty subset is placed at the mean of all tasks.
inline double cluster_objective(const std::vector<Vec3>& robots, const std::vector<Vec3>& tasks,
                                const std::vector<int>& label) {
  const std::size_t k = robots.size();
  std::vector<Vec3> mean(k, Vec3::Zero());
  std::vector<int> n(k, 0);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    mean[label[t]] += tasks[t];
    n[label[t]]++;
  }
  std::vector<double> D(k, 0.0);
  Vec3 all = Vec3::Zero();
  for (const Vec3& t : tasks) all += t;
  for (std::size_t r = 0; r < k; ++r) {
    if (n[r]) mean[r] /= n[r];
    else mean[r] = tasks.empty() ? robots[r] : Vec3(all / double(tasks.size()));
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) D[label[t]] += (tasks[t] - mean[label[t]]).norm();
  const double nbar = double(tasks.size()) / double(k);
  double dbar = 0.0;
  for (double d : D) dbar += d / double(k);
  double obj = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    obj += D[r] + (robots[r] - mean[r]).norm();
    obj += (n[r] - nbar) * (n[r] - nbar) + std::abs(D[r] - dbar);
  }
  return obj;
}

inline double cluster_brute_min(const std::vector<Vec3>& robots, const std::vector<Vec3>& tasks) {
  const std::size_t k = robots.size();
  std::vector<int> label(tasks.size(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < tasks.size(); ++i) combos *= k;
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      label[t] = static_cast<int>(c % k);
      c /= k;
    }
    best = std::min(best, cluster_objective(robots, tasks, label));
  }
  return best;
}

}  // namespace oracle
