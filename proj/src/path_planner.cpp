#include "mrrecon/path_planner.hpp"

#include "mrrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace mrrecon {

FreeSpace::FreeSpace(const VoxelWorld& world, int clearance_voxels)
    : world_(&world),
      clearance_voxels_(clearance_voxels),
      clearance_(distance_field(world, ObstacleSet::kOccupiedOnly)),
      min_sq_(static_cast<std::int64_t>(clearance_voxels + 1) * (clearance_voxels + 1)) {
  if (clearance_voxels < 0) fail(ErrorCode::kInvalidArgument, "clearance must be >= 0");
}

bool FreeSpace::traversable(std::size_t index) const {
  return known_empty(index) && clearance_.squared_voxels(index) >= min_sq_;
}

bool FreeSpace::traversable(const Vec3& p) const {
  const auto i = grid().index_of(p);
  return i && traversable(*i);
}

bool FreeSpace::known_empty(const Vec3& p) const {
  const auto i = grid().index_of(p);
  return i && known_empty(*i);
}

bool FreeSpace::move_allowed(const Coord& from, const Coord& to) const {
  const GridGeometry& g = grid();
  if (!g.contains(to) || !traversable(g.index(to))) return false;
  for (int z = std::min(from.z, to.z); z <= std::max(from.z, to.z); ++z)
    for (int y = std::min(from.y, to.y); y <= std::max(from.y, to.y); ++y)
      for (int x = std::min(from.x, to.x); x <= std::max(from.x, to.x); ++x) {
        if (!known_empty(g.index(Coord{x, y, z}))) return false;
      }
  return true;
}

// ---------------------------------------------------------------------------

PathPlanner::PathPlanner(const FreeSpace& free_space) : free_(&free_space) {
  const std::size_t n = free_space.grid().size();
  g_.assign(n, kInf);
  stamp_.assign(n, 0);
  parent_.assign(n, -1);
  closed_.assign(n, 0);
}

namespace {

// Exact 26-connected distance in an obstacle-free grid (consistent).
double octile(const Coord& a, const Coord& b) {
  std::array<int, 3> d{std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)};
  std::sort(d.begin(), d.end());
  return (std::sqrt(3.0) - std::sqrt(2.0)) * d[0] + (std::sqrt(2.0) - 1.0) * d[1] + d[2];
}

void push_unique(std::vector<Vec3>& pts, const Vec3& p) {
  if (pts.empty() || pts.back() != p) pts.push_back(p);
}

double polyline_length(const std::vector<Vec3>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

}  // namespace

PathResult PathPlanner::shortest_path(const Vec3& from, const Vec3& to) const {
  const GridGeometry& g = free_->grid();
  const auto si = g.index_of(from);
  const auto ti = g.index_of(to);
  if (!si || !free_->known_empty(*si)) {
    fail(ErrorCode::kInvalidArgument, "path start is not in known free space");
  }
  if (!ti || !free_->known_empty(*ti)) {
    fail(ErrorCode::kInvalidArgument, "path goal is not in known free space");
  }
  PathResult result;
  if (*si == *ti) {
    result.reachable = true;
    push_unique(result.polyline, from);
    push_unique(result.polyline, to);
    result.length = polyline_length(result.polyline);
    return result;
  }

  if (++generation_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    generation_ = 1;
  }
  const double res = g.resolution();
  const Coord goal = g.coord(*ti);
  auto touch = [&](std::size_t i) {
    if (stamp_[i] != generation_) {
      stamp_[i] = generation_;
      g_[i] = kInf;
      parent_[i] = -1;
      closed_[i] = 0;
    }
  };
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  touch(*si);
  g_[*si] = 0.0;
  open.emplace(octile(g.coord(*si), goal) * res, *si);
  bool found = false;
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (closed_[cur]) continue;
    closed_[cur] = 1;
    if (cur == *ti) {
      found = true;
      break;
    }
    const Coord c = g.coord(cur);
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Coord n{c.x + dx, c.y + dy, c.z + dz};
          if (!g.contains(n)) continue;
          const std::size_t ni = g.index(n);
          // The goal endpoint is exempt from clearance, not from the box rule.
          if (ni == *ti) {
            bool box_ok = true;
            for (int z = std::min(c.z, n.z); z <= std::max(c.z, n.z) && box_ok; ++z)
              for (int y = std::min(c.y, n.y); y <= std::max(c.y, n.y) && box_ok; ++y)
                for (int x = std::min(c.x, n.x); x <= std::max(c.x, n.x); ++x)
                  if (!free_->known_empty(g.index(Coord{x, y, z}))) {
                    box_ok = false;
                    break;
                  }
            if (!box_ok) continue;
          } else if (!free_->move_allowed(c, n)) {
            continue;
          }
          touch(ni);
          if (closed_[ni]) continue;
          const double step = res * std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
          const double cand = g_[cur] + step;
          if (cand < g_[ni]) {
            g_[ni] = cand;
            parent_[ni] = static_cast<std::int64_t>(cur);
            open.emplace(cand + octile(n, goal) * res, ni);
          }
        }
  }
  if (!found) {
    result.reachable = false;
    result.length = kInf;
    return result;
  }
  std::vector<std::size_t> chain;
  for (std::int64_t i = static_cast<std::int64_t>(*ti); i >= 0; i = parent_[static_cast<std::size_t>(i)]) {
    chain.push_back(static_cast<std::size_t>(i));
  }
  std::reverse(chain.begin(), chain.end());
  result.reachable = true;
  push_unique(result.polyline, from);
  for (std::size_t i : chain) push_unique(result.polyline, g.center(i));
  push_unique(result.polyline, to);
  result.length = polyline_length(result.polyline);
  return result;
}

PathResult shortest_path(const VoxelWorld& world, const Vec3& from, const Vec3& to,
                         int clearance_voxels) {
  const FreeSpace fs(world, clearance_voxels);
  const PathPlanner planner(fs);
  return planner.shortest_path(from, to);
}

}  // namespace mrrecon
