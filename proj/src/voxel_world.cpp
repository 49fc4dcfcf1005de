#include "mrrecon/voxel_world.hpp"

#include "mrrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <tuple>

namespace mrrecon {

void CameraModel::validate() const {
  if (!(hfov > 0.0 && hfov < kPi)) fail(ErrorCode::kInvalidArgument, "camera hfov must be in (0, pi)");
  if (!(vfov > 0.0 && vfov < kPi)) fail(ErrorCode::kInvalidArgument, "camera vfov must be in (0, pi)");
  if (!(max_range > 0.0)) fail(ErrorCode::kInvalidArgument, "camera max_range must be > 0");
  if (width < 0 || height < 0) fail(ErrorCode::kInvalidArgument, "camera raster must be >= 0");
}

namespace {

struct CameraFrame {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

CameraFrame frame_of(const Viewpoint& view) {
  CameraFrame f;
  f.forward = view_direction(view.yaw, view.pitch);
  f.right = Vec3(std::sin(view.yaw), -std::cos(view.yaw), 0.0);
  f.up = f.right.cross(f.forward);
  return f;
}

}  // namespace

bool CameraModel::sees(const Viewpoint& view, const Vec3& p) const {
  const Vec3 d = p - view.position;
  if (d.norm() > max_range) return false;
  const CameraFrame f = frame_of(view);
  const double z = d.dot(f.forward);
  if (!(z > 0.0)) return false;
  return std::abs(d.dot(f.right)) <= z * std::tan(hfov / 2.0) &&
         std::abs(d.dot(f.up)) <= z * std::tan(vfov / 2.0);
}

Vec3 CameraModel::ray_direction(const Viewpoint& view, int row, int col) const {
  const CameraFrame f = frame_of(view);
  const double x = ((col + 0.5) / width * 2.0 - 1.0) * std::tan(hfov / 2.0);
  const double y = (1.0 - (row + 0.5) / height * 2.0) * std::tan(vfov / 2.0);
  return (f.forward + x * f.right + y * f.up).normalized();
}

// ---------------------------------------------------------------------------

VoxelWorld::VoxelWorld(std::shared_ptr<const Scene> scene)
    : scene_(std::move(scene)), state_(scene_->grid.size(), VoxelState::kUnknown) {}

bool VoxelWorld::observe(std::size_t index, VoxelState observed) {
  VoxelState& s = state_[index];
  if (observed == VoxelState::kUnknown || s == observed) return false;
  if (s != VoxelState::kUnknown) {
    fail(ErrorCode::kInvariant, "voxel " + std::to_string(index) + " flipped between occupied and empty");
  }
  s = observed;
  return true;
}

std::size_t VoxelWorld::count(VoxelState s) const {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

ObservationFrame sense(VoxelWorld& world, const CameraModel& camera, const Viewpoint& pose) {
  camera.validate();
  const GridGeometry& grid = world.grid();
  const auto start = grid.index_of(pose.position);
  if (!start) fail(ErrorCode::kBounds, "sensor pose outside the scene extent");
  if (world.truth_occupied(*start) || world.state(*start) == VoxelState::kOccupied) {
    fail(ErrorCode::kInvalidArgument, "sensor pose inside an occupied voxel");
  }
  ObservationFrame frame;
  frame.pose = pose;
  frame.rays.reserve(static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height));
  for (int row = 0; row < camera.height; ++row) {
    for (int col = 0; col < camera.width; ++col) {
      RayHit ray;
      ray.direction = camera.ray_direction(pose, row, col);
      traverse_ray(grid, pose.position, ray.direction, camera.max_range, [&](const RayStep& s) {
        if (world.truth_occupied(s.index)) {
          ray.hit = true;
          ray.voxel = s.index;
          ray.distance = s.t_entry;
          ray.face_axis = s.entry_axis;
          frame.newly_known += world.observe(s.index, VoxelState::kOccupied) ? 1 : 0;
          return false;
        }
        frame.newly_known += world.observe(s.index, VoxelState::kEmpty) ? 1 : 0;
        return true;
      });
      frame.rays.push_back(ray);
    }
  }
  return frame;
}

// ---------------------------------------------------------------------------

bool is_frontier_voxel(const VoxelWorld& world, std::size_t index) {
  if (world.state(index) != VoxelState::kEmpty) return false;
  const GridGeometry& g = world.grid();
  const Coord c = g.coord(index);
  static constexpr int kFace[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                      {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  for (const auto& o : kFace) {
    const Coord n{c.x + o[0], c.y + o[1], c.z + o[2]};
    if (g.contains(n) && world.state(g.index(n)) == VoxelState::kUnknown) return true;
  }
  return false;
}

std::vector<Frontier> extract_frontiers(const VoxelWorld& world) {
  const GridGeometry& g = world.grid();
  std::vector<std::uint8_t> flag(world.size(), 0);
  for (std::size_t i = 0; i < world.size(); ++i) flag[i] = is_frontier_voxel(world, i) ? 1 : 0;

  std::vector<Frontier> frontiers;
  std::vector<std::uint8_t> visited(world.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < world.size(); ++seed) {
    if (!flag[seed] || visited[seed]) continue;
    Frontier f;
    visited[seed] = 1;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      f.voxels.push_back(cur);
      const Coord c = g.coord(cur);
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Coord n{c.x + dx, c.y + dy, c.z + dz};
            if (!g.contains(n)) continue;
            const std::size_t ni = g.index(n);
            if (flag[ni] && !visited[ni]) {
              visited[ni] = 1;
              queue.push_back(ni);
            }
          }
    }
    std::sort(f.voxels.begin(), f.voxels.end());
    Vec3 sum = Vec3::Zero();
    for (std::size_t v : f.voxels) sum += g.center(v);
    f.centroid = sum / static_cast<double>(f.voxels.size());
    frontiers.push_back(std::move(f));
  }
  std::sort(frontiers.begin(), frontiers.end(), [](const Frontier& a, const Frontier& b) {
    return std::make_tuple(a.centroid.x(), a.centroid.y(), a.centroid.z(), a.voxels.front()) <
           std::make_tuple(b.centroid.x(), b.centroid.y(), b.centroid.z(), b.voxels.front());
  });
  return frontiers;
}

// ---------------------------------------------------------------------------

DistanceField::DistanceField(GridGeometry grid, std::vector<std::int64_t> squared_voxels)
    : grid_(std::move(grid)), sq_(std::move(squared_voxels)) {}

double DistanceField::meters(std::size_t index) const {
  const std::int64_t d = sq_[index];
  if (d == kNoObstacle) return kInf;
  return std::sqrt(static_cast<double>(d)) * grid_.resolution();
}

namespace {

// Squared distance transform of a sampled function along one line
// (Felzenszwalb & Huttenlocher lower envelope of parabolas).
void edt_1d(std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
            std::vector<int>& v, std::vector<double>& z) {
  constexpr std::int64_t kFar = DistanceField::kNoObstacle;
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kFar) continue;
    const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
      const double s = (fq - fp) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    if (k == 0) {
      z[k] = -kInf;
    } else {
      const int p = v[k - 1];
      const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
      z[k] = (fq - fp) / (2.0 * (q - p));
    }
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kFar);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (j < k && z[j + 1] < q) ++j;
    const std::int64_t d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

}  // namespace

DistanceField distance_field(const VoxelWorld& world, ObstacleSet obstacles) {
  const GridGeometry& g = world.grid();
  const GridDims& d = g.dims();
  std::vector<std::int64_t> sq(world.size(), DistanceField::kNoObstacle);
  for (std::size_t i = 0; i < world.size(); ++i) {
    const VoxelState s = world.state(i);
    const bool obstacle = s == VoxelState::kOccupied ||
                          (obstacles == ObstacleSet::kOccupiedOrUnknown && s == VoxelState::kUnknown);
    if (obstacle) sq[i] = 0;
  }
  const int longest = std::max({d.nx, d.ny, d.nz});
  std::vector<std::int64_t> line(static_cast<std::size_t>(longest)), out(line.size());
  std::vector<int> v(line.size());
  std::vector<double> z(line.size() + 1);
  const auto strides = g.strides();
  const int extent[3] = {d.nx, d.ny, d.nz};
  for (int axis = 0; axis < 3; ++axis) {
    const int n = extent[axis];
    line.resize(static_cast<std::size_t>(n));
    out.resize(static_cast<std::size_t>(n));
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (int i2 = 0; i2 < extent[a2]; ++i2) {
      for (int i1 = 0; i1 < extent[a1]; ++i1) {
        const std::int64_t base = i1 * strides[a1] + i2 * strides[a2];
        for (int q = 0; q < n; ++q) line[q] = sq[static_cast<std::size_t>(base + q * strides[axis])];
        edt_1d(line, out, v, z);
        for (int q = 0; q < n; ++q) sq[static_cast<std::size_t>(base + q * strides[axis])] = out[q];
      }
    }
  }
  return DistanceField(g, std::move(sq));
}

}  // namespace mrrecon
