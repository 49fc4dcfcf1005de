#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>

namespace mrrecon {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Camera pose: yaw about +z, pitch positive upwards.
struct Viewpoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Wraps an angle into [-pi, pi].
double wrap_angle(double a);

/// Unit forward vector for a yaw/pitch pair.
Vec3 view_direction(double yaw, double pitch);

/// Yaw/pitch that aim from `from` at `target`.
Viewpoint aim_at(const Vec3& from, const Vec3& target);

struct Coord {
  int x = 0;
  int y = 0;
  int z = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

// Placement of a regular voxel grid in world coordinates. Linear voxel index
// is x + nx * (y + ny * z).
class GridGeometry {
 public:
  GridGeometry() = default;
  GridGeometry(const Vec3& origin, GridDims dims, double resolution);

  const Vec3& origin() const { return origin_; }
  const GridDims& dims() const { return dims_; }
  double resolution() const { return resolution_; }
  std::size_t size() const { return dims_.size(); }

  bool contains(const Coord& c) const {
    return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < dims_.nx &&
           c.y < dims_.ny && c.z < dims_.nz;
  }
  std::size_t index(const Coord& c) const {
    return static_cast<std::size_t>(c.x) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(c.y) +
                static_cast<std::size_t>(dims_.ny) * static_cast<std::size_t>(c.z));
  }
  Coord coord(std::size_t index) const;

  Coord coord_of(const Vec3& p) const;
  std::optional<std::size_t> index_of(const Vec3& p) const;
  Vec3 center(const Coord& c) const;
  Vec3 center(std::size_t index) const { return center(coord(index)); }

  // Strides for +1 along each axis in linear index space.
  std::array<std::int64_t, 3> strides() const {
    return {1, dims_.nx, static_cast<std::int64_t>(dims_.nx) * dims_.ny};
  }

 private:
  Vec3 origin_ = Vec3::Zero();
  GridDims dims_;
  double resolution_ = 1.0;
};

// One voxel visited by a ray.
struct RayStep {
  std::size_t index = 0;
  Coord coord;
  double t_entry = 0.0;  // distance along the ray at which the voxel is entered
  int entry_axis = -1;   // axis of the face crossed to enter; -1 for the start voxel
};

// 3D DDA voxel traversal (Amanatides & Woo). `dir` must be unit length. The
// visitor returns false to stop. Traversal ends when leaving the grid or when
// the next voxel would be entered beyond `max_t`. Ties at voxel edges and
// corners step toward the lower linear index.
template <typename Visitor>
void traverse_ray(const GridGeometry& grid, const Vec3& start, const Vec3& dir,
                  double max_t, Visitor&& visit) {
  Coord c = grid.coord_of(start);
  if (!grid.contains(c)) return;
  const double res = grid.resolution();
  const auto strides = grid.strides();
  std::array<int, 3> cell{c.x, c.y, c.z};
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      const double boundary = grid.origin()[a] + (cell[a] + 1) * res;
      t_max[a] = (boundary - start[a]) / dir[a];
      t_delta[a] = res / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      const double boundary = grid.origin()[a] + cell[a] * res;
      t_max[a] = (boundary - start[a]) / dir[a];
      t_delta[a] = -res / dir[a];
    } else {
      step[a] = 0;
      t_max[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }
  const GridDims& d = grid.dims();
  std::size_t index = grid.index(c);
  RayStep rs{index, c, 0.0, -1};
  if (!visit(rs)) return;
  for (;;) {
    double t_next = std::min({t_max[0], t_max[1], t_max[2]});
    if (!(t_next <= max_t)) return;
    int axis = -1;
    std::int64_t best_index = 0;
    for (int a = 0; a < 3; ++a) {
      if (t_max[a] != t_next) continue;
      const std::int64_t candidate =
          static_cast<std::int64_t>(index) + step[a] * strides[a];
      if (axis < 0 || candidate < best_index) {
        axis = a;
        best_index = candidate;
      }
    }
    cell[axis] += step[axis];
    if (cell[axis] < 0 || cell[0] >= d.nx || cell[1] >= d.ny || cell[2] >= d.nz) return;
    index = static_cast<std::size_t>(best_index);
    t_max[axis] += t_delta[axis];
    rs = RayStep{index, Coord{cell[0], cell[1], cell[2]}, t_next, axis};
    if (!visit(rs)) return;
  }
}

}  // namespace mrrecon
