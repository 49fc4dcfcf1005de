#include "mrrecon/geometry.hpp"

#include "mrrecon/error.hpp"

namespace mrrecon {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kBounds: return "bounds error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kInvariant: return "invariant violation";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

double wrap_angle(double a) {
  if (!std::isfinite(a)) return a;
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

Vec3 view_direction(double yaw, double pitch) {
  return Vec3(std::cos(pitch) * std::cos(yaw), std::cos(pitch) * std::sin(yaw),
              std::sin(pitch));
}

Viewpoint aim_at(const Vec3& from, const Vec3& target) {
  const Vec3 d = target - from;
  Viewpoint v;
  v.position = from;
  v.yaw = std::atan2(d.y(), d.x());
  v.pitch = std::atan2(d.z(), std::hypot(d.x(), d.y()));
  return v;
}

GridGeometry::GridGeometry(const Vec3& origin, GridDims dims, double resolution)
    : origin_(origin), dims_(dims), resolution_(resolution) {
  if (!(resolution > 0.0) || dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0) {
    fail(ErrorCode::kInvalidArgument, "grid geometry requires positive dims and resolution");
  }
}

Coord GridGeometry::coord(std::size_t index) const {
  const auto nx = static_cast<std::size_t>(dims_.nx);
  const auto ny = static_cast<std::size_t>(dims_.ny);
  Coord c;
  c.x = static_cast<int>(index % nx);
  c.y = static_cast<int>((index / nx) % ny);
  c.z = static_cast<int>(index / (nx * ny));
  return c;
}

Coord GridGeometry::coord_of(const Vec3& p) const {
  const Vec3 q = (p - origin_) / resolution_;
  return Coord{static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y())),
               static_cast<int>(std::floor(q.z()))};
}

std::optional<std::size_t> GridGeometry::index_of(const Vec3& p) const {
  if (!p.allFinite()) return std::nullopt;
  const Coord c = coord_of(p);
  if (!contains(c)) return std::nullopt;
  return index(c);
}

Vec3 GridGeometry::center(const Coord& c) const {
  return origin_ + resolution_ * Vec3(c.x + 0.5, c.y + 0.5, c.z + 0.5);
}

}  // namespace mrrecon
