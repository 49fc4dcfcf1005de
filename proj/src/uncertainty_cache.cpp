#include "mrrecon/uncertainty_cache.hpp"

#include "mrrecon/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace mrrecon {

double projected_loss(double color_loss, double depth_loss, double lambda_d) {
  return color_loss + lambda_d * depth_loss;
}

UncertaintyCache::UncertaintyCache(GridGeometry grid) : grid_(std::move(grid)) {}

void UncertaintyCache::project_losses(const LossFrame& frame, double lambda_d) {
  if (!(lambda_d >= 0.0) || !std::isfinite(lambda_d)) {
    fail(ErrorCode::kInvalidArgument, "lambda_d must be >= 0");
  }
  std::vector<std::size_t> voxels;
  voxels.reserve(frame.size());
  for (const LossSample& s : frame) {
    if (!(s.color_loss >= 0.0) || !(s.depth_loss >= 0.0) || !std::isfinite(s.color_loss) ||
        !std::isfinite(s.depth_loss)) {
      fail(ErrorCode::kInvalidArgument, "losses must be finite and >= 0");
    }
    const auto v = grid_.index_of(s.hit_position);
    if (!v) fail(ErrorCode::kBounds, "loss sample outside the cache grid");
    voxels.push_back(*v);
  }
  for (std::size_t i = 0; i < frame.size(); ++i) {
    deposit(voxels[i], projected_loss(frame[i].color_loss, frame[i].depth_loss, lambda_d));
  }
}

void UncertaintyCache::deposit(std::size_t voxel, double loss) {
  auto [it, inserted] = entries_.try_emplace(voxel);
  CacheEntry& e = it->second;
  if (inserted) {
    e.position = grid_.center(voxel);
    e.mean_loss = loss;
    e.count = 1;
  } else {
    e.mean_loss = (e.mean_loss * static_cast<double>(e.count) + loss) / static_cast<double>(e.count + 1);
    e.count += 1;
  }
  if (log_enabled_) log_.push_back(Deposit{voxel, loss});
}

const CacheEntry* UncertaintyCache::find(std::size_t voxel) const {
  auto it = entries_.find(voxel);
  return it == entries_.end() ? nullptr : &it->second;
}

std::int64_t UncertaintyCache::count(std::size_t voxel) const {
  const CacheEntry* e = find(voxel);
  return e ? e->count : 0;
}

bool UncertaintyCache::erase(std::size_t voxel) {
  const bool removed = entries_.erase(voxel) > 0;
  if (removed && log_enabled_) log_.push_back(Deposit{voxel, std::numeric_limits<double>::quiet_NaN()});
  return removed;
}

std::vector<SurfacePoint> UncertaintyCache::surface_points() const {
  std::vector<SurfacePoint> pts;
  pts.reserve(entries_.size());
  for (const auto& [voxel, e] : entries_) pts.push_back(SurfacePoint{voxel, e.position, e.mean_loss});
  std::sort(pts.begin(), pts.end(),
            [](const SurfacePoint& a, const SurfacePoint& b) { return a.voxel < b.voxel; });
  return pts;
}

// ---------------------------------------------------------------------------

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

CellKey cell_of(const Vec3& p, double cell) {
  return CellKey{static_cast<std::int64_t>(std::floor(p.x() / cell)),
                 static_cast<std::int64_t>(std::floor(p.y() / cell)),
                 static_cast<std::int64_t>(std::floor(p.z() / cell))};
}

}  // namespace

PruneResult prune_outliers(std::span<const Vec3> points, std::span<const Vec3> reference,
                           double threshold) {
  if (!(threshold > 0.0)) fail(ErrorCode::kInvalidArgument, "prune threshold must be > 0");
  PruneResult result;
  if (reference.empty()) {
    result.empty_reference = true;
    return result;
  }
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> buckets;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    buckets[cell_of(reference[i], threshold)].push_back(i);
  }
  const double t2 = threshold * threshold;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CellKey c = cell_of(points[i], threshold);
    bool keep = false;
    for (std::int64_t dz = -1; dz <= 1 && !keep; ++dz)
      for (std::int64_t dy = -1; dy <= 1 && !keep; ++dy)
        for (std::int64_t dx = -1; dx <= 1 && !keep; ++dx) {
          auto it = buckets.find(CellKey{c.x + dx, c.y + dy, c.z + dz});
          if (it == buckets.end()) continue;
          for (std::size_t r : it->second) {
            if ((points[i] - reference[r]).squaredNorm() <= t2) {
              keep = true;
              break;
            }
          }
        }
    if (keep) result.retained.push_back(i);
  }
  return result;
}

// ---------------------------------------------------------------------------

void SynthLossParams::validate() const {
  if (!(base > 0.0)) fail(ErrorCode::kConfig, "loss.base must be > 0");
  if (!(decay > 0.0 && decay < 1.0)) fail(ErrorCode::kConfig, "loss.decay must be in (0, 1)");
  if (!(slope >= 0.0)) fail(ErrorCode::kConfig, "loss.slope must be >= 0");
  if (!(depth_ratio >= 0.0)) fail(ErrorCode::kConfig, "loss.depth_ratio must be >= 0");
  if (!(jitter >= 0.0 && jitter < 1.0)) fail(ErrorCode::kConfig, "loss.jitter must be in [0, 1)");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::pair<double, double> synth_loss(const VoxelWorld& world, const Viewpoint& /*pose*/,
                                     const RayHit& hit, std::int64_t count,
                                     const SynthLossParams& params, std::uint64_t seed) {
  if (count < 0) fail(ErrorCode::kInvalidArgument, "observation count must be >= 0");
  const std::int32_t inst = world.truth_instance(hit.voxel);
  double complexity = world.scene().background_complexity;
  if (const InstanceSpec* spec = world.scene().find_instance(inst)) complexity = spec->complexity;
  double incidence = 0.0;
  if (hit.face_axis >= 0) {
    incidence = std::acos(std::clamp(std::abs(hit.direction[hit.face_axis]), 0.0, 1.0));
  }
  double spread = 1.0;
  if (params.jitter > 0.0) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(hit.voxel)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    spread = 1.0 + params.jitter * (2.0 * u - 1.0);
  }
  const double color = params.base * complexity * std::pow(params.decay, static_cast<double>(count)) *
                       (1.0 + params.slope * incidence) * spread;
  return {color, params.depth_ratio * color};
}

void write_cache_csv(const UncertaintyCache& cache, std::ostream& out) {
  out << "voxel_ix,x,y,z,mean_loss,count\n";
  char buf[256];
  for (const SurfacePoint& p : cache.surface_points()) {
    const CacheEntry* e = cache.find(p.voxel);
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%lld\n", p.voxel, p.position.x(),
                  p.position.y(), p.position.z(), e->mean_loss, static_cast<long long>(e->count));
    out << buf;
  }
}

}  // namespace mrrecon
