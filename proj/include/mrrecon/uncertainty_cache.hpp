#pragma once

#include "mrrecon/geometry.hpp"
#include "mrrecon/voxel_world.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mrrecon {

// Loss of one hit ray, before weighting.
struct LossSample {
  Vec3 hit_position = Vec3::Zero();
  double color_loss = 0.0;
  double depth_loss = 0.0;
};

using LossFrame = std::vector<LossSample>;

struct CacheEntry {
  Vec3 position = Vec3::Zero();  // voxel center
  double mean_loss = 0.0;
  std::int64_t count = 0;
};

struct SurfacePoint {
  std::size_t voxel = 0;
  Vec3 position = Vec3::Zero();
  double uncertainty = 0.0;
};

// Deposit log record; an erased entry is logged with a NaN loss.
struct Deposit {
  std::size_t voxel = 0;
  double loss = 0.0;
};

/// Projected loss of one sample: color + lambda_d * depth.
double projected_loss(double color_loss, double depth_loss, double lambda_d);

// Hash map from occupied voxel to running-mean projected loss. Copies are
// independent value snapshots.
class UncertaintyCache {
 public:
  explicit UncertaintyCache(GridGeometry grid);

  const GridGeometry& grid() const { return grid_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Deposits every sample of `frame`. The whole frame is validated first:
  /// negative or non-finite losses and negative lambda_d throw
  /// Error(kInvalidArgument), hits outside the grid throw Error(kBounds).
  void project_losses(const LossFrame& frame, double lambda_d);
  /// Deposits an already-weighted loss.
  void deposit(std::size_t voxel, double loss);

  const CacheEntry* find(std::size_t voxel) const;
  std::int64_t count(std::size_t voxel) const;
  bool erase(std::size_t voxel);

  /// One point per entry at the voxel center, ordered by voxel index.
  std::vector<SurfacePoint> surface_points() const;

  void set_deposit_log(bool enabled) { log_enabled_ = enabled; }
  const std::vector<Deposit>& deposit_log() const { return log_; }

 private:
  GridGeometry grid_;
  std::unordered_map<std::size_t, CacheEntry> entries_;
  bool log_enabled_ = false;
  std::vector<Deposit> log_;
};

struct PruneResult {
  std::vector<std::size_t> retained;   // ascending indices into `points`
  bool empty_reference = false;        // warning: nothing to compare against
};

/// Keeps exactly the points whose nearest reference point lies within
/// `threshold` meters. Exact; uses a hashed grid of cell size `threshold`.
PruneResult prune_outliers(std::span<const Vec3> points, std::span<const Vec3> reference,
                           double threshold);

struct SynthLossParams {
  double base = 0.5;         // scaled by instance/background complexity
  double decay = 0.7;        // per prior observation, in (0, 1)
  double slope = 0.5;        // incidence-angle gain
  double depth_ratio = 1.0;  // depth loss = depth_ratio * color loss
  double jitter = 0.2;       // per-voxel multiplicative spread in [0, 1)

  void validate() const;
};

/// Deterministic synthetic render loss for a hit: base * complexity *
/// decay^count * (1 + slope * incidence) * jitter(seed, voxel).
std::pair<double, double> synth_loss(const VoxelWorld& world, const Viewpoint& pose,
                                     const RayHit& hit, std::int64_t count,
                                     const SynthLossParams& params, std::uint64_t seed);

void write_cache_csv(const UncertaintyCache& cache, std::ostream& out);

}  // namespace mrrecon
