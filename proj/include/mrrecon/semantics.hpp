#pragma once

#include "mrrecon/scene.hpp"
#include "mrrecon/uncertainty_cache.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mrrecon {

struct ObjectnessScore {
  std::vector<double> probabilities;  // softmax(lambda_e * similarities)
  int label = 0;                      // argmax, lowest index on ties
  double objectness = 0.0;            // top probability
};

/// Throws Error(kInvalidArgument) for non-finite similarities, an empty
/// vector, or lambda_e <= 0.
ObjectnessScore score_instance(std::span<const double> similarities, double lambda_e);

struct InstanceRecord {
  std::int32_t id = 0;
  std::string name;
  std::vector<std::size_t> points;  // surface voxels, sorted, unique
  std::vector<double> similarity;
  ObjectnessScore score;
};

// One observed surface voxel and the instance it belongs to.
struct InstanceHit {
  std::size_t voxel = 0;
  std::int32_t instance = kNoInstance;
};

// Segmented instances keyed by id. Point sets stay pairwise disjoint.
class InstanceRegistry {
 public:
  InstanceRegistry(std::shared_ptr<const Scene> scene, double lambda_e);

  /// Hits with kNoInstance are ignored; an id missing from the scene's
  /// instance table throws Error(kInvalidArgument).
  void register_observation(std::span<const InstanceHit> hits);

  const std::map<std::int32_t, InstanceRecord>& records() const { return records_; }
  std::vector<InstanceRecord> snapshot() const;

 private:
  std::shared_ptr<const Scene> scene_;
  double lambda_e_;
  std::map<std::int32_t, InstanceRecord> records_;
  std::map<std::size_t, std::int32_t> owner_;
};

/// Instances with c_min < objectness < c_max, input order preserved.
std::vector<InstanceRecord> gate_reconstruction(std::span<const InstanceRecord> instances,
                                                double c_min, double c_max);

/// Cached mean loss for every instance point, aligned with `instance.points`.
/// Throws Error(kInvalidArgument) for a point missing from the cache.
std::vector<double> instance_uncertainty(const InstanceRecord& instance,
                                         const UncertaintyCache& cache);

// Gated instance with its surface and uncertainty resolved.
struct ReconInstance {
  std::int32_t id = 0;
  int label = 0;
  double objectness = 0.0;
  std::vector<std::size_t> voxels;
  std::vector<Vec3> points;
  std::vector<double> uncertainties;
};

ReconInstance make_recon_instance(const InstanceRecord& instance, const UncertaintyCache& cache);

std::string registry_json(const InstanceRegistry& registry);

}  // namespace mrrecon
