#include "mrrecon/semantics.hpp"

#include "mrrecon/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace mrrecon {

ObjectnessScore score_instance(std::span<const double> similarities, double lambda_e) {
  if (!(lambda_e > 0.0) || !std::isfinite(lambda_e)) {
    fail(ErrorCode::kInvalidArgument, "lambda_e must be > 0");
  }
  if (similarities.empty()) fail(ErrorCode::kInvalidArgument, "similarity vector is empty");
  double top = -kInf;
  for (double s : similarities) {
    if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "non-finite similarity score");
    top = std::max(top, s);
  }
  ObjectnessScore out;
  out.probabilities.resize(similarities.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < similarities.size(); ++i) {
    out.probabilities[i] = std::exp(lambda_e * (similarities[i] - top));
    sum += out.probabilities[i];
  }
  for (double& p : out.probabilities) p /= sum;
  out.label = 0;
  for (std::size_t i = 1; i < similarities.size(); ++i) {
    if (similarities[i] > similarities[static_cast<std::size_t>(out.label)]) out.label = static_cast<int>(i);
  }
  out.objectness = out.probabilities[static_cast<std::size_t>(out.label)];
  return out;
}

// ---------------------------------------------------------------------------

InstanceRegistry::InstanceRegistry(std::shared_ptr<const Scene> scene, double lambda_e)
    : scene_(std::move(scene)), lambda_e_(lambda_e) {}

void InstanceRegistry::register_observation(std::span<const InstanceHit> hits) {
  for (const InstanceHit& h : hits) {
    if (h.instance == kNoInstance) continue;
    if (!scene_->find_instance(h.instance)) {
      fail(ErrorCode::kInvalidArgument,
           "instance id " + std::to_string(h.instance) + " is not in the scene instance table");
    }
  }
  for (const InstanceHit& h : hits) {
    if (h.instance == kNoInstance) continue;
    auto [own, fresh] = owner_.try_emplace(h.voxel, h.instance);
    if (!fresh && own->second != h.instance) {
      fail(ErrorCode::kInvariant, "voxel " + std::to_string(h.voxel) + " observed under two instances");
    }
    auto it = records_.find(h.instance);
    if (it == records_.end()) {
      const InstanceSpec& spec = *scene_->find_instance(h.instance);
      InstanceRecord rec;
      rec.id = spec.id;
      rec.name = spec.name;
      rec.similarity = spec.similarity;
      rec.score = score_instance(rec.similarity, lambda_e_);
      it = records_.emplace(h.instance, std::move(rec)).first;
    }
    auto& pts = it->second.points;
    auto pos = std::lower_bound(pts.begin(), pts.end(), h.voxel);
    if (pos == pts.end() || *pos != h.voxel) pts.insert(pos, h.voxel);
  }
}

std::vector<InstanceRecord> InstanceRegistry::snapshot() const {
  std::vector<InstanceRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, rec] : records_) out.push_back(rec);
  return out;
}

std::vector<InstanceRecord> gate_reconstruction(std::span<const InstanceRecord> instances,
                                                double c_min, double c_max) {
  if (!(c_min >= 0.0 && c_min < c_max && c_max <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "objectness gate requires 0 <= c_min < c_max <= 1");
  }
  std::vector<InstanceRecord> out;
  for (const InstanceRecord& r : instances) {
    if (r.score.objectness > c_min && r.score.objectness < c_max) out.push_back(r);
  }
  return out;
}

std::vector<double> instance_uncertainty(const InstanceRecord& instance,
                                         const UncertaintyCache& cache) {
  std::vector<double> out;
  out.reserve(instance.points.size());
  for (std::size_t v : instance.points) {
    const CacheEntry* e = cache.find(v);
    if (!e) {
      fail(ErrorCode::kInvalidArgument, "instance " + std::to_string(instance.id) + " point " +
                                            std::to_string(v) + " has no cache entry");
    }
    out.push_back(e->mean_loss);
  }
  return out;
}

ReconInstance make_recon_instance(const InstanceRecord& instance, const UncertaintyCache& cache) {
  ReconInstance r;
  r.id = instance.id;
  r.label = instance.score.label;
  r.objectness = instance.score.objectness;
  r.voxels = instance.points;
  r.uncertainties = instance_uncertainty(instance, cache);
  r.points.reserve(r.voxels.size());
  for (std::size_t v : r.voxels) r.points.push_back(cache.grid().center(v));
  return r;
}

std::string registry_json(const InstanceRegistry& registry) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [id, rec] : registry.records()) {
    arr.push_back({{"id", id},
                   {"name", rec.name},
                   {"label", rec.score.label},
                   {"objectness", rec.score.objectness},
                   {"point_count", rec.points.size()}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace mrrecon
