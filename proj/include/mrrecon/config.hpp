#pragma once

#include "mrrecon/collaboration.hpp"
#include "mrrecon/task_generation.hpp"
#include "mrrecon/tour_planning.hpp"
#include "mrrecon/uncertainty_cache.hpp"
#include "mrrecon/voxel_world.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mrrecon {

enum class Variant {
  kFull,
  kExplorationOnly,
  kSurfaceUncertaintyRec,
  kSemanticRec,
  kNoModeAssignment,
  kPlainKmeans,
};

const char* to_string(Variant v);
/// Throws Error(kConfig) for an unknown name.
Variant parse_variant(std::string_view name);

enum class ReconSource { kNone, kSemantic, kSurface };

// Which pipeline stages a variant switches on.
struct VariantFlags {
  ReconSource recon = ReconSource::kSemantic;
  bool mode_assignment = true;
  bool improved_clustering = true;
};

VariantFlags flags_for(Variant v);

struct Config {
  std::filesystem::path scene;  // resolved against the config file directory
  std::vector<Viewpoint> robots;
  int budget = 300;
  std::uint64_t seed = 0;
  Variant variant = Variant::kFull;
  int max_cycles = 500;

  CameraModel camera;
  double lambda_d = 0.5;
  SynthLossParams loss;
  double lambda_e = 50.0;
  double c_min = 0.2;
  double c_max = 0.6;
  double prune_threshold = 0.05;
  int prune_interval = 30;
  TaskGenParams tasks;
  double d_local = 6.0;
  ClusterParams cluster;
  int clearance_voxels = 1;
  TourPlanParams tour;

  /// Range and ordering checks; throws Error(kConfig) naming the key.
  void validate() const;
};

/// Defaults overlaid by `text` (JSON; empty or whitespace means {}). Unknown
/// keys and out-of-range values throw Error(kConfig); malformed JSON throws
/// Error(kParse).
Config parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

Config load_config(const std::filesystem::path& path);

/// The full effective configuration; parse_config of this text reproduces it.
std::string config_json(const Config& config);

/// Every key with type, unit, bound, default and whether the default is our
/// own choice (`invented`) rather than a published value.
std::string config_schema();

}  // namespace mrrecon
