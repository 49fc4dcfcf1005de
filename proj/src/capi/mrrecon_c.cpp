#include "mrrecon/mrrecon_c.h"

#include "mrrecon/config.hpp"
#include "mrrecon/error.hpp"
#include "mrrecon/path_planner.hpp"
#include "mrrecon/presets.hpp"
#include "mrrecon/reports.hpp"
#include "mrrecon/scene.hpp"
#include "mrrecon/semantics.hpp"
#include "mrrecon/simulator.hpp"
#include "mrrecon/voxel_world.hpp"

#include <new>
#include <string>

struct mrr_config {
  mrrecon::Config config;
  std::string json;
};

struct mrr_world {
  mrrecon::VoxelWorld world;
};

struct mrr_run_result {
  mrrecon::RunResult result;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_table;

mrr_status status_of(mrrecon::ErrorCode code) {
  switch (code) {
    case mrrecon::ErrorCode::kParse: return MRR_ERR_PARSE;
    case mrrecon::ErrorCode::kBounds: return MRR_ERR_BOUNDS;
    case mrrecon::ErrorCode::kConfig: return MRR_ERR_CONFIG;
    case mrrecon::ErrorCode::kInvariant: return MRR_ERR_INVARIANT;
    case mrrecon::ErrorCode::kInvalidArgument: return MRR_ERR_INVALID_ARGUMENT;
    case mrrecon::ErrorCode::kIo: return MRR_ERR_IO;
  }
  return MRR_ERR_INTERNAL;
}

template <typename F>
mrr_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return MRR_OK;
  } catch (const mrrecon::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return MRR_ERR_INTERNAL;
}

mrr_status null_argument(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return MRR_ERR_INVALID_ARGUMENT;
}

mrrecon::Vec3 vec(const double p[3]) { return mrrecon::Vec3(p[0], p[1], p[2]); }

}  // namespace

extern "C" {

const char* mrr_last_error(void) { return g_last_error.c_str(); }

const char* mrr_version(void) { return "0.1.0"; }

mrr_status mrr_config_load(const char* path, mrr_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* h = new mrr_config;
    try {
      h->config = (path && *path) ? mrrecon::load_config(path) : mrrecon::parse_config("");
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

mrr_status mrr_config_parse(const char* json_text, const char* base_dir, mrr_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* h = new mrr_config;
    try {
      h->config = mrrecon::parse_config(json_text ? json_text : "", base_dir ? base_dir : "");
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

void mrr_config_free(mrr_config* config) { delete config; }

mrr_status mrr_config_set_seed(mrr_config* config, uint64_t seed) {
  if (!config) return null_argument("config");
  config->config.seed = seed;
  return MRR_OK;
}

mrr_status mrr_config_set_variant(mrr_config* config, const char* variant) {
  if (!config) return null_argument("config");
  if (!variant) return null_argument("variant");
  return guarded([&] { config->config.variant = mrrecon::parse_variant(variant); });
}

const char* mrr_config_json(mrr_config* config) {
  if (!config) return "";
  config->json = mrrecon::config_json(config->config);
  return config->json.c_str();
}

const char* mrr_config_schema(void) {
  static const std::string schema = mrrecon::config_schema();
  return schema.c_str();
}

mrr_status mrr_run(const mrr_config* config, const char* out_dir, mrr_run_result** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto result = mrrecon::run_simulation(config->config, out_dir ? out_dir : "");
    *out = new mrr_run_result{std::move(result)};
  });
}

void mrr_run_result_free(mrr_run_result* result) { delete result; }

int mrr_run_result_views(const mrr_run_result* result) { return result ? result->result.views : 0; }

int mrr_run_result_cycles(const mrr_run_result* result) {
  return result && !result->result.cycles.empty() ? result->result.cycles.back().cycle : 0;
}

double mrr_run_result_coverage(const mrr_run_result* result) {
  return result ? result->result.coverage : 0.0;
}

double mrr_run_result_residual_uncertainty(const mrr_run_result* result) {
  return result ? result->result.residual_uncertainty : 0.0;
}

double mrr_run_result_path_length(const mrr_run_result* result) {
  return result ? result->result.total_path_length : 0.0;
}

const char* mrr_run_result_stop_reason(const mrr_run_result* result) {
  return result ? result->result.stop_reason.c_str() : "";
}

mrr_status mrr_compare(const mrr_config* const* configs, size_t count, const char* out_dir,
                       const char** table) {
  if (!configs && count > 0) return null_argument("configs");
  return guarded([&] {
    std::vector<mrrecon::Config> list;
    for (size_t i = 0; i < count; ++i) {
      if (!configs[i]) mrrecon::fail(mrrecon::ErrorCode::kInvalidArgument, "NULL configuration");
      list.push_back(configs[i]->config);
    }
    const auto results = mrrecon::compare_variants(list, out_dir ? out_dir : "");
    g_table = mrrecon::comparison_table(results);
    if (table) *table = g_table.c_str();
  });
}

mrr_status mrr_generate_scene(const char* preset, const char* path) {
  if (!preset) return null_argument("preset");
  if (!path) return null_argument("path");
  return guarded([&] { mrrecon::save_scene(*mrrecon::make_preset(preset), path); });
}

mrr_status mrr_world_load(const char* scene_path, mrr_world** out) {
  if (!scene_path) return null_argument("scene_path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new mrr_world{mrrecon::VoxelWorld(mrrecon::load_scene(scene_path))}; });
}

void mrr_world_free(mrr_world* world) { delete world; }

size_t mrr_world_voxel_count(const mrr_world* world) { return world ? world->world.size() : 0; }

void mrr_world_state_counts(const mrr_world* world, size_t counts[3]) {
  if (!counts) return;
  for (int i = 0; i < 3; ++i) {
    counts[i] = world ? world->world.count(static_cast<mrrecon::VoxelState>(i)) : 0;
  }
}

mrr_status mrr_world_sense(mrr_world* world, const double position[3], double yaw, double pitch,
                           size_t* newly_known) {
  if (!world) return null_argument("world");
  if (!position) return null_argument("position");
  return guarded([&] {
    const auto frame =
        mrrecon::sense(world->world, mrrecon::CameraModel{}, mrrecon::Viewpoint{vec(position), yaw, pitch});
    if (newly_known) *newly_known = frame.newly_known;
  });
}

mrr_status mrr_world_frontier_count(const mrr_world* world, size_t* count) {
  if (!world) return null_argument("world");
  if (!count) return null_argument("count");
  return guarded([&] { *count = mrrecon::extract_frontiers(world->world).size(); });
}

mrr_status mrr_world_shortest_path(const mrr_world* world, const double from[3],
                                   const double to[3], int* reachable, double* length) {
  if (!world) return null_argument("world");
  if (!from || !to) return null_argument("endpoint");
  return guarded([&] {
    const auto r = mrrecon::shortest_path(world->world, vec(from), vec(to));
    if (reachable) *reachable = r.reachable ? 1 : 0;
    if (length) *length = r.length;
  });
}

mrr_status mrr_score_instance(const double* similarities, size_t count, double lambda_e,
                              int* label, double* objectness) {
  if (!similarities && count > 0) return null_argument("similarities");
  return guarded([&] {
    const auto s = mrrecon::score_instance(std::span<const double>(similarities, count), lambda_e);
    if (label) *label = s.label;
    if (objectness) *objectness = s.objectness;
  });
}

}  // extern "C"
