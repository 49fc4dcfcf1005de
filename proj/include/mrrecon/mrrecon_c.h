/* C interface to the mrrecon engine. Handles are opaque; every call that can
 * fail returns an mrr_status and leaves a message for mrr_last_error(). */
#ifndef MRRECON_C_H
#define MRRECON_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MRR_BUILDING_LIBRARY)
#define MRR_API __declspec(dllexport)
#else
#define MRR_API __declspec(dllimport)
#endif
#else
#define MRR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrr_status {
  MRR_OK = 0,
  MRR_ERR_PARSE = 1,
  MRR_ERR_BOUNDS = 2,
  MRR_ERR_CONFIG = 3,
  MRR_ERR_INVARIANT = 4,
  MRR_ERR_INVALID_ARGUMENT = 5,
  MRR_ERR_IO = 6,
  MRR_ERR_INTERNAL = 99
} mrr_status;

typedef struct mrr_config mrr_config;
typedef struct mrr_world mrr_world;
typedef struct mrr_run_result mrr_run_result;

/* Message of the last failed call on this thread; empty if none. */
MRR_API const char* mrr_last_error(void);
MRR_API const char* mrr_version(void);

/* Configuration. A NULL or empty path yields the defaults. */
MRR_API mrr_status mrr_config_load(const char* path, mrr_config** out);
MRR_API mrr_status mrr_config_parse(const char* json_text, const char* base_dir,
                                    mrr_config** out);
MRR_API void mrr_config_free(mrr_config* config);
MRR_API mrr_status mrr_config_set_seed(mrr_config* config, uint64_t seed);
MRR_API mrr_status mrr_config_set_variant(mrr_config* config, const char* variant);
/* Effective configuration as JSON; the string lives until the next call on
 * the same handle. */
MRR_API const char* mrr_config_json(mrr_config* config);
/* Key-by-key schema as JSON; static storage, valid for the process lifetime. */
MRR_API const char* mrr_config_schema(void);

/* Simulation. out_dir may be NULL to skip writing artifacts. */
MRR_API mrr_status mrr_run(const mrr_config* config, const char* out_dir, mrr_run_result** out);
MRR_API void mrr_run_result_free(mrr_run_result* result);
MRR_API int mrr_run_result_views(const mrr_run_result* result);
MRR_API int mrr_run_result_cycles(const mrr_run_result* result);
MRR_API double mrr_run_result_coverage(const mrr_run_result* result);
MRR_API double mrr_run_result_residual_uncertainty(const mrr_run_result* result);
MRR_API double mrr_run_result_path_length(const mrr_run_result* result);
MRR_API const char* mrr_run_result_stop_reason(const mrr_run_result* result);

/* Runs every configuration and writes comparison.csv under out_dir (if not
 * NULL). The table text stays valid until the next call on this thread. */
MRR_API mrr_status mrr_compare(const mrr_config* const* configs, size_t count,
                               const char* out_dir, const char** table);

/* Writes a built-in scene ("rooms3", "corridor", "cluttered", "sealed"). */
MRR_API mrr_status mrr_generate_scene(const char* preset, const char* path);

/* Known map over a scene file. */
MRR_API mrr_status mrr_world_load(const char* scene_path, mrr_world** out);
MRR_API void mrr_world_free(mrr_world* world);
MRR_API size_t mrr_world_voxel_count(const mrr_world* world);
/* Counts of unknown, empty and occupied voxels. */
MRR_API void mrr_world_state_counts(const mrr_world* world, size_t counts[3]);
MRR_API mrr_status mrr_world_sense(mrr_world* world, const double position[3], double yaw,
                                   double pitch, size_t* newly_known);
MRR_API mrr_status mrr_world_frontier_count(const mrr_world* world, size_t* count);
/* Length is +inf and *reachable 0 when no path exists. */
MRR_API mrr_status mrr_world_shortest_path(const mrr_world* world, const double from[3],
                                           const double to[3], int* reachable, double* length);

/* Objectness (top softmax probability) of a similarity vector. */
MRR_API mrr_status mrr_score_instance(const double* similarities, size_t count, double lambda_e,
                                      int* label, double* objectness);

#ifdef __cplusplus
}
#endif

#endif
