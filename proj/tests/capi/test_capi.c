/* Exercises the shared library through its C header only. */
#include "mrrecon/mrrecon_c.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: EXPECT(%s) failed: %s\n", __FILE__, \
              __LINE__, #cond, mrr_last_error());                 \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void config_calls(void) {
  mrr_config* cfg = NULL;
  EXPECT(mrr_config_load(NULL, &cfg) == MRR_OK);
  EXPECT(strstr(mrr_config_json(cfg), "\"lambda_e\"") != NULL);
  EXPECT(strstr(mrr_config_schema(), "\"invented\": false") != NULL);
  EXPECT(mrr_config_set_variant(cfg, "nonsense") == MRR_ERR_CONFIG);
  EXPECT(strlen(mrr_last_error()) > 0);
  EXPECT(mrr_config_set_variant(cfg, "plain_kmeans") == MRR_OK);
  mrr_config_free(cfg);

  cfg = NULL;
  EXPECT(mrr_config_parse("{\"semantics\": {\"c_min\": 0.7}}", NULL, &cfg) == MRR_ERR_CONFIG);
  EXPECT(cfg == NULL);
  EXPECT(mrr_config_parse("{oops", NULL, &cfg) == MRR_ERR_PARSE);
  EXPECT(mrr_config_load("/nonexistent.json", &cfg) == MRR_ERR_IO);
  EXPECT(mrr_config_load(NULL, NULL) == MRR_ERR_INVALID_ARGUMENT);
}

static void run_calls(void) {
  mrr_config* cfg = NULL;
  mrr_run_result* res = NULL;
  EXPECT(mrr_config_load(MRRECON_SOURCE_DIR "/configs/sealed.json", &cfg) == MRR_OK);
  EXPECT(mrr_config_set_seed(cfg, 3) == MRR_OK);
  EXPECT(mrr_run(cfg, NULL, &res) == MRR_OK);
  EXPECT(mrr_run_result_views(res) > 0);
  EXPECT(mrr_run_result_coverage(res) > 0.5);
  EXPECT(strlen(mrr_run_result_stop_reason(res)) > 0);
  mrr_run_result_free(res);

  {
    const mrr_config* list[1];
    const char* table = NULL;
    list[0] = cfg;
    EXPECT(mrr_compare(list, 1, NULL, &table) == MRR_OK);
    EXPECT(table != NULL && strstr(table, "full") != NULL);
  }
  mrr_config_free(cfg);
}

static void world_calls(void) {
  mrr_world* w = NULL;
  size_t counts[3];
  size_t known = 0, frontiers = 0;
  int reachable = 0;
  double length = 0.0;
  const double eye[3] = {1.0, 1.0, 1.0};
  const double there[3] = {1.0, 1.3, 1.0};
  EXPECT(mrr_world_load(MRRECON_SOURCE_DIR "/data/scenes/sealed.json", &w) == MRR_OK);
  EXPECT(mrr_world_voxel_count(w) == 30 * 30 * 20);
  mrr_world_state_counts(w, counts);
  EXPECT(counts[0] == mrr_world_voxel_count(w));
  EXPECT(mrr_world_sense(w, eye, 0.0, 0.0, &known) == MRR_OK);
  EXPECT(known > 0);
  EXPECT(mrr_world_frontier_count(w, &frontiers) == MRR_OK);
  EXPECT(frontiers > 0);
  EXPECT(mrr_world_sense(w, eye, 1.5707963, 0.0, &known) == MRR_OK);
  EXPECT(mrr_world_shortest_path(w, eye, there, &reachable, &length) == MRR_OK);
  EXPECT(reachable == 1);
  EXPECT(length >= 0.3 - 1e-12);
  {
    const double wall[3] = {0.05, 0.05, 0.05};
    EXPECT(mrr_world_sense(w, wall, 0.0, 0.0, &known) == MRR_ERR_INVALID_ARGUMENT);
    const double outside[3] = {9.0, 9.0, 9.0};
    EXPECT(mrr_world_sense(w, outside, 0.0, 0.0, &known) == MRR_ERR_BOUNDS);
  }
  mrr_world_free(w);
  EXPECT(mrr_world_load("/nonexistent.json", &w) == MRR_ERR_IO);
}

static void scoring_calls(void) {
  double sims[200];
  int label = -1;
  double objectness = 0.0;
  int i;
  for (i = 0; i < 200; ++i) sims[i] = 0.0;
  sims[5] = 1.0;
  EXPECT(mrr_score_instance(sims, 200, 50.0, &label, &objectness) == MRR_OK);
  EXPECT(label == 5);
  EXPECT(fabs(objectness - exp(50.0) / (exp(50.0) + 199.0)) < 1e-12);
  EXPECT(mrr_score_instance(sims, 200, 0.0, &label, &objectness) == MRR_ERR_INVALID_ARGUMENT);
  EXPECT(mrr_generate_scene("no_such_preset", "/tmp/x.json") == MRR_ERR_INVALID_ARGUMENT);
}

int main(void) {
  EXPECT(strlen(mrr_version()) > 0);
  config_calls();
  run_calls();
  world_calls();
  scoring_calls();
  if (failures) {
    fprintf(stderr, "%d C API expectation(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
