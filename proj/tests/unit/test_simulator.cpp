#include "mrrecon/config.hpp"
#include "mrrecon/error.hpp"
#include "mrrecon/reports.hpp"
#include "mrrecon/simulator.hpp"

#include "support.hpp"

#include <doctest.h>

#include <deque>
#include <fstream>
#include <sstream>

using namespace mrrecon;
namespace fs = std::filesystem;

namespace {

Config sealed_config() { return load_config(testsupport::source_dir() / "configs" / "sealed.json"); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mrrecon_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string metrics_text(const RunResult& r) {
  std::ostringstream out;
  write_metrics_csv(r, out);
  return out.str();
}

}  // namespace

TEST_CASE("simulator: budget 1 with one robot senses exactly once") {
  Config c = sealed_config();
  c.budget = 1;
  const fs::path dir = scratch("budget1");
  const RunResult r = run_simulation(c, dir);
  CHECK(r.views == 1);
  CHECK(r.stop_reason == "budget");
  CHECK(fs::exists(dir / "metrics.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "effective_config.json"));
  CHECK(parse_config(slurp(dir / "effective_config.json")).budget == 1);
  fs::remove_all(dir);
}

TEST_CASE("simulator: sealed room explored to full coverage before the budget") {
  Config c = sealed_config();
  c.variant = Variant::kExplorationOnly;
  c.budget = 400;
  Simulator sim(c, load_scene(c.scene));
  sim.run();
  const RunResult r = sim.result();
  CHECK(r.stop_reason == "no_tasks");
  CHECK(r.views < c.budget);
  CHECK(r.coverage == 1.0);

  // Reachable set by an independent flood fill from the start.
  const VoxelWorld& w = sim.world();
  const GridGeometry& g = w.grid();
  std::vector<char> reach(w.size(), 0);
  std::deque<std::size_t> q{*g.index_of(c.robots[0].position)};
  reach[q.front()] = 1;
  while (!q.empty()) {
    const std::size_t i = q.front();
    q.pop_front();
    const Coord p = g.coord(i);
    for (int a = 0; a < 3; ++a)
      for (int s : {-1, 1}) {
        Coord n = p;
        (a == 0 ? n.x : a == 1 ? n.y : n.z) += s;
        if (!g.contains(n)) continue;
        const std::size_t j = g.index(n);
        if (reach[j] || w.truth_occupied(j)) continue;
        reach[j] = 1;
        q.push_back(j);
      }
  }
  std::size_t unknown = 0, counted = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!reach[i]) continue;
    ++counted;
    unknown += w.state(i) == VoxelState::kUnknown;
  }
  CHECK(counted > 0);
  CHECK(unknown == 0);
}

TEST_CASE("simulator: reruns are identical and per-cycle metrics are monotone") {
  Config c = sealed_config();
  c.budget = 60;
  const RunResult a = run_simulation(c);
  const RunResult b = run_simulation(c);
  CHECK(metrics_text(a) == metrics_text(b));
  CHECK(summary_json(a) == summary_json(b));
  REQUIRE(a.cycles.size() >= 2);
  CHECK(a.views <= c.budget);
  for (std::size_t k = 1; k < a.cycles.size(); ++k) {
    CHECK(a.cycles[k].coverage >= a.cycles[k - 1].coverage);
    CHECK(a.cycles[k].views >= a.cycles[k - 1].views);
    for (std::size_t r = 0; r < a.cycles[k].path_lengths.size(); ++r) {
      CHECK(a.cycles[k].path_lengths[r] >= a.cycles[k - 1].path_lengths[r]);
    }
  }
  for (const CycleTiming& t : a.timings) {
    CHECK(t.task_seconds >= 0.0);
    CHECK(t.collaboration_seconds >= 0.0);
    CHECK(t.planning_seconds >= 0.0);
  }
}

TEST_CASE("simulator: start pose errors are configuration errors") {
  Config c = sealed_config();
  c.robots[0].position = Vec3(0.05, 0.05, 0.05);
  try {
    Simulator sim(c, load_scene(c.scene));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  c.robots.clear();
  CHECK_THROWS_AS(Simulator(c, load_scene(c.scene)), Error);
}

TEST_CASE("compare: one row per variant, shared scene and seed required") {
  Config a = sealed_config();
  a.budget = 20;
  Config b = a;
  b.variant = Variant::kExplorationOnly;
  const fs::path dir = scratch("compare");
  const auto results = compare_variants({a, b}, dir);
  CHECK(results.size() == 2);
  const std::string csv = slurp(dir / "comparison.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(compare_variants({a}, {}).size() == 1);
  Config other = a;
  other.seed = a.seed + 1;
  CHECK_THROWS_AS(compare_variants({a, other}, {}), Error);
  fs::remove_all(dir);
}

TEST_CASE("simulator: artifacts per cycle") {
  Config c = sealed_config();
  c.budget = 15;
  const fs::path dir = scratch("artifacts");
  const RunResult r = run_simulation(c, dir);
  REQUIRE_FALSE(r.cycles.empty());
  CHECK(fs::exists(dir / "cycles" / "cycle_001_tasks.json"));
  CHECK(fs::exists(dir / "cycles" / "cycle_001_assignments.json"));
  CHECK(fs::exists(dir / "cycles" / "cycle_001_tours.json"));
  CHECK(fs::exists(dir / "cache.csv"));
  CHECK(fs::exists(dir / "instances.json"));
  fs::remove_all(dir);
}
