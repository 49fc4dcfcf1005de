#include "mrrecon/config.hpp"
#include "mrrecon/error.hpp"
#include "mrrecon/semantics.hpp"
#include "mrrecon/simulator.hpp"

#include "oracles/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace mrrecon;

namespace {

InstanceRecord record_with(std::int32_t id, double objectness) {
  InstanceRecord r;
  r.id = id;
  r.score.objectness = objectness;
  return r;
}

// First truth-occupied voxel along a ray, found by fine fixed-step marching.
std::optional<std::size_t> march(const VoxelWorld& w, const Vec3& from, const Vec3& dir, double range) {
  const double step = 2e-4;
  for (double t = 0.0; t <= range; t += step) {
    const auto idx = w.grid().index_of(from + t * dir);
    if (!idx) return std::nullopt;
    if (w.truth_occupied(*idx)) return idx;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("objectness: uniform and dominant vectors") {
  const std::vector<double> flat(200, 0.3);
  const auto u = score_instance(flat, 50.0);
  for (double p : u.probabilities) CHECK(p == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(u.objectness == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(u.label == 0);

  std::vector<double> peak(200, 0.0);
  peak[17] = 1.0;
  const auto d = score_instance(peak, 50.0);
  const double expect = std::exp(50.0) / (std::exp(50.0) + 199.0);
  CHECK(d.label == 17);
  CHECK(std::abs(d.objectness - expect) <= 1e-12);
}

TEST_CASE("objectness: errors") {
  std::vector<double> v{0.1, std::nan("")};
  CHECK_THROWS_AS(score_instance(v, 50.0), Error);
  CHECK_THROWS_AS(score_instance(std::vector<double>{0.1, 0.2}, 0.0), Error);
  CHECK_THROWS_AS(score_instance(std::vector<double>{}, 50.0), Error);
}

TEST_CASE("objectness: naive oracle, shift invariance, scale monotonicity") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), shift(-100.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(200);
    for (double& x : s) x = u(rng);
    const auto got = score_instance(s, 50.0);
    const auto want = oracle::softmax_naive(s, 50.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(std::abs(got.probabilities[i] - want[i]) <= 1e-12);
      sum += got.probabilities[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    CHECK(got.objectness == *std::max_element(got.probabilities.begin(), got.probabilities.end()));

    const double c = shift(rng);
    std::vector<double> moved = s;
    for (double& x : moved) x += c;
    const auto m = score_instance(moved, 50.0);
    CHECK(m.label == got.label);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(m.probabilities[i] - got.probabilities[i]) <= 1e-12);

    const auto sharper = score_instance(s, 80.0);
    CHECK(sharper.label == got.label);
    CHECK(sharper.objectness >= got.objectness);
  }
}

TEST_CASE("gate: strict bounds, idempotence and filter oracle") {
  CHECK(gate_reconstruction(std::vector{record_with(1, 0.2)}, 0.2, 0.6).empty());
  CHECK(gate_reconstruction(std::vector{record_with(1, 0.6)}, 0.2, 0.6).empty());
  const auto kept = gate_reconstruction(
      std::vector{record_with(1, 0.1), record_with(2, 0.3), record_with(3, 0.7)}, 0.2, 0.6);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == 2);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<InstanceRecord> all;
  for (int i = 0; i < 100; ++i) all.push_back(record_with(i, u(rng)));
  const auto once = gate_reconstruction(all, 0.2, 0.6);
  std::vector<std::int32_t> want;
  for (const auto& r : all)
    if (r.score.objectness > 0.2 && r.score.objectness < 0.6) want.push_back(r.id);
  std::vector<std::int32_t> got;
  for (const auto& r : once) got.push_back(r.id);
  CHECK(got == want);
  CHECK(gate_reconstruction(once, 0.2, 0.6).size() == once.size());
}

TEST_CASE("instance uncertainty: lookup and dangling point") {
  UncertaintyCache cache(GridGeometry(Vec3::Zero(), GridDims{5, 5, 5}, 0.1));
  InstanceRecord r;
  CHECK(instance_uncertainty(r, cache).empty());
  cache.deposit(3, 0.5);
  cache.deposit(9, 0.25);
  cache.deposit(11, 0.75);
  r.points = {3, 9, 11};
  CHECK(instance_uncertainty(r, cache) == std::vector<double>{0.5, 0.25, 0.75});
  r.points.push_back(12);
  CHECK_THROWS_AS(instance_uncertainty(r, cache), Error);
}

TEST_CASE("registry: creation, dedup, unknown id, disjointness") {
  SceneBuilder b(Vec3::Zero(), Vec3(1, 1, 1), 0.1);
  b.add_instance_voxels(7, {Coord{1, 1, 1}, Coord{1, 2, 1}});
  b.describe_instance(7, "vase", 1.0, std::vector<double>(200, 0.2));
  b.add_instance_voxels(8, {Coord{5, 5, 5}});
  b.describe_instance(8, "lamp", 1.0, std::vector<double>(200, 0.2));
  const auto scene = b.build();
  InstanceRegistry reg(scene, 50.0);
  const std::size_t v = scene->grid.index(Coord{1, 1, 1});
  reg.register_observation(std::vector<InstanceHit>{{v, 7}});
  REQUIRE(reg.records().count(7) == 1);
  CHECK(reg.records().at(7).points == std::vector<std::size_t>{v});
  reg.register_observation(std::vector<InstanceHit>{{v, 7}, {v, 7}, {0, kNoInstance}});
  CHECK(reg.records().at(7).points.size() == 1);
  CHECK_THROWS_AS(reg.register_observation(std::vector<InstanceHit>{{v, 99}}), Error);

  reg.register_observation(std::vector<InstanceHit>{{scene->grid.index(Coord{5, 5, 5}), 8},
                                                    {scene->grid.index(Coord{1, 2, 1}), 7}});
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (const auto& [id, rec] : reg.records()) {
    total += rec.points.size();
    seen.insert(rec.points.begin(), rec.points.end());
  }
  CHECK(seen.size() == total);

  const auto dump = nlohmann::json::parse(registry_json(reg));
  REQUIRE(dump.is_array());
  CHECK(dump.size() == 2);
  CHECK(dump[0]["id"] == 7);
  CHECK(dump[0]["point_count"] == 2);
}

TEST_CASE("registry: sweep registers exactly the instance voxels a marched ray hits first") {
  const auto scene = load_scene(testsupport::source_dir() / "data" / "scenes" / "sealed.json");
  VoxelWorld w(scene);
  InstanceRegistry reg(scene, 50.0);
  CameraModel cam;
  cam.width = 16;
  cam.height = 12;
  std::map<std::int32_t, std::set<std::size_t>> want;
  const Vec3 eye(0.95, 1.05, 0.85);
  for (int k = 0; k < 8; ++k) {
    const Viewpoint pose{eye, k * kPi / 4 + 0.1, -0.35};
    const auto frame = sense(w, cam, pose);
    std::vector<InstanceHit> hits;
    for (const RayHit& h : frame.rays)
      if (h.hit) hits.push_back({h.voxel, w.truth_instance(h.voxel)});
    reg.register_observation(hits);
    for (int row = 0; row < cam.height; ++row)
      for (int col = 0; col < cam.width; ++col) {
        const auto first = march(w, eye, cam.ray_direction(pose, row, col), cam.max_range);
        if (first && w.truth_instance(*first) != kNoInstance) want[w.truth_instance(*first)].insert(*first);
      }
  }
  REQUIRE(!want.empty());
  CHECK(reg.records().size() == want.size());
  for (const auto& [id, pts] : want) {
    REQUIRE(reg.records().count(id) == 1);
    CHECK(reg.records().at(id).points == std::vector<std::size_t>(pts.begin(), pts.end()));
  }
}

TEST_CASE("instance uncertainty: seeded run equals join of the cache dump") {
  Config cfg = load_config(testsupport::source_dir() / "configs" / "sealed.json");
  cfg.budget = 30;
  Simulator sim(cfg, load_scene(cfg.scene));
  sim.run();
  std::ostringstream csv;
  write_cache_csv(sim.cache(), csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::map<std::size_t, double> means;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() == 6);
    means[std::stoull(cols[0])] = std::stod(cols[4]);
  }
  REQUIRE(!sim.registry().records().empty());
  for (const auto& [id, rec] : sim.registry().records()) {
    const auto got = instance_uncertainty(rec, sim.cache());
    REQUIRE(got.size() == rec.points.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == means.at(rec.points[k]));
  }
}
