#include "mrrecon/config.hpp"
#include "mrrecon/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <set>

using namespace mrrecon;
using nlohmann::json;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

}  // namespace

TEST_CASE("config: empty document gives the defaults") {
  for (const char* text : {"", "  \n", "{}"}) {
    const Config c = parse_config(text);
    CHECK(c.lambda_d == 0.5);
    CHECK(c.lambda_e == 50.0);
    CHECK(c.c_min == 0.2);
    CHECK(c.c_max == 0.6);
    CHECK(c.tasks.n_down == 5);
    CHECK(c.tasks.d_poi == 1.2);
    CHECK(c.d_local == 6.0);
    CHECK(c.tour.l_exec == 6.0);
    CHECK(c.tour.dt == 0.4);
    CHECK(c.prune_threshold == 0.05);
    CHECK(c.prune_interval == 30);
    CHECK(c.variant == Variant::kFull);
  }
}

TEST_CASE("config: c_min above c_max is an ordering error") {
  const std::string msg = config_error(R"({"semantics": {"c_min": 0.7, "c_max": 0.6}})");
  CHECK(msg.find("c_min") != std::string::npos);
}

TEST_CASE("config: overriding d_poi echoes it and keeps other defaults") {
  const Config c = parse_config(R"({"tasks": {"d_poi": 2.0}})");
  const json echo = json::parse(config_json(c));
  CHECK(echo["tasks"]["d_poi"] == 2.0);
  CHECK(echo["tasks"]["n_down"] == 5);
  CHECK(echo["semantics"]["lambda_e"] == 50.0);
}

TEST_CASE("config: unknown keys and range violations name the key") {
  CHECK(config_error(R"({"tasks": {"dpoi": 2.0}})").find("/tasks/dpoi") != std::string::npos);
  CHECK(config_error(R"({"extra": 1})").find("/extra") != std::string::npos);
  CHECK(config_error(R"({"tasks": {"d_poi": -1}})").find("d_poi") != std::string::npos);
  CHECK(config_error(R"({"run": {"budget": 0}})").find("budget") != std::string::npos);
  CHECK(config_error(R"({"planning": {"dt": 0}})").find("dt") != std::string::npos);
  CHECK(config_error(R"({"camera": {"hfov": 4.0}})").find("hfov") != std::string::npos);
  CHECK(config_error(R"({"loss": {"lambda_d": -0.1}})").find("lambda_d") != std::string::npos);
  CHECK(config_error(R"({"run": {"variant": "best"}})").find("variant") != std::string::npos);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  try {
    parse_config("{not json");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
  }
}

TEST_CASE("config: echo round trip") {
  Config c = parse_config(R"({
    "scene": "somewhere/scene.json",
    "robots": [{"position": [1, 2, 0.5], "yaw": 0.3, "pitch": -0.1}],
    "run": {"budget": 77, "seed": 18446744073709551615, "variant": "plain_kmeans"},
    "tasks": {"ring_radii": [0.7, 1.1, 2.3], "pitch_levels": [0.1]},
    "planning": {"cost_combine": "sum", "v_max": 1.3},
    "collaboration": {"weights": {"count_balance": 0.25}}
  })");
  const std::string once = config_json(c);
  const Config back = parse_config(once);
  CHECK(config_json(back) == once);
  CHECK(back.seed == 18446744073709551615ull);
  CHECK(back.variant == Variant::kPlainKmeans);
  CHECK(back.tour.cost.combine == CostCombine::kSum);
  CHECK(back.cluster.weights.count_balance == 0.25);
  CHECK(back.tasks.rings.radii == std::vector<double>{0.7, 1.1, 2.3});
}

TEST_CASE("config: relative scene path resolves against the file") {
  const Config c = load_config(testsupport::source_dir() / "configs" / "rooms3.json");
  CHECK(std::filesystem::exists(c.scene));
  CHECK(c.robots.size() == 3);
  CHECK(c.seed == 42);
  CHECK(c.budget == 300);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("config: variants parse and print") {
  for (Variant v : {Variant::kFull, Variant::kExplorationOnly, Variant::kSurfaceUncertaintyRec,
                    Variant::kSemanticRec, Variant::kNoModeAssignment, Variant::kPlainKmeans}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(flags_for(Variant::kSurfaceUncertaintyRec).recon == ReconSource::kSurface);
  CHECK(flags_for(Variant::kExplorationOnly).recon == ReconSource::kNone);
  CHECK_FALSE(flags_for(Variant::kNoModeAssignment).mode_assignment);
  CHECK_FALSE(flags_for(Variant::kPlainKmeans).improved_clustering);
}

TEST_CASE("config: schema lists every key once with its default") {
  const json schema = json::parse(config_schema());
  const json defaults = json::parse(config_json(Config{}));
  std::set<std::string> listed;
  for (const json& row : schema["keys"]) {
    const std::string key = row["key"];
    CHECK(listed.insert(key).second);
    CHECK(row["default"] == defaults.at(json::json_pointer(key)));
  }
  // Leaves of the default document, with arrays taken whole.
  std::set<std::string> leaves;
  const json flat = defaults.flatten();
  for (const auto& [key, value] : flat.items()) {
    std::string k = key;
    if (const auto cut = k.find_first_of("0123456789"); cut != std::string::npos) k = k.substr(0, cut - 1);
    leaves.insert(k);
  }
  CHECK(listed == leaves);
  const auto flag = [&](const std::string& key) {
    for (const json& row : schema["keys"])
      if (row["key"] == key) return row["invented"].get<bool>();
    return true;
  };
  CHECK_FALSE(flag("/tasks/d_poi"));
  CHECK(flag("/tasks/ring_radii"));
  CHECK(flag("/collaboration/weights/count_balance"));
}
