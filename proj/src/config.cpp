#include "mrrecon/config.hpp"

#include "mrrecon/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace mrrecon {

using nlohmann::json;

namespace {

struct VariantName {
  Variant variant;
  const char* name;
};

constexpr VariantName kVariantNames[] = {
    {Variant::kFull, "full"},
    {Variant::kExplorationOnly, "exploration_only"},
    {Variant::kSurfaceUncertaintyRec, "surface_uncertainty_rec"},
    {Variant::kSemanticRec, "semantic_rec"},
    {Variant::kNoModeAssignment, "no_mode_assignment"},
    {Variant::kPlainKmeans, "plain_kmeans"},
};

}  // namespace

const char* to_string(Variant v) {
  for (const auto& n : kVariantNames) {
    if (n.variant == v) return n.name;
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  for (const auto& n : kVariantNames) {
    if (name == n.name) return n.variant;
  }
  fail(ErrorCode::kConfig, "run.variant: unknown variant '" + std::string(name) + "'");
}

VariantFlags flags_for(Variant v) {
  switch (v) {
    case Variant::kFull: return {ReconSource::kSemantic, true, true};
    case Variant::kExplorationOnly: return {ReconSource::kNone, true, false};
    case Variant::kSurfaceUncertaintyRec: return {ReconSource::kSurface, false, false};
    case Variant::kSemanticRec: return {ReconSource::kSemantic, false, false};
    case Variant::kNoModeAssignment: return {ReconSource::kSemantic, false, true};
    case Variant::kPlainKmeans: return {ReconSource::kSemantic, true, false};
  }
  return {};
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& msg) {
  fail(ErrorCode::kConfig, key + ": " + msg);
}

void require(bool ok, const std::string& key, const std::string& bound) {
  if (!ok) bad(key, "must be " + bound);
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json_doc(const Config& c) {
  json robots = json::array();
  for (const Viewpoint& r : c.robots) {
    robots.push_back({{"position", vec_json(r.position)}, {"yaw", r.yaw}, {"pitch", r.pitch}});
  }
  const ClusterWeights& w = c.cluster.weights;
  return {
      {"scene", c.scene.generic_string()},
      {"robots", robots},
      {"run",
       {{"budget", c.budget},
        {"seed", c.seed},
        {"variant", to_string(c.variant)},
        {"max_cycles", c.max_cycles}}},
      {"camera",
       {{"hfov", c.camera.hfov},
        {"vfov", c.camera.vfov},
        {"max_range", c.camera.max_range},
        {"width", c.camera.width},
        {"height", c.camera.height}}},
      {"loss",
       {{"lambda_d", c.lambda_d},
        {"base", c.loss.base},
        {"decay", c.loss.decay},
        {"incidence_slope", c.loss.slope},
        {"depth_ratio", c.loss.depth_ratio},
        {"jitter", c.loss.jitter}}},
      {"semantics", {{"lambda_e", c.lambda_e}, {"c_min", c.c_min}, {"c_max", c.c_max}}},
      {"cache", {{"prune_threshold", c.prune_threshold}, {"prune_interval", c.prune_interval}}},
      {"tasks",
       {{"n_down", c.tasks.n_down},
        {"d_poi", c.tasks.d_poi},
        {"ring_radii", c.tasks.rings.radii},
        {"yaw_samples", c.tasks.rings.yaw_samples},
        {"pitch_levels", c.tasks.rings.pitch_levels}}},
      {"collaboration",
       {{"d_local", c.d_local},
        {"weights",
         {{"compactness", w.compactness},
          {"robot_distance", w.robot_distance},
          {"count_balance", w.count_balance},
          {"distance_balance", w.distance_balance}}},
        {"max_iterations", c.cluster.max_iterations},
        {"tolerance", c.cluster.tolerance}}},
      {"planning",
       {{"clearance_voxels", c.clearance_voxels},
        {"v_max", c.tour.cost.v_max},
        {"yaw_rate", c.tour.cost.yaw_rate},
        {"pitch_rate", c.tour.cost.pitch_rate},
        {"cost_combine", c.tour.cost.combine == CostCombine::kSum ? "sum" : "max"},
        {"smoothing_step", c.tour.smoothing_step},
        {"dt", c.tour.dt},
        {"l_exec", c.tour.l_exec}}},
  };
}

// Overlays `user` onto `base`; keys absent from the defaults are rejected.
void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) bad(path.empty() ? "/" : path, "expected object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path + "/" + it.key();
    auto slot = base.find(it.key());
    if (slot == base.end()) bad(key, "unknown key");
    if (slot->is_object()) {
      overlay(*slot, *it, key);
    } else {
      *slot = *it;
    }
  }
}

double num(const json& doc, const std::string& key) {
  const json* v = &doc;
  std::size_t start = 1;
  while (start <= key.size()) {
    const std::size_t end = key.find('/', start);
    v = &(*v)[key.substr(start, end - start)];
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (!v->is_number()) bad(key, "expected number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) bad(key, "expected finite number");
  return d;
}

int integer(const json& doc, const std::string& key) {
  const double d = num(doc, key);
  if (d != std::floor(d) || std::abs(d) > 2e9) bad(key, "expected integer");
  return static_cast<int>(d);
}

std::vector<double> num_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "expected array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
      bad(key + "/" + std::to_string(i), "expected finite number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

Config from_json_doc(const json& d, const std::filesystem::path& base_dir) {
  Config c;
  if (!d["scene"].is_string()) bad("/scene", "expected string");
  const std::string scene = d["scene"].get<std::string>();
  if (!scene.empty()) {
    std::filesystem::path p(scene);
    c.scene = p.is_absolute() || base_dir.empty() ? p : (base_dir / p).lexically_normal();
  }
  const json& robots = d["robots"];
  if (!robots.is_array()) bad("/robots", "expected array");
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::string key = "/robots/" + std::to_string(i);
    const json& r = robots[i];
    if (!r.is_object()) bad(key, "expected object");
    for (auto it = r.begin(); it != r.end(); ++it) {
      if (it.key() != "position" && it.key() != "yaw" && it.key() != "pitch") {
        bad(key + "/" + it.key(), "unknown key");
      }
    }
    if (!r.contains("position")) bad(key + "/position", "missing");
    const auto pos = num_list(r["position"], key + "/position");
    if (pos.size() != 3) bad(key + "/position", "expected 3 numbers");
    Viewpoint v;
    v.position = Vec3(pos[0], pos[1], pos[2]);
    v.yaw = r.contains("yaw") ? num(r, "/yaw") : 0.0;
    v.pitch = r.contains("pitch") ? num(r, "/pitch") : 0.0;
    c.robots.push_back(v);
  }

  c.budget = integer(d, "/run/budget");
  {
    const json& s = d["run"]["seed"];
    if (!s.is_number_unsigned()) {
      bad("/run/seed", "expected non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (!d["run"]["variant"].is_string()) bad("/run/variant", "expected string");
  c.variant = parse_variant(d["run"]["variant"].get<std::string>());
  c.max_cycles = integer(d, "/run/max_cycles");

  c.camera.hfov = num(d, "/camera/hfov");
  c.camera.vfov = num(d, "/camera/vfov");
  c.camera.max_range = num(d, "/camera/max_range");
  c.camera.width = integer(d, "/camera/width");
  c.camera.height = integer(d, "/camera/height");

  c.lambda_d = num(d, "/loss/lambda_d");
  c.loss.base = num(d, "/loss/base");
  c.loss.decay = num(d, "/loss/decay");
  c.loss.slope = num(d, "/loss/incidence_slope");
  c.loss.depth_ratio = num(d, "/loss/depth_ratio");
  c.loss.jitter = num(d, "/loss/jitter");

  c.lambda_e = num(d, "/semantics/lambda_e");
  c.c_min = num(d, "/semantics/c_min");
  c.c_max = num(d, "/semantics/c_max");

  c.prune_threshold = num(d, "/cache/prune_threshold");
  c.prune_interval = integer(d, "/cache/prune_interval");

  c.tasks.n_down = integer(d, "/tasks/n_down");
  c.tasks.d_poi = num(d, "/tasks/d_poi");
  c.tasks.rings.radii = num_list(d["tasks"]["ring_radii"], "/tasks/ring_radii");
  c.tasks.rings.yaw_samples = integer(d, "/tasks/yaw_samples");
  c.tasks.rings.pitch_levels = num_list(d["tasks"]["pitch_levels"], "/tasks/pitch_levels");

  c.d_local = num(d, "/collaboration/d_local");
  c.cluster.weights.compactness = num(d, "/collaboration/weights/compactness");
  c.cluster.weights.robot_distance = num(d, "/collaboration/weights/robot_distance");
  c.cluster.weights.count_balance = num(d, "/collaboration/weights/count_balance");
  c.cluster.weights.distance_balance = num(d, "/collaboration/weights/distance_balance");
  c.cluster.max_iterations = integer(d, "/collaboration/max_iterations");
  c.cluster.tolerance = num(d, "/collaboration/tolerance");

  c.clearance_voxels = integer(d, "/planning/clearance_voxels");
  c.tour.cost.v_max = num(d, "/planning/v_max");
  c.tour.cost.yaw_rate = num(d, "/planning/yaw_rate");
  c.tour.cost.pitch_rate = num(d, "/planning/pitch_rate");
  const json& combine = d["planning"]["cost_combine"];
  if (combine == "max") {
    c.tour.cost.combine = CostCombine::kMax;
  } else if (combine == "sum") {
    c.tour.cost.combine = CostCombine::kSum;
  } else {
    bad("/planning/cost_combine", "must be \"max\" or \"sum\"");
  }
  c.tour.smoothing_step = num(d, "/planning/smoothing_step");
  c.tour.dt = num(d, "/planning/dt");
  c.tour.l_exec = num(d, "/planning/l_exec");
  c.validate();
  return c;
}

}  // namespace

void Config::validate() const {
  require(budget >= 1, "/run/budget", ">= 1");
  require(max_cycles >= 1, "/run/max_cycles", ">= 1");
  require(camera.hfov > 0.0 && camera.hfov < kPi, "/camera/hfov", "in (0, pi)");
  require(camera.vfov > 0.0 && camera.vfov < kPi, "/camera/vfov", "in (0, pi)");
  require(camera.max_range > 0.0, "/camera/max_range", "> 0");
  require(camera.width >= 1, "/camera/width", ">= 1");
  require(camera.height >= 1, "/camera/height", ">= 1");
  require(lambda_d >= 0.0, "/loss/lambda_d", ">= 0");
  require(loss.base > 0.0, "/loss/base", "> 0");
  require(loss.decay > 0.0 && loss.decay < 1.0, "/loss/decay", "in (0, 1)");
  require(loss.slope >= 0.0, "/loss/incidence_slope", ">= 0");
  require(loss.depth_ratio >= 0.0, "/loss/depth_ratio", ">= 0");
  require(loss.jitter >= 0.0 && loss.jitter < 1.0, "/loss/jitter", "in [0, 1)");
  require(lambda_e > 0.0, "/semantics/lambda_e", "> 0");
  require(c_min >= 0.0, "/semantics/c_min", ">= 0");
  require(c_max <= 1.0, "/semantics/c_max", "<= 1");
  if (!(c_min < c_max)) {
    bad("/semantics/c_min", "must be < /semantics/c_max (" + std::to_string(c_max) + ")");
  }
  require(prune_threshold > 0.0, "/cache/prune_threshold", "> 0");
  require(prune_interval >= 1, "/cache/prune_interval", ">= 1");
  require(tasks.n_down >= 1, "/tasks/n_down", ">= 1");
  require(tasks.d_poi > 0.0, "/tasks/d_poi", "> 0");
  require(!tasks.rings.radii.empty(), "/tasks/ring_radii", "non-empty");
  for (double r : tasks.rings.radii) require(r > 0.0, "/tasks/ring_radii", "all > 0");
  require(tasks.rings.yaw_samples >= 1, "/tasks/yaw_samples", ">= 1");
  require(!tasks.rings.pitch_levels.empty(), "/tasks/pitch_levels", "non-empty");
  for (double p : tasks.rings.pitch_levels) {
    require(std::abs(p) < kPi / 2, "/tasks/pitch_levels", "all in (-pi/2, pi/2)");
  }
  require(d_local > 0.0, "/collaboration/d_local", "> 0");
  const ClusterWeights& w = cluster.weights;
  require(w.compactness >= 0.0, "/collaboration/weights/compactness", ">= 0");
  require(w.robot_distance >= 0.0, "/collaboration/weights/robot_distance", ">= 0");
  require(w.count_balance >= 0.0, "/collaboration/weights/count_balance", ">= 0");
  require(w.distance_balance >= 0.0, "/collaboration/weights/distance_balance", ">= 0");
  require(cluster.max_iterations >= 1, "/collaboration/max_iterations", ">= 1");
  require(cluster.tolerance >= 0.0, "/collaboration/tolerance", ">= 0");
  require(clearance_voxels >= 0, "/planning/clearance_voxels", ">= 0");
  require(tour.cost.v_max > 0.0, "/planning/v_max", "> 0");
  require(tour.cost.yaw_rate > 0.0, "/planning/yaw_rate", "> 0");
  require(tour.cost.pitch_rate > 0.0, "/planning/pitch_rate", "> 0");
  require(tour.smoothing_step > 0.0, "/planning/smoothing_step", "> 0");
  require(tour.dt > 0.0, "/planning/dt", "> 0");
  require(tour.l_exec > 0.0, "/planning/l_exec", "> 0");
}

Config parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json user = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
    try {
      user = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kParse, std::string("config is not valid JSON: ") + e.what());
    }
  }
  json doc = to_json_doc(Config{});
  overlay(doc, user, "");
  return from_json_doc(doc, base_dir);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path dir = std::filesystem::absolute(path).parent_path();
  return parse_config(ss.str(), dir);
}

std::string config_json(const Config& config) { return to_json_doc(config).dump(2) + "\n"; }

namespace {

struct SchemaRow {
  const char* key;
  const char* type;
  const char* unit;
  const char* bound;
  bool invented;
  const char* meaning;
};

// Keys whose defaults are published values are marked invented = false.
constexpr SchemaRow kSchema[] = {
    {"/scene", "path", "", "existing scene file", true, "scene JSON, relative to the config file"},
    {"/robots", "array", "", "non-empty; each start in a free voxel", true,
     "start poses: position [m], yaw and pitch [rad]"},
    {"/run/budget", "integer", "views", ">= 1", true, "total sensing budget across robots"},
    {"/run/seed", "integer", "", "uint64", true, "seed for the per-voxel loss jitter"},
    {"/run/variant", "string", "", "one of the six variants", true, "pipeline ablation"},
    {"/run/max_cycles", "integer", "cycles", ">= 1", true, "hard cap on planning cycles"},
    {"/camera/hfov", "number", "rad", "(0, pi)", true, "horizontal field of view"},
    {"/camera/vfov", "number", "rad", "(0, pi)", true, "vertical field of view"},
    {"/camera/max_range", "number", "m", "> 0", true, "sensing range"},
    {"/camera/width", "integer", "rays", ">= 1", true, "ray grid width"},
    {"/camera/height", "integer", "rays", ">= 1", true, "ray grid height"},
    {"/loss/lambda_d", "number", "", ">= 0", false, "depth weight in the projected loss"},
    {"/loss/base", "number", "", "> 0", true, "synthetic loss scale"},
    {"/loss/decay", "number", "", "(0, 1)", true, "per-observation loss decay"},
    {"/loss/incidence_slope", "number", "1/rad", ">= 0", true, "loss growth with incidence angle"},
    {"/loss/depth_ratio", "number", "", ">= 0", true, "depth loss as a multiple of color loss"},
    {"/loss/jitter", "number", "", "[0, 1)", true, "per-voxel loss spread"},
    {"/semantics/lambda_e", "number", "", "> 0", false, "objectness softmax scale"},
    {"/semantics/c_min", "number", "", "[0, c_max)", false, "lower objectness gate"},
    {"/semantics/c_max", "number", "", "(c_min, 1]", false, "upper objectness gate"},
    {"/cache/prune_threshold", "number", "m", "> 0", false, "floater distance threshold"},
    {"/cache/prune_interval", "integer", "frames", ">= 1", false, "frames between pruning passes"},
    {"/tasks/n_down", "integer", "", ">= 1", false, "surface downsampling stride"},
    {"/tasks/d_poi", "number", "m", "> 0", false, "minimum spacing between points of interest"},
    {"/tasks/ring_radii", "array", "m", "non-empty, all > 0", true, "candidate view ring radii"},
    {"/tasks/yaw_samples", "integer", "", ">= 1", true, "candidate views per ring and pitch"},
    {"/tasks/pitch_levels", "array", "rad", "non-empty, all in (-pi/2, pi/2)", true,
     "candidate view pitches; negative looks down"},
    {"/collaboration/d_local", "number", "m", "> 0", false, "radius of the local task tally"},
    {"/collaboration/weights/compactness", "number", "", ">= 0", true, "weight on distance sums"},
    {"/collaboration/weights/robot_distance", "number", "", ">= 0", true,
     "weight on robot to centroid distance"},
    {"/collaboration/weights/count_balance", "number", "", ">= 0", true, "weight on task count spread"},
    {"/collaboration/weights/distance_balance", "number", "", ">= 0", true,
     "weight on distance sum spread"},
    {"/collaboration/max_iterations", "integer", "", ">= 1", true, "clustering iteration cap"},
    {"/collaboration/tolerance", "number", "", ">= 0", true, "clustering stop tolerance"},
    {"/planning/clearance_voxels", "integer", "voxels", ">= 0", true, "obstacle clearance for paths"},
    {"/planning/v_max", "number", "m/s", "> 0", true, "translational speed"},
    {"/planning/yaw_rate", "number", "rad/s", "> 0", true, "yaw rate"},
    {"/planning/pitch_rate", "number", "rad/s", "> 0", true, "pitch rate"},
    {"/planning/cost_combine", "string", "", "max or sum", true, "how motion times combine"},
    {"/planning/smoothing_step", "number", "m", "> 0", true, "polyline resampling step"},
    {"/planning/dt", "number", "s", "> 0", false, "execution sampling interval"},
    {"/planning/l_exec", "number", "m", "> 0", false, "executed path length per cycle"},
};

}  // namespace

std::string config_schema() {
  const json defaults = to_json_doc(Config{});
  json keys = json::array();
  for (const SchemaRow& row : kSchema) {
    keys.push_back({{"key", row.key},
                    {"type", row.type},
                    {"unit", row.unit},
                    {"bound", row.bound},
                    {"invented", row.invented},
                    {"meaning", row.meaning},
                    {"default", defaults.at(json::json_pointer(row.key))}});
  }
  return json{{"keys", keys}}.dump(2) + "\n";
}

}  // namespace mrrecon
