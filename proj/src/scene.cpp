#include "mrrecon/scene.hpp"

#include "mrrecon/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mrrecon {

using nlohmann::json;

std::size_t Scene::occupied_count() const {
  return static_cast<std::size_t>(std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

const InstanceSpec* Scene::find_instance(std::int32_t id) const {
  auto it = instances.find(id);
  return it == instances.end() ? nullptr : &it->second;
}

namespace {

GridGeometry grid_from_extent(const Vec3& lo, const Vec3& hi, double res) {
  if (!(res > 0.0) || !std::isfinite(res)) {
    fail(ErrorCode::kParse, "resolution must be positive");
  }
  GridDims dims;
  std::array<int*, 3> out{&dims.nx, &dims.ny, &dims.nz};
  for (int a = 0; a < 3; ++a) {
    const double size = hi[a] - lo[a];
    if (!(size > 0.0)) fail(ErrorCode::kParse, "extent must be positive along every axis");
    const double cells = size / res;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-6 * std::max(1.0, cells)) {
      fail(ErrorCode::kParse, "extent is not a whole number of voxels along axis " +
                                  std::to_string(a));
    }
    *out[a] = static_cast<int>(rounded);
  }
  return GridGeometry(lo, dims, res);
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Field-level access helpers that report the JSON path on failure.
class Reader {
 public:
  [[noreturn]] static void bad(const std::string& path, const std::string& msg) {
    fail(ErrorCode::kParse, "scene field " + path + ": " + msg);
  }

  static void only_keys(const json& obj, const std::string& path,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) bad(path, "expected object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* k : allowed) ok = ok || it.key() == k;
      if (!ok) bad(path + "/" + it.key(), "unknown field");
    }
  }

  static const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) bad(path + "/" + key, "missing");
    return *it;
  }

  static double number(const json& v, const std::string& path) {
    if (!v.is_number()) bad(path, "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(path, "expected finite number");
    return d;
  }

  static std::int64_t integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) bad(path, "expected integer");
    return v.get<std::int64_t>();
  }

  static Vec3 vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) bad(path, "expected [x, y, z]");
    return Vec3(number(v[0], path + "/0"), number(v[1], path + "/1"),
                number(v[2], path + "/2"));
  }
};

}  // namespace

std::shared_ptr<const Scene> parse_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, "scene JSON syntax error at line " +
                                std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  Reader::only_keys(doc, "", {"format", "version", "resolution", "extent",
                              "background_complexity", "occupied_runs", "instances"});
  const json& format = Reader::require(doc, "", "format");
  if (!format.is_string() || format.get<std::string>() != "mrrecon-scene") {
    Reader::bad("/format", "expected \"mrrecon-scene\"");
  }
  if (Reader::integer(Reader::require(doc, "", "version"), "/version") != kSceneFormatVersion) {
    Reader::bad("/version", "unsupported version");
  }
  const double res = Reader::number(Reader::require(doc, "", "resolution"), "/resolution");
  const json& extent = Reader::require(doc, "", "extent");
  Reader::only_keys(extent, "/extent", {"min", "max"});
  const Vec3 lo = Reader::vec3(Reader::require(extent, "/extent", "min"), "/extent/min");
  const Vec3 hi = Reader::vec3(Reader::require(extent, "/extent", "max"), "/extent/max");

  SceneBuilder builder = [&] {
    try {
      return SceneBuilder(lo, hi, res);
    } catch (const Error& e) {
      fail(ErrorCode::kParse, std::string("scene extent: ") + e.what());
    }
  }();
  const GridGeometry& grid = builder.grid();
  if (auto it = doc.find("background_complexity"); it != doc.end()) {
    const double c = Reader::number(*it, "/background_complexity");
    if (!(c > 0.0)) Reader::bad("/background_complexity", "must be positive");
    builder.background_complexity(c);
  }

  const json& runs = Reader::require(doc, "", "occupied_runs");
  if (!runs.is_array()) Reader::bad("/occupied_runs", "expected array");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string path = "/occupied_runs/" + std::to_string(i);
    const json& run = runs[i];
    if (!run.is_array() || run.size() != 4) Reader::bad(path, "expected [ix, iy, z_start, length]");
    const auto ix = Reader::integer(run[0], path + "/0");
    const auto iy = Reader::integer(run[1], path + "/1");
    const auto z0 = Reader::integer(run[2], path + "/2");
    const auto len = Reader::integer(run[3], path + "/3");
    if (len < 1) Reader::bad(path + "/3", "run length must be >= 1");
    const GridDims& d = grid.dims();
    if (ix < 0 || iy < 0 || z0 < 0 || ix >= d.nx || iy >= d.ny || z0 + len > d.nz) {
      fail(ErrorCode::kBounds, "scene field " + path + ": run outside extent");
    }
    for (std::int64_t z = z0; z < z0 + len; ++z) {
      builder.set_occupied(Coord{static_cast<int>(ix), static_cast<int>(iy), static_cast<int>(z)});
    }
  }

  const json& instances = Reader::require(doc, "", "instances");
  if (!instances.is_array()) Reader::bad("/instances", "expected array");
  std::set<std::int64_t> seen_ids;
  std::vector<std::uint8_t> claimed(grid.size(), 0);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string path = "/instances/" + std::to_string(i);
    const json& inst = instances[i];
    Reader::only_keys(inst, path, {"id", "name", "complexity", "similarity", "voxels"});
    const auto id = Reader::integer(Reader::require(inst, path, "id"), path + "/id");
    if (id < 0 || id > INT32_MAX) Reader::bad(path + "/id", "must be a non-negative 32-bit integer");
    if (!seen_ids.insert(id).second) Reader::bad(path + "/id", "duplicate instance id");
    const json& name = Reader::require(inst, path, "name");
    if (!name.is_string()) Reader::bad(path + "/name", "expected string");
    double complexity = 1.0;
    if (auto it = inst.find("complexity"); it != inst.end()) {
      complexity = Reader::number(*it, path + "/complexity");
      if (!(complexity > 0.0)) Reader::bad(path + "/complexity", "must be positive");
    }
    const json& sim = Reader::require(inst, path, "similarity");
    if (!sim.is_array() || sim.size() < 2) Reader::bad(path + "/similarity", "expected >= 2 scores");
    std::vector<double> similarity;
    similarity.reserve(sim.size());
    for (std::size_t k = 0; k < sim.size(); ++k) {
      similarity.push_back(Reader::number(sim[k], path + "/similarity/" + std::to_string(k)));
    }
    const json& voxels = Reader::require(inst, path, "voxels");
    if (!voxels.is_array()) Reader::bad(path + "/voxels", "expected array");
    std::vector<Coord> coords;
    coords.reserve(voxels.size());
    for (std::size_t k = 0; k < voxels.size(); ++k) {
      const std::string vpath = path + "/voxels/" + std::to_string(k);
      const json& v = voxels[k];
      if (!v.is_array() || v.size() != 3) Reader::bad(vpath, "expected [ix, iy, iz]");
      const Coord c{static_cast<int>(Reader::integer(v[0], vpath + "/0")),
                    static_cast<int>(Reader::integer(v[1], vpath + "/1")),
                    static_cast<int>(Reader::integer(v[2], vpath + "/2"))};
      if (!grid.contains(c)) fail(ErrorCode::kBounds, "scene field " + vpath + ": voxel outside extent");
      const std::size_t idx = grid.index(c);
      if (claimed[idx]) Reader::bad(vpath, "voxel claimed by more than one instance");
      claimed[idx] = 1;
      coords.push_back(c);
    }
    const auto id32 = static_cast<std::int32_t>(id);
    builder.describe_instance(id32, name.get<std::string>(), complexity, std::move(similarity));
    for (const Coord& c : coords) {
      if (!builder.is_occupied(c)) {
        Reader::bad(path + "/voxels", "instance voxel is not covered by occupied_runs");
      }
    }
    builder.add_instance_voxels(id32, coords);
  }
  return builder.build();
}

std::shared_ptr<const Scene> load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open scene file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

namespace {

std::string num(double v) { return json(v).dump(); }

}  // namespace

std::string serialize_scene(const Scene& scene) {
  const GridGeometry& g = scene.grid;
  const GridDims& d = g.dims();
  const Vec3 lo = g.origin();
  const Vec3 hi = lo + g.resolution() * Vec3(d.nx, d.ny, d.nz);
  std::ostringstream out;
  out << "{\n";
  out << "  \"format\": \"mrrecon-scene\",\n";
  out << "  \"version\": " << kSceneFormatVersion << ",\n";
  out << "  \"resolution\": " << num(g.resolution()) << ",\n";
  // The upper corner is derived, so it is printed rounded to hide
  // accumulated error; parsing snaps it back to whole voxels.
  auto corner = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  };
  out << "  \"extent\": {\"min\": [" << num(lo.x()) << ", " << num(lo.y()) << ", " << num(lo.z())
      << "], \"max\": [" << corner(hi.x()) << ", " << corner(hi.y()) << ", " << corner(hi.z())
      << "]},\n";
  out << "  \"background_complexity\": " << num(scene.background_complexity) << ",\n";
  out << "  \"occupied_runs\": [";
  bool first = true;
  for (int y = 0; y < d.ny; ++y) {
    for (int x = 0; x < d.nx; ++x) {
      int z = 0;
      while (z < d.nz) {
        if (!scene.occupied[g.index(Coord{x, y, z})]) {
          ++z;
          continue;
        }
        int z1 = z;
        while (z1 < d.nz && scene.occupied[g.index(Coord{x, y, z1})]) ++z1;
        out << (first ? "\n    " : ",\n    ") << "[" << x << ", " << y << ", " << z << ", "
            << (z1 - z) << "]";
        first = false;
        z = z1;
      }
    }
  }
  out << (first ? "],\n" : "\n  ],\n");
  out << "  \"instances\": [";
  first = true;
  for (const auto& [id, inst] : scene.instances) {
    out << (first ? "\n" : ",\n");
    first = false;
    out << "    {\"id\": " << id << ", \"name\": " << json(inst.name).dump()
        << ", \"complexity\": " << num(inst.complexity) << ",\n";
    out << "     \"similarity\": [";
    for (std::size_t k = 0; k < inst.similarity.size(); ++k) {
      out << (k ? ", " : "") << num(inst.similarity[k]);
    }
    out << "],\n     \"voxels\": [";
    for (std::size_t k = 0; k < inst.voxels.size(); ++k) {
      const Coord c = g.coord(inst.voxels[k]);
      out << (k ? ", " : "") << "[" << c.x << ", " << c.y << ", " << c.z << "]";
    }
    out << "]}";
  }
  out << (first ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write scene file " + path.string());
  out << serialize_scene(scene);
}

// ---------------------------------------------------------------------------

SceneBuilder::SceneBuilder(const Vec3& min_corner, const Vec3& max_corner, double resolution)
    : grid_(grid_from_extent(min_corner, max_corner, resolution)),
      occupied_(grid_.size(), 0),
      instance_of_(grid_.size(), kNoInstance) {}

SceneBuilder& SceneBuilder::fill_box(const Vec3& lo, const Vec3& hi) {
  const GridDims& d = grid_.dims();
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const Vec3 c = grid_.center(Coord{x, y, z});
        if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) {
          occupied_[grid_.index(Coord{x, y, z})] = 1;
        }
      }
  return *this;
}

SceneBuilder& SceneBuilder::clear_box(const Vec3& lo, const Vec3& hi) {
  const GridDims& d = grid_.dims();
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const Vec3 c = grid_.center(Coord{x, y, z});
        if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) {
          const std::size_t i = grid_.index(Coord{x, y, z});
          if (instance_of_[i] != kNoInstance) continue;
          occupied_[i] = 0;
        }
      }
  return *this;
}

SceneBuilder& SceneBuilder::set_occupied(const Coord& c, bool occupied) {
  if (!grid_.contains(c)) fail(ErrorCode::kBounds, "voxel outside scene extent");
  occupied_[grid_.index(c)] = occupied ? 1 : 0;
  return *this;
}

bool SceneBuilder::is_occupied(const Coord& c) const {
  return grid_.contains(c) && occupied_[grid_.index(c)] != 0;
}

void SceneBuilder::claim(std::int32_t id, std::size_t index) {
  if (instance_of_[index] != kNoInstance && instance_of_[index] != id) {
    fail(ErrorCode::kParse, "voxel claimed by more than one instance");
  }
  instance_of_[index] = id;
  occupied_[index] = 1;
}

SceneBuilder& SceneBuilder::add_instance_box(std::int32_t id, const Vec3& lo, const Vec3& hi) {
  const GridDims& d = grid_.dims();
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        const Vec3 c = grid_.center(Coord{x, y, z});
        if ((c.array() >= lo.array()).all() && (c.array() <= hi.array()).all()) {
          claim(id, grid_.index(Coord{x, y, z}));
        }
      }
  instances_[id].id = id;
  return *this;
}

SceneBuilder& SceneBuilder::add_instance_voxels(std::int32_t id, const std::vector<Coord>& voxels) {
  for (const Coord& c : voxels) {
    if (!grid_.contains(c)) fail(ErrorCode::kBounds, "instance voxel outside scene extent");
    claim(id, grid_.index(c));
  }
  instances_[id].id = id;
  return *this;
}

SceneBuilder& SceneBuilder::describe_instance(std::int32_t id, std::string name, double complexity,
                                              std::vector<double> similarity) {
  InstanceSpec& spec = instances_[id];
  spec.id = id;
  spec.name = std::move(name);
  spec.complexity = complexity;
  spec.similarity = std::move(similarity);
  return *this;
}

SceneBuilder& SceneBuilder::background_complexity(double c) {
  background_complexity_ = c;
  return *this;
}

std::shared_ptr<const Scene> SceneBuilder::build() const {
  auto scene = std::make_shared<Scene>();
  scene->grid = grid_;
  scene->background_complexity = background_complexity_;
  scene->occupied = occupied_;
  scene->instance_of = instance_of_;
  scene->instances = instances_;
  for (auto& [id, spec] : scene->instances) spec.voxels.clear();
  for (std::size_t i = 0; i < instance_of_.size(); ++i) {
    if (instance_of_[i] == kNoInstance) continue;
    scene->instances.at(instance_of_[i]).voxels.push_back(i);
  }
  for (const auto& [id, spec] : scene->instances) {
    if (spec.similarity.size() < 2) {
      fail(ErrorCode::kParse, "instance " + std::to_string(id) + " lacks a similarity vector");
    }
  }
  return scene;
}

}  // namespace mrrecon
