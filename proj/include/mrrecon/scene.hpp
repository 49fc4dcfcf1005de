#pragma once

#include "mrrecon/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace mrrecon {

inline constexpr int kSceneFormatVersion = 1;
inline constexpr std::int32_t kNoInstance = -1;

struct InstanceSpec {
  std::int32_t id = 0;
  std::string name;
  double complexity = 1.0;          // scales the synthetic base loss
  std::vector<double> similarity;   // vocabulary similarity scores
  std::vector<std::size_t> voxels;  // linear indices, sorted
};

// Ground truth of a scene. Immutable once built; worlds share it.
struct Scene {
  GridGeometry grid;
  double background_complexity = 1.0;
  std::vector<std::uint8_t> occupied;       // per voxel
  std::vector<std::int32_t> instance_of;    // per voxel, kNoInstance if none
  std::map<std::int32_t, InstanceSpec> instances;

  std::size_t occupied_count() const;
  const InstanceSpec* find_instance(std::int32_t id) const;
};

// Incremental construction of a Scene; used by the generator presets and tests.
class SceneBuilder {
 public:
  SceneBuilder(const Vec3& min_corner, const Vec3& max_corner, double resolution);

  const GridGeometry& grid() const { return grid_; }

  // Marks every voxel whose center lies inside [lo, hi] occupied.
  SceneBuilder& fill_box(const Vec3& lo, const Vec3& hi);
  SceneBuilder& clear_box(const Vec3& lo, const Vec3& hi);
  SceneBuilder& set_occupied(const Coord& c, bool occupied = true);
  // Claims the voxels inside [lo, hi] (marking them occupied) for an instance.
  SceneBuilder& add_instance_box(std::int32_t id, const Vec3& lo, const Vec3& hi);
  SceneBuilder& add_instance_voxels(std::int32_t id, const std::vector<Coord>& voxels);
  SceneBuilder& describe_instance(std::int32_t id, std::string name, double complexity,
                                  std::vector<double> similarity);
  SceneBuilder& background_complexity(double c);

  bool is_occupied(const Coord& c) const;

  std::shared_ptr<const Scene> build() const;

 private:
  void claim(std::int32_t id, std::size_t index);

  GridGeometry grid_;
  std::vector<std::uint8_t> occupied_;
  std::vector<std::int32_t> instance_of_;
  std::map<std::int32_t, InstanceSpec> instances_;
  double background_complexity_ = 1.0;
};

/// Parses a scene document. Throws Error(kParse) with the offending line or
/// JSON path, Error(kBounds) for voxels outside the extent.
std::shared_ptr<const Scene> parse_scene(const std::string& text);
std::shared_ptr<const Scene> load_scene(const std::filesystem::path& path);

std::string serialize_scene(const Scene& scene);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace mrrecon
