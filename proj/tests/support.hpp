#pragma once
// Small world builders shared by the unit and acceptance tests.

#include "mrrecon/scene.hpp"
#include "mrrecon/voxel_world.hpp"

#include <filesystem>
#include <memory>
#include <random>

namespace testsupport {

using mrrecon::Coord;
using mrrecon::Vec3;

inline std::filesystem::path source_dir() { return MRRECON_SOURCE_DIR; }

// Room of nx*ny*nz voxels with one-voxel walls all around.
inline std::shared_ptr<const mrrecon::Scene> walled_room(int nx, int ny, int nz, double res = 0.1) {
  mrrecon::SceneBuilder b(Vec3::Zero(), Vec3(nx * res, ny * res, nz * res), res);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (x == 0 || y == 0 || z == 0 || x == nx - 1 || y == ny - 1 || z == nz - 1) {
          b.set_occupied(Coord{x, y, z});
        }
      }
  return b.build();
}

// Open box with no walls at all.
inline std::shared_ptr<const mrrecon::Scene> open_box(int nx, int ny, int nz, double res = 0.1) {
  mrrecon::SceneBuilder b(Vec3::Zero(), Vec3(nx * res, ny * res, nz * res), res);
  return b.build();
}

// Copies the truth into the known map.
inline void reveal_all(mrrecon::VoxelWorld& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    w.observe(i, w.truth_occupied(i) ? mrrecon::VoxelState::kOccupied : mrrecon::VoxelState::kEmpty);
  }
}

// Random scene with roughly `density` occupied voxels.
inline std::shared_ptr<const mrrecon::Scene> random_scene(std::mt19937_64& rng, int nx, int ny, int nz,
                                                          double density, double res = 0.1) {
  mrrecon::SceneBuilder b(Vec3::Zero(), Vec3(nx * res, ny * res, nz * res), res);
  std::bernoulli_distribution occ(density);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        if (occ(rng)) b.set_occupied(Coord{x, y, z});
  return b.build();
}

// Reveals each voxel's truth with probability `p`, leaving the rest unknown.
inline void reveal_random(mrrecon::VoxelWorld& w, std::mt19937_64& rng, double p) {
  std::bernoulli_distribution known(p);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (known(rng)) {
      w.observe(i, w.truth_occupied(i) ? mrrecon::VoxelState::kOccupied : mrrecon::VoxelState::kEmpty);
    }
  }
}

}  // namespace testsupport
