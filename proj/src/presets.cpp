#include "mrrecon/presets.hpp"

#include "mrrecon/error.hpp"

#include <random>

namespace mrrecon {

namespace {

constexpr std::size_t kVocabulary = 200;

// Similarity vector over the full vocabulary: the given leading scores, the
// rest at a low background similarity.
std::vector<double> vocab(std::vector<double> head, double rest = 0.1) {
  head.resize(kVocabulary, rest);
  return head;
}

// Floor, ceiling and outer walls one voxel thick.
void shell(SceneBuilder& b, const Vec3& lo, const Vec3& hi, double res) {
  const double t = res;
  b.fill_box(lo, Vec3(hi.x(), hi.y(), lo.z() + t));
  b.fill_box(Vec3(lo.x(), lo.y(), hi.z() - t), hi);
  b.fill_box(lo, Vec3(lo.x() + t, hi.y(), hi.z()));
  b.fill_box(Vec3(hi.x() - t, lo.y(), lo.z()), hi);
  b.fill_box(lo, Vec3(hi.x(), lo.y() + t, hi.z()));
  b.fill_box(Vec3(lo.x(), hi.y() - t, lo.z()), hi);
}

std::shared_ptr<const Scene> rooms3() {
  const double res = 0.1;
  const Vec3 lo(0, 0, 0);
  const Vec3 hi(9, 4, 2.4);
  SceneBuilder b(lo, hi, res);
  shell(b, lo, hi, res);
  for (double x : {3.0, 6.0}) {
    b.fill_box(Vec3(x - 0.05, 0, 0), Vec3(x + 0.05, 4, 2.4));
    b.clear_box(Vec3(x - 0.05, 1.5, 0.1), Vec3(x + 0.05, 2.5, 2.0));
  }
  b.add_instance_box(1, Vec3(1.0, 1.0, 0.1), Vec3(1.6, 1.6, 0.9));
  b.describe_instance(1, "chair", 1.6, vocab({0.30, 0.295, 0.20, 0.21, 0.22, 0.18}));
  b.add_instance_box(2, Vec3(4.0, 2.6, 0.1), Vec3(5.2, 3.3, 0.8));
  b.describe_instance(2, "table", 1.3, vocab({0.30, 0.292, 0.29, 0.21, 0.20, 0.22}));
  b.add_instance_box(3, Vec3(7.4, 1.1, 0.1), Vec3(8.2, 1.6, 1.6));
  b.describe_instance(3, "cabinet", 1.2, vocab({0.34, 0.30, 0.20, 0.21, 0.22, 0.18}));
  return b.build();
}

std::shared_ptr<const Scene> corridor() {
  const double res = 0.2;
  const Vec3 lo(0, 0, 0);
  const Vec3 hi(8, 6, 2);
  SceneBuilder b(lo, hi, res);
  b.fill_box(lo, hi);
  // Horizontal leg along +x, vertical leg along +y at the far end.
  b.clear_box(Vec3(0.3, 0.3, 0.3), Vec3(7.7, 1.7, 1.7));
  b.clear_box(Vec3(6.3, 0.3, 0.3), Vec3(7.7, 5.7, 1.7));
  return b.build();
}

std::shared_ptr<const Scene> cluttered() {
  const double res = 0.1;
  const Vec3 lo(0, 0, 0);
  const Vec3 hi(6, 4, 2.4);
  SceneBuilder b(lo, hi, res);
  shell(b, lo, hi, res);
  b.add_instance_box(1, Vec3(2.6, 1.6, 0.1), Vec3(3.4, 2.4, 1.0));
  b.describe_instance(1, "plant", 1.5, vocab({0.30, 0.292, 0.29, 0.21, 0.20, 0.22}));
  // Single-voxel specks on the floor and walls. Uniform similarity keeps
  // their objectness at 1/200, far below any useful gate, while their high
  // complexity makes them loud in the loss cache.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> px(2, 57), py(2, 37), pz(1, 20), side(0, 3);
  std::int32_t id = 100;
  for (int k = 0; k < 60; ++k) {
    Coord c;
    switch (side(rng)) {
      case 0: c = Coord{px(rng), py(rng), 1}; break;
      case 1: c = Coord{1, py(rng), pz(rng)}; break;
      case 2: c = Coord{58, py(rng), pz(rng)}; break;
      default: c = Coord{px(rng), 38, pz(rng)}; break;
    }
    if (b.is_occupied(c)) continue;
    b.add_instance_voxels(id, {c});
    b.describe_instance(id, "speck", 3.0, std::vector<double>(kVocabulary, 0.21));
    ++id;
  }
  return b.build();
}

std::shared_ptr<const Scene> sealed() {
  const double res = 0.1;
  const Vec3 lo(0, 0, 0);
  const Vec3 hi(3, 3, 2);
  SceneBuilder b(lo, hi, res);
  shell(b, lo, hi, res);
  b.add_instance_box(1, Vec3(1.3, 1.3, 0.1), Vec3(1.7, 1.7, 0.6));
  b.describe_instance(1, "box", 1.0, vocab({0.30, 0.295, 0.20, 0.21, 0.22, 0.18}));
  return b.build();
}

}  // namespace

std::vector<std::string> preset_names() { return {"rooms3", "corridor", "cluttered", "sealed"}; }

std::shared_ptr<const Scene> make_preset(std::string_view name) {
  if (name == "rooms3") return rooms3();
  if (name == "corridor") return corridor();
  if (name == "cluttered") return cluttered();
  if (name == "sealed") return sealed();
  fail(ErrorCode::kInvalidArgument, "unknown scene preset '" + std::string(name) + "'");
}

}  // namespace mrrecon
