#pragma once

#include "mrrecon/scene.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mrrecon {

// Built-in fixture scenes:
//   rooms3     three connected rooms with doors and three furniture instances
//   corridor   an L-shaped corridor without instances
//   cluttered  one room with an instance and a scatter of low-objectness specks
//   sealed     a single closed room with one instance
std::vector<std::string> preset_names();

/// Throws Error(kInvalidArgument) for an unknown name.
std::shared_ptr<const Scene> make_preset(std::string_view name);

}  // namespace mrrecon
