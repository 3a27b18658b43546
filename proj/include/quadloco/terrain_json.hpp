#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "quadloco/heightfield.hpp"

namespace quadloco {

// Object list format:
//   [{"kind": "stairs", "n_steps": 4, "total_height": 0.4, "run_depth": 0.3,
//     "offset": [0, 0], "yaw": 0, "length": 2.0, "width": 2.0}, ...]

inline nlohmann::json shapeToJson(const TerrainShape& shape) {
  nlohmann::json j;
  j["kind"] = shapeName(shape);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Stairs>) {
          j["n_steps"] = s.n_steps;
          j["total_height"] = s.total_height;
          j["run_depth"] = s.run_depth;
        } else if constexpr (std::is_same_v<T, Wave>) {
          j["amplitude"] = s.amplitude;
          j["period"] = s.period;
        } else if constexpr (std::is_same_v<T, Bricks>) {
          j["cell_size"] = s.cell_size;
          j["height"] = s.height;
        } else if constexpr (std::is_same_v<T, Unstructured>) {
          j["amplitude"] = s.amplitude;
          j["smoothing_sigma"] = s.smoothing_sigma;
        } else {
          j["plank_width"] = s.width;
          j["height"] = s.height;
          j["gap"] = s.gap;
        }
      },
      shape);
  return j;
}

inline TerrainShape shapeFromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "stairs") {
    Stairs s;
    s.n_steps = j.at("n_steps").get<int>();
    s.total_height = j.at("total_height").get<double>();
    s.run_depth = j.at("run_depth").get<double>();
    return s;
  }
  if (kind == "wave") {
    Wave s;
    s.amplitude = j.at("amplitude").get<double>();
    s.period = j.value("period", s.period);
    return s;
  }
  if (kind == "bricks") {
    Bricks s;
    s.cell_size = j.value("cell_size", s.cell_size);
    s.height = j.at("height").get<double>();
    return s;
  }
  if (kind == "unstructured") {
    Unstructured s;
    s.amplitude = j.at("amplitude").get<double>();
    s.smoothing_sigma = j.value("smoothing_sigma", s.smoothing_sigma);
    return s;
  }
  if (kind == "planks") {
    Planks s;
    s.width = j.value("plank_width", s.width);
    s.height = j.value("height", s.height);
    s.gap = j.value("gap", s.gap);
    return s;
  }
  throw InvalidArgument("unknown terrain object kind '" + kind + "'");
}

inline nlohmann::json toJson(const TerrainObjectSpec& spec) {
  nlohmann::json j = shapeToJson(spec.shape);
  j["offset"] = {spec.offset.x(), spec.offset.y()};
  j["yaw"] = spec.yaw;
  j["length"] = spec.length;
  j["width"] = spec.width;
  return j;
}

inline TerrainObjectSpec specFromJson(const nlohmann::json& j) {
  try {
    TerrainObjectSpec spec;
    spec.shape = shapeFromJson(j);
    if (j.contains("offset")) spec.offset = Vec2(j["offset"].at(0).get<double>(), j["offset"].at(1).get<double>());
    spec.yaw = j.value("yaw", 0.0);
    spec.length = j.value("length", spec.length);
    spec.width = j.value("width", spec.length);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed terrain object: ") + e.what());
  }
}

inline std::vector<TerrainObjectSpec> specsFromJson(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("terrain object list must be a JSON array");
  std::vector<TerrainObjectSpec> specs;
  for (const auto& item : j) specs.push_back(specFromJson(item));
  return specs;
}

inline TerrainKind terrainKindFromName(const std::string& name) {
  if (name == "stairs") return TerrainKind::Stairs;
  if (name == "wave") return TerrainKind::Wave;
  if (name == "bricks") return TerrainKind::Bricks;
  if (name == "unstructured") return TerrainKind::Unstructured;
  if (name == "planks") return TerrainKind::Planks;
  throw InvalidArgument("unknown terrain kind '" + name + "'");
}

}  // namespace quadloco
