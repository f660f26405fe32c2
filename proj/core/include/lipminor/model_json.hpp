#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lipminor/levy_model.hpp"

namespace lipminor {

inline constexpr int kSchemaVersion = 1;

// Model spec:
//   {"schema": 1, "sigma2": s, "drift": d, "jumps": J}
// with J one of
//   {"type": "none"}
//   {"type": "compound_poisson", "rate": r, "law": L}
//   {"type": "symmetric_stable", "index": i, "scale": c}
// and L one of
//   {"type": "two_point", "up": u, "down": v, "p_up": p}
//   {"type": "gaussian", "mean": m, "sd": s}
//   {"type": "symmetric_exponential", "scale": b}
// "schema" and "jumps" are optional. Unknown fields are rejected.
[[nodiscard]] LevyModel model_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json model_to_json(const LevyModel& model);

// Accepts either inline JSON text or a path to a JSON file.
[[nodiscard]] LevyModel parse_model_spec(std::string_view spec);

}  // namespace lipminor
