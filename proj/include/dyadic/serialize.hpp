#pragma once
//
// JSON forms used for harness replay:
//   field: {"n": 1, "N": 256, "spectral": [[[k...], re, im], ...]}
//   paraproduct: {"n", "N", "L", "decay", "A", "slabs": [{"slab", "j", "M", "trace",
//                 "entries": [[[a...], [b...], re, im], ...]}, ...]}
// Only nonzero coefficients are listed.
//

#include <json.hpp>

#include "dyadic/bilinear.hpp"
#include "dyadic/grid_field.hpp"

namespace dyadic {

nlohmann::json field_to_json(const Field& f);
/// Throws StructuralError on malformed input.
Field field_from_json(const nlohmann::json& j);

nlohmann::json coefficients_to_json(const ParaproductExpansion& e);

}  // namespace dyadic
