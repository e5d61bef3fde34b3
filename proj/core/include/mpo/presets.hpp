#pragma once

#include <span>
#include <string_view>

#include "mpo/shape_plan.hpp"

namespace mpo {

/// Named n=5 decomposition plan for a transformer-sized weight matrix.
struct PlanPreset {
    std::string_view name;
    std::int64_t rows, cols;
    std::vector<std::int64_t> row_factors, col_factors;
};

/// The built-in plans:
///   albert-embedding   30000 x 128
///   albert-ffn         768 x 3072
///   albert-ffn-out     3072 x 768
///   albert-attention   768 x 768
///   bert-embedding     30522 x 768, zero-padded to 30720 x 768
std::span<const PlanPreset> shape_presets();

/// Looks a preset up by name; throws PlanError for unknown names.
const PlanPreset& find_preset(std::string_view name);

ShapePlan preset_plan(std::string_view name);

}  // namespace mpo
