#include "mpo/presets.hpp"

#include <array>
#include <string>
#include <vector>

namespace mpo {

namespace {

const std::vector<PlanPreset>& preset_table() {
    static const std::vector<PlanPreset> presets = {
        {"albert-embedding", 30000, 128, {5, 10, 10, 10, 6}, {2, 2, 4, 4, 2}},
        {"albert-ffn", 768, 3072, {3, 4, 4, 4, 4}, {4, 4, 8, 6, 4}},
        {"albert-ffn-out", 3072, 768, {4, 4, 8, 6, 4}, {3, 4, 4, 4, 4}},
        {"albert-attention", 768, 768, {3, 4, 4, 4, 4}, {4, 4, 4, 4, 3}},
        // 30522 rows do not factor into five usable extents; the row side is
        // zero-padded to 30720 and cropped after reconstruction.
        {"bert-embedding", 30522, 768, {6, 8, 8, 8, 10}, {3, 4, 4, 4, 4}},
    };
    return presets;
}

}  // namespace

std::span<const PlanPreset> shape_presets() { return preset_table(); }

const PlanPreset& find_preset(std::string_view name) {
    for (const auto& p : preset_table()) {
        if (p.name == name) return p;
    }
    std::string known;
    for (const auto& p : preset_table()) {
        if (!known.empty()) known += ", ";
        known += p.name;
    }
    throw PlanError("unknown plan preset '" + std::string(name) + "' (known: " + known + ")");
}

ShapePlan preset_plan(std::string_view name) {
    const PlanPreset& p = find_preset(name);
    PlanOverrides o;
    o.row_factors = p.row_factors;
    o.col_factors = p.col_factors;
    return plan_shapes(p.rows, p.cols, static_cast<int>(p.row_factors.size()), o);
}

}  // namespace mpo
