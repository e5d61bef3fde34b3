#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpo/errors.hpp"

namespace mpo {

/// Factorization of matrix dimensions into per-tensor extents.
///
/// A matrix [rows, cols] is carried by a chain of n local tensors whose
/// row extents multiply to padded_rows >= rows and whose column extents
/// multiply to padded_cols >= cols. The padding rows/columns are zeros
/// and are cropped away on reconstruction, so they never appear in
/// user-visible matrices.
struct ShapePlan {
    int n = 0;
    std::vector<std::int64_t> row_factors;  ///< i_1..i_n
    std::vector<std::int64_t> col_factors;  ///< j_1..j_n
    std::int64_t rows = 0;                  ///< original row count I
    std::int64_t cols = 0;                  ///< original column count J
    std::int64_t padded_rows = 0;
    std::int64_t padded_cols = 0;
    /// Set when the plan contains factor-of-1 slots (chain longer than
    /// the dimension supports); such plans work but waste tensors.
    bool unit_factor_warning = false;

    bool padded() const noexcept { return padded_rows != rows || padded_cols != cols; }
    void validate() const;
};

/// Bond dimensions d_0..d_n between adjacent local tensors
/// (d_0 == d_n == 1).
struct BondProfile {
    std::vector<std::int64_t> dims;

    std::int64_t interior_max() const;
    /// True when every entry is <= the corresponding entry of other.
    bool dominated_by(const BondProfile& other) const;
    bool operator==(const BondProfile&) const = default;
};

struct PlanOverrides {
    std::optional<std::vector<std::int64_t>> row_factors;
    std::optional<std::vector<std::int64_t>> col_factors;
};

/// Builds a shape plan for an [rows, cols] matrix split across n tensors.
///
/// With overrides the factor lists are validated and used verbatim; their
/// products define the padded dimensions and must cover the originals.
/// Without overrides each dimension is padded to the smallest value whose
/// prime factorization supports n factors >= 2, and the primes are packed
/// greedily (largest prime into the currently smallest slot), with the
/// final list sorted non-decreasing for determinism.
ShapePlan plan_shapes(std::int64_t rows, std::int64_t cols, int n,
                      const PlanOverrides& overrides = {});

/// Full (untruncated) bond profile of a plan:
/// d_k = min(prod_{m<=k} i_m*j_m, prod_{m>k} i_m*j_m).
BondProfile full_bonds(const ShapePlan& plan);

std::string format_factors(const std::vector<std::int64_t>& factors);

}  // namespace mpo
