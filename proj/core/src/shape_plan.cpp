#include "mpo/shape_plan.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mpo {

namespace {

std::int64_t product(const std::vector<std::int64_t>& v) {
    std::int64_t p = 1;
    for (auto x : v) p *= x;
    return p;
}

// Prime factors with multiplicity, descending.
std::vector<std::int64_t> prime_factors_desc(std::int64_t x) {
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d * d <= x; ++d) {
        while (x % d == 0) {
            out.push_back(d);
            x /= d;
        }
    }
    if (x > 1) out.push_back(x);
    std::sort(out.rbegin(), out.rend());
    return out;
}

// Smallest value >= x with at least n prime factors (with multiplicity),
// split into n factors as balanced as the primes allow.
std::vector<std::int64_t> balanced_factors(std::int64_t x, int n, std::int64_t* padded) {
    if (x == 1) {
        *padded = 1;
        return std::vector<std::int64_t>(static_cast<std::size_t>(n), 1);
    }
    std::int64_t xp = x;
    std::vector<std::int64_t> primes;
    for (;; ++xp) {
        primes = prime_factors_desc(xp);
        if (static_cast<int>(primes.size()) >= n) break;
    }
    *padded = xp;

    std::vector<std::int64_t> slots(static_cast<std::size_t>(n), 1);
    for (auto p : primes) {
        auto it = std::min_element(slots.begin(), slots.end());
        *it *= p;
    }
    std::sort(slots.begin(), slots.end());
    return slots;
}

std::vector<std::int64_t> validated_override(const std::vector<std::int64_t>& factors,
                                             std::int64_t original, int n, const char* side,
                                             std::int64_t* padded) {
    if (static_cast<int>(factors.size()) != n) {
        throw PlanError(std::string(side) + " factor override must have length n=" +
                        std::to_string(n) + ", got " + std::to_string(factors.size()));
    }
    for (auto f : factors) {
        if (f < 1) throw PlanError(std::string(side) + " factors must be >= 1");
    }
    const std::int64_t prod = product(factors);
    if (prod < original) {
        throw PlanError(std::string(side) + " factor product " + std::to_string(prod) +
                        " cannot cover dimension " + std::to_string(original) +
                        " even with zero padding");
    }
    *padded = prod;
    return factors;
}

}  // namespace

void ShapePlan::validate() const {
    if (n < 2) throw PlanError("shape plan needs n >= 2 tensors");
    if (rows < 1 || cols < 1) throw PlanError("matrix dimensions must be >= 1");
    if (static_cast<int>(row_factors.size()) != n || static_cast<int>(col_factors.size()) != n) {
        throw PlanError("factor list lengths must equal n");
    }
    if (product(row_factors) != padded_rows || product(col_factors) != padded_cols) {
        throw PlanError("factor products do not match padded dimensions");
    }
    if (padded_rows < rows || padded_cols < cols) {
        throw PlanError("padded dimensions cannot be smaller than the originals");
    }
}

std::int64_t BondProfile::interior_max() const {
    std::int64_t best = 1;
    for (std::size_t k = 1; k + 1 < dims.size(); ++k) best = std::max(best, dims[k]);
    return best;
}

bool BondProfile::dominated_by(const BondProfile& other) const {
    if (dims.size() != other.dims.size()) return false;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (dims[k] > other.dims[k]) return false;
    }
    return true;
}

ShapePlan plan_shapes(std::int64_t rows, std::int64_t cols, int n,
                      const PlanOverrides& overrides) {
    if (rows < 1 || cols < 1) throw PlanError("matrix dimensions must be >= 1");
    if (n < 2) throw PlanError("n must be >= 2");

    ShapePlan plan;
    plan.n = n;
    plan.rows = rows;
    plan.cols = cols;

    if (overrides.row_factors) {
        plan.row_factors =
            validated_override(*overrides.row_factors, rows, n, "row", &plan.padded_rows);
    } else {
        plan.row_factors = balanced_factors(rows, n, &plan.padded_rows);
    }
    if (overrides.col_factors) {
        plan.col_factors =
            validated_override(*overrides.col_factors, cols, n, "column", &plan.padded_cols);
    } else {
        plan.col_factors = balanced_factors(cols, n, &plan.padded_cols);
    }

    auto has_unit = [](const std::vector<std::int64_t>& v) {
        return std::any_of(v.begin(), v.end(), [](std::int64_t f) { return f == 1; });
    };
    plan.unit_factor_warning = has_unit(plan.row_factors) || has_unit(plan.col_factors);
    plan.validate();
    return plan;
}

BondProfile full_bonds(const ShapePlan& plan) {
    plan.validate();
    const int n = plan.n;
    // Combined per-site extent a_k = i_k * j_k; products taken in 128-bit
    // to stay exact for large plans.
    unsigned __int128 total = 1;
    std::vector<unsigned __int128> site(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        site[k] = static_cast<unsigned __int128>(plan.row_factors[k]) *
                  static_cast<unsigned __int128>(plan.col_factors[k]);
        total *= site[k];
    }
    BondProfile bonds;
    bonds.dims.assign(static_cast<std::size_t>(n) + 1, 1);
    unsigned __int128 left = 1;
    for (int k = 1; k < n; ++k) {
        left *= site[k - 1];
        const unsigned __int128 right = total / left;
        bonds.dims[k] = static_cast<std::int64_t>(left < right ? left : right);
    }
    return bonds;
}

std::string format_factors(const std::vector<std::int64_t>& factors) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) os << ",";
        os << factors[i];
    }
    os << "]";
    return os.str();
}

}  // namespace mpo
