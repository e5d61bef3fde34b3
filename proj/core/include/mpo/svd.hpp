#pragma once

#include <vector>

#include "mpo/tensor.hpp"

namespace mpo {

/// Thin SVD of a matrix: input [r, c] factors as u * diag(sigma) * vt
/// with k = min(r, c) singular triplets.
struct SvdResult {
    Tensor u;                   ///< [r, k], orthonormal columns
    std::vector<double> sigma;  ///< k values, non-increasing, >= 0
    Tensor vt;                  ///< [k, c], orthonormal rows
};

/// Deterministic thin SVD (one-sided Jacobi).
///
/// Sign convention: in each left singular vector the entry of largest
/// absolute value is positive (ties broken by lowest index), with the
/// compensating sign absorbed into vt. Identical input therefore always
/// produces bit-identical output. Throws SvdError if the sweep count
/// exceeds 100 * min(r, c).
SvdResult svd_thin(const Tensor& m);

}  // namespace mpo
