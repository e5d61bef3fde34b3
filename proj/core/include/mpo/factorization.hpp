#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mpo/shape_plan.hpp"
#include "mpo/svd.hpp"
#include "mpo/tensor.hpp"

namespace mpo {

/// A matrix factored into a chain of 4-way local tensors.
///
/// tensors[k] has shape [d_k, i_{k+1}, j_{k+1}, d_{k+1}] with
/// d_0 = d_n = 1. Immediately after decompose() every tensor except the
/// last has orthonormal columns in its left unfolding; training or
/// balance_scales() releases that property (the represented matrix is
/// unchanged by balancing).
struct MpoFactorization {
    ShapePlan plan;
    BondProfile bonds;
    std::vector<Tensor> tensors;
    /// Full singular-value list captured at each of the n-1 cuts during
    /// decomposition. Not persisted; recompute via unfolding_spectra.
    std::vector<std::vector<double>> cut_spectra;
    /// Index of the central tensor (0-based, n/2). The flanking tensors
    /// are the auxiliary tensors.
    int central_index = 0;

    std::int64_t parameter_count() const;
    void validate() const;
};

/// Truncation outcome: per-cut discarded mass and the derived bound
/// ||M - MPO(M)||_F <= sqrt(sum eps_k^2).
struct TruncationReport {
    std::vector<double> local_errors;       ///< eps_1..eps_{n-1}
    double bound = 0.0;                     ///< sqrt(sum eps_k^2)
    std::optional<double> achieved_error;   ///< exact error vs reference, when given
    double rho = 0.0;                       ///< compressed / dense parameter ratio
    std::int64_t params_before = 0;
    std::int64_t params_after = 0;
};

/// Sequential SVD decomposition at full bonds. The input matrix must
/// match [plan.rows, plan.cols]; zero padding to the padded dimensions
/// happens internally.
MpoFactorization decompose(const Tensor& matrix, const ShapePlan& plan);

/// Decomposition with per-cut rank caps; records each cut's discarded
/// Frobenius mass in local_errors when provided.
MpoFactorization decompose_capped(const Tensor& matrix, const ShapePlan& plan,
                                  const BondProfile& caps,
                                  std::vector<double>* local_errors = nullptr);

/// Contracts the chain back into the original [rows, cols] matrix
/// (padding cropped).
Tensor reconstruct(const MpoFactorization& f);

/// Like reconstruct but keeps the zero-padded [padded_rows, padded_cols]
/// matrix.
Tensor reconstruct_padded(const MpoFactorization& f);

/// Re-derives the chain from reconstruct(f) with rank caps at `target`
/// (which must be dominated by f.bonds). Stale factors are never sliced:
/// after fine-tuning they are no longer SVD factors, so the capped
/// decomposition is rerun to restore left-orthogonality and a valid
/// error bound. When `reference` is given the report also carries the
/// exact achieved error against it.
std::pair<MpoFactorization, TruncationReport> truncate(const MpoFactorization& f,
                                                       const BondProfile& target,
                                                       const Tensor* reference = nullptr);

/// sqrt of the discarded tail: sqrt(sum_{i >= kept} sigma_i^2).
/// `spectrum` must be sorted non-increasing, 0 <= kept <= len.
double local_truncation_error(std::span<const double> spectrum, std::int64_t kept);

/// sqrt(sum eps_k^2) over per-cut errors.
double error_bound(std::span<const double> local_errors);

struct CompressionStats {
    std::int64_t mpo_parameters = 0;    ///< sum_k d_{k-1} * i_k * j_k * d_k
    std::int64_t dense_parameters = 0;  ///< prod_k i_k * j_k
    double rho = 0.0;                   ///< mpo / dense; > 1 means expansion
};

CompressionStats compression_ratio(const ShapePlan& plan, const BondProfile& bonds);

enum class EntropyWeights {
    SquaredSingularValues,  ///< v_j = sigma_j^2 / sum sigma^2 (default)
    SingularValues,         ///< v_j = sigma_j / sum sigma
};

/// Shannon entropy of the normalized spectrum, 0*ln(0) := 0.
/// Bounded by ln(len); throws on an all-zero or negative spectrum.
double entanglement_entropy(std::span<const double> spectrum,
                            EntropyWeights weights = EntropyWeights::SquaredSingularValues);

/// Rescales every local tensor to a common Frobenius norm (the geometric
/// mean of the current norms) while preserving the represented matrix;
/// the residual rounding of the scale product is folded into the central
/// tensor. Balanced magnitudes condition gradient descent on the chain.
/// No-op for chains containing a zero or non-finite tensor.
MpoFactorization& balance_scales(MpoFactorization& f);

/// Singular values of each paired-index unfolding of the matrix, i.e.
/// the spectra truncation decisions are made against. Equivalent to
/// decompose(matrix, plan).cut_spectra.
std::vector<std::vector<double>> unfolding_spectra(const Tensor& matrix, const ShapePlan& plan);

/// Zero-pads a [rows, cols] matrix to the plan's padded dimensions and
/// reorders it into the 2n-way tensor with per-site paired (i_k, j_k)
/// axes. Exposed for the persistence and layer modules.
Tensor tensorize(const Tensor& matrix, const ShapePlan& plan);

}  // namespace mpo
