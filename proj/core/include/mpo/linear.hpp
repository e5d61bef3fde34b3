#pragma once

#include <span>
#include <vector>

#include "mpo/factorization.hpp"

namespace mpo {

/// Affine layer y = x * W + b with W held in factored form; the dense W
/// is never materialized on the forward path. Input dim = plan.rows,
/// output dim = plan.cols, bias length = plan.cols.
///
/// Layers are immutable during forward/backward; mutation happens only
/// through apply_gradient_step, owned by a single trainer at a time.
struct MpoLinear {
    MpoFactorization factorization;
    Tensor bias;  ///< [out_dim]
    /// When set, gradient steps never touch the central tensor (its
    /// gradient slot is zeroed after computation, not omitted).
    bool freeze_central = false;
    /// Cached cut spectra are only valid until a parameter update; the
    /// squeeze loop recomputes them lazily when this is set.
    bool spectra_stale = false;

    std::int64_t in_dim() const { return factorization.plan.rows; }
    std::int64_t out_dim() const { return factorization.plan.cols; }
    const Tensor& central_tensor() const {
        return factorization.tensors[static_cast<std::size_t>(factorization.central_index)];
    }

    std::int64_t parameter_count() const;            ///< tensors + bias
    std::int64_t auxiliary_parameter_count() const;  ///< all tensors except the central one
};

/// Decomposes w under the plan with bond caps and attaches the bias
/// verbatim; tensor norms are balanced for later gradient descent.
MpoLinear from_dense(const Tensor& w, const Tensor& b, const ShapePlan& plan,
                     const BondProfile& bonds);

/// Batched forward pass: x [B, in_dim] -> [B, out_dim]. Zero-pads the
/// input when the plan padded its row dimension and crops padded
/// outputs, contracting strictly left-to-right through the chain.
Tensor forward(const MpoLinear& layer, const Tensor& x);

struct LayerGrads {
    std::vector<Tensor> tensor_grads;  ///< same shapes as the local tensors
    Tensor bias_grad;                  ///< [out_dim]
    Tensor input_grad;                 ///< [B, in_dim]
};

/// Gradients of sum(forward(x) .* grad_out) w.r.t. every local tensor,
/// the bias and the input. With freeze_central set the central slot is
/// zeroed after computation.
LayerGrads backward(const MpoLinear& layer, const Tensor& x, const Tensor& grad_out);

/// Dense view (reconstructed weight, bias copy); diagnostic inverse of
/// from_dense.
std::pair<Tensor, Tensor> to_dense(const MpoLinear& layer);

/// SGD primitive: p -= lr * g on every unfrozen parameter. Marks the
/// cut-spectra cache stale.
void apply_gradient_step(MpoLinear& layer, const LayerGrads& grads, double lr);

/// Analytic multiply-add count of the chain contraction for one batch,
/// modeled as the n-1 pairwise contractions between adjacent local
/// tensors (counted from shapes, not instrumented). Cubic in the bond
/// dimensions, which is what makes bond growth expensive at inference.
std::int64_t mpo_forward_flops(const ShapePlan& plan, const BondProfile& bonds,
                               std::int64_t batch);

/// Dense mat-mul baseline: 2 * rows * cols * batch.
std::int64_t dense_forward_flops(const ShapePlan& plan, std::int64_t batch);

/// Histogram of |after - before| per parameter group. Exact zeros are
/// reported separately from the binned mass; default bin edges are
/// {1e-4, 1e-3}, i.e. bins (0,1e-4], (1e-4,1e-3], (1e-3,inf).
struct GroupVariation {
    std::int64_t unchanged = 0;
    std::vector<std::int64_t> bin_counts;
    std::int64_t total = 0;

    std::vector<double> fractions() const;  ///< unchanged first, then bins
};

struct VariationHistogram {
    std::vector<double> edges;
    GroupVariation central;
    GroupVariation auxiliary;
    GroupVariation bias;
};

VariationHistogram variation_histogram(const MpoLinear& before, const MpoLinear& after,
                                       std::span<const double> edges = {});

}  // namespace mpo
