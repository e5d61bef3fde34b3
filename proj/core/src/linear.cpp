#include "mpo/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpo {

namespace {

Tensor pad_cols(const Tensor& x, std::int64_t new_cols) {
    if (x.cols() == new_cols) return x;
    Tensor out(Shape{x.rows(), new_cols});
    const auto* src = x.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < x.rows(); ++r) {
        std::copy(src + r * x.cols(), src + (r + 1) * x.cols(), dst + r * new_cols);
    }
    return out;
}

Tensor crop_cols(const Tensor& x, std::int64_t new_cols) {
    if (x.cols() == new_cols) return x;
    Tensor out(Shape{x.rows(), new_cols});
    const auto* src = x.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < x.rows(); ++r) {
        std::copy(src + r * x.cols(), src + r * x.cols() + new_cols, dst + r * new_cols);
    }
    return out;
}

// Shape of the running tensor before step k (0-based):
// [B, i_{k+1}, ..., i_n, j_1, ..., j_k, d_k].
Shape step_input_shape(const ShapePlan& plan, const BondProfile& bonds, std::int64_t batch,
                       int k) {
    Shape s;
    s.push_back(batch);
    for (int m = k; m < plan.n; ++m) s.push_back(plan.row_factors[m]);
    for (int m = 0; m < k; ++m) s.push_back(plan.col_factors[m]);
    s.push_back(bonds.dims[static_cast<std::size_t>(k)]);
    return s;
}

// One chain step: consumes (i_{k+1}, d_k), appends (j_{k+1}, d_{k+1}).
Tensor chain_step(const Tensor& cur, const Tensor& local) {
    return contract(cur, local, {1, cur.rank() - 1}, {1, 0});
}

void validate_batch(const MpoLinear& layer, const Tensor& x) {
    if (!x.is_matrix() || x.cols() != layer.in_dim()) {
        throw ShapeError("input batch must be [B, " + std::to_string(layer.in_dim()) + "]");
    }
}

}  // namespace

std::int64_t MpoLinear::parameter_count() const {
    return factorization.parameter_count() + bias.size();
}

std::int64_t MpoLinear::auxiliary_parameter_count() const {
    return factorization.parameter_count() - central_tensor().size();
}

MpoLinear from_dense(const Tensor& w, const Tensor& b, const ShapePlan& plan,
                     const BondProfile& bonds) {
    if (b.rank() != 1 || b.size() != plan.cols) {
        throw ShapeError("bias must be a vector of length " + std::to_string(plan.cols));
    }
    MpoLinear layer;
    layer.factorization = decompose_capped(w, plan, bonds, nullptr);
    balance_scales(layer.factorization);
    layer.bias = b;
    return layer;
}

Tensor forward(const MpoLinear& layer, const Tensor& x) {
    validate_batch(layer, x);
    const ShapePlan& plan = layer.factorization.plan;
    const std::int64_t batch = x.rows();

    Tensor cur = reshape(pad_cols(x, plan.padded_rows),
                         step_input_shape(plan, layer.factorization.bonds, batch, 0));
    for (const Tensor& local : layer.factorization.tensors) {
        cur = chain_step(cur, local);
    }
    Tensor y = crop_cols(reshape(std::move(cur), Shape{batch, plan.padded_cols}), plan.cols);
    auto* py = y.data().data();
    const auto* pb = layer.bias.data().data();
    for (std::int64_t r = 0; r < batch; ++r) {
        for (std::int64_t c = 0; c < plan.cols; ++c) py[r * plan.cols + c] += pb[c];
    }
    return y;
}

LayerGrads backward(const MpoLinear& layer, const Tensor& x, const Tensor& grad_out) {
    validate_batch(layer, x);
    const ShapePlan& plan = layer.factorization.plan;
    const int n = plan.n;
    const std::int64_t batch = x.rows();
    if (!grad_out.is_matrix() || grad_out.rows() != batch || grad_out.cols() != plan.cols) {
        throw ShapeError("grad_out must be [B, " + std::to_string(plan.cols) + "]");
    }

    // Forward intermediates: inputs[k] is the running tensor before step k.
    std::vector<Tensor> inputs;
    inputs.reserve(static_cast<std::size_t>(n));
    Tensor cur = reshape(pad_cols(x, plan.padded_rows),
                         step_input_shape(plan, layer.factorization.bonds, batch, 0));
    for (int k = 0; k < n; ++k) {
        inputs.push_back(cur);
        cur = chain_step(cur, layer.factorization.tensors[static_cast<std::size_t>(k)]);
    }

    LayerGrads grads;
    grads.tensor_grads.resize(static_cast<std::size_t>(n));
    grads.bias_grad = Tensor(Shape{plan.cols});
    {
        auto* pb = grads.bias_grad.data().data();
        const auto* pg = grad_out.data().data();
        for (std::int64_t r = 0; r < batch; ++r) {
            for (std::int64_t c = 0; c < plan.cols; ++c) pb[c] += pg[r * plan.cols + c];
        }
    }

    // Gradient flowing into the chain output [B, j_1..j_n, 1].
    Tensor g = reshape(pad_cols(grad_out, plan.padded_cols),
                       step_input_shape(plan, layer.factorization.bonds, batch, n));
    for (int k = n - 1; k >= 0; --k) {
        const Tensor& local = layer.factorization.tensors[static_cast<std::size_t>(k)];
        const Tensor& in = inputs[static_cast<std::size_t>(k)];
        const std::size_t un = static_cast<std::size_t>(n);

        // d/dT_k: contract the step input with g over batch and all
        // spectator axes; the leftovers [i, d_{k-1}] x [j, d_k] reorder
        // into the local tensor layout.
        std::vector<std::size_t> axes_in, axes_g;
        axes_in.push_back(0);
        axes_g.push_back(0);
        for (std::size_t a = 2; a <= un; ++a) axes_in.push_back(a);
        for (std::size_t a = 1; a < un; ++a) axes_g.push_back(a);
        Tensor dt = contract(in, g, axes_in, axes_g);
        grads.tensor_grads[static_cast<std::size_t>(k)] = permute(dt, {1, 0, 2, 3});

        // Gradient w.r.t. the step input: strip (j_{k+1}, d_{k+1}) off g
        // through the local tensor, then restore the axis order.
        Tensor gp = contract(g, local, {un, un + 1}, {2, 3});
        std::vector<std::size_t> perm(static_cast<std::size_t>(g.rank()));
        perm[0] = 0;
        perm[1] = un + 1;
        for (std::size_t a = 2; a <= un; ++a) perm[a] = a - 1;
        perm[un + 1] = un;
        g = permute(gp, perm);
    }
    grads.input_grad = crop_cols(reshape(std::move(g), Shape{batch, plan.padded_rows}), plan.rows);

    if (layer.freeze_central) {
        Tensor& central = grads.tensor_grads[static_cast<std::size_t>(layer.factorization.central_index)];
        central = Tensor(central.shape());
    }
    return grads;
}

std::pair<Tensor, Tensor> to_dense(const MpoLinear& layer) {
    return {reconstruct(layer.factorization), layer.bias};
}

void apply_gradient_step(MpoLinear& layer, const LayerGrads& grads, double lr) {
    const int n = layer.factorization.plan.n;
    if (static_cast<int>(grads.tensor_grads.size()) != n ||
        grads.bias_grad.shape() != layer.bias.shape()) {
        throw ShapeError("gradient shapes do not match the layer");
    }
    for (int k = 0; k < n; ++k) {
        if (layer.freeze_central && k == layer.factorization.central_index) continue;
        Tensor& t = layer.factorization.tensors[static_cast<std::size_t>(k)];
        const Tensor& gk = grads.tensor_grads[static_cast<std::size_t>(k)];
        if (gk.shape() != t.shape()) throw ShapeError("gradient tensor shape mismatch");
        auto* pt = t.data().data();
        const auto* pg = gk.data().data();
        for (std::int64_t i = 0; i < t.size(); ++i) pt[i] -= lr * pg[i];
    }
    auto* pb = layer.bias.data().data();
    const auto* pg = grads.bias_grad.data().data();
    for (std::int64_t i = 0; i < layer.bias.size(); ++i) pb[i] -= lr * pg[i];
    layer.spectra_stale = true;
}

std::int64_t mpo_forward_flops(const ShapePlan& plan, const BondProfile& bonds,
                               std::int64_t batch) {
    plan.validate();
    if (static_cast<int>(bonds.dims.size()) != plan.n + 1) {
        throw PlanError("bond profile size != n+1");
    }
    std::int64_t pair_cost = 0;
    for (int k = 0; k + 1 < plan.n; ++k) {
        pair_cost += bonds.dims[static_cast<std::size_t>(k)] * plan.row_factors[k] *
                     plan.col_factors[k] * bonds.dims[static_cast<std::size_t>(k) + 1] *
                     plan.row_factors[k + 1] * plan.col_factors[k + 1] *
                     bonds.dims[static_cast<std::size_t>(k) + 2];
    }
    return 2 * batch * pair_cost;
}

std::int64_t dense_forward_flops(const ShapePlan& plan, std::int64_t batch) {
    return 2 * plan.rows * plan.cols * batch;
}

std::vector<double> GroupVariation::fractions() const {
    std::vector<double> out;
    const double denom = total > 0 ? static_cast<double>(total) : 1.0;
    out.push_back(static_cast<double>(unchanged) / denom);
    for (auto c : bin_counts) out.push_back(static_cast<double>(c) / denom);
    return out;
}

VariationHistogram variation_histogram(const MpoLinear& before, const MpoLinear& after,
                                       std::span<const double> edges) {
    static const std::vector<double> kDefaultEdges = {1e-4, 1e-3};
    VariationHistogram hist;
    hist.edges.assign(edges.empty() ? kDefaultEdges.begin() : edges.begin(),
                      edges.empty() ? kDefaultEdges.end() : edges.end());
    if (!std::is_sorted(hist.edges.begin(), hist.edges.end())) {
        throw ShapeError("histogram edges must be sorted ascending");
    }
    const std::size_t nbins = hist.edges.size() + 1;
    hist.central.bin_counts.assign(nbins, 0);
    hist.auxiliary.bin_counts.assign(nbins, 0);
    hist.bias.bin_counts.assign(nbins, 0);

    auto tally = [&](GroupVariation& group, const Tensor& a, const Tensor& b) {
        if (a.shape() != b.shape()) throw ShapeError("variation_histogram: shape mismatch");
        const auto* pa = a.data().data();
        const auto* pb = b.data().data();
        for (std::int64_t i = 0; i < a.size(); ++i) {
            const double delta = std::abs(pb[i] - pa[i]);
            ++group.total;
            if (delta == 0.0) {
                ++group.unchanged;
                continue;
            }
            std::size_t bin = 0;
            while (bin < hist.edges.size() && delta > hist.edges[bin]) ++bin;
            ++group.bin_counts[bin];
        }
    };

    const int n = before.factorization.plan.n;
    if (after.factorization.plan.n != n) throw ShapeError("variation_histogram: layer n mismatch");
    for (int k = 0; k < n; ++k) {
        const bool is_central = k == before.factorization.central_index;
        tally(is_central ? hist.central : hist.auxiliary,
              before.factorization.tensors[static_cast<std::size_t>(k)],
              after.factorization.tensors[static_cast<std::size_t>(k)]);
    }
    tally(hist.bias, before.bias, after.bias);
    return hist;
}

}  // namespace mpo
