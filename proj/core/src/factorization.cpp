#include "mpo/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mpo {

namespace {

Tensor pad_matrix(const Tensor& m, std::int64_t rows, std::int64_t cols) {
    if (m.rows() == rows && m.cols() == cols) return m;
    Tensor out(Shape{rows, cols});
    const auto* src = m.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < m.rows(); ++r) {
        std::copy(src + r * m.cols(), src + (r + 1) * m.cols(), dst + r * cols);
    }
    return out;
}

Tensor crop_matrix(const Tensor& m, std::int64_t rows, std::int64_t cols) {
    if (m.rows() == rows && m.cols() == cols) return m;
    Tensor out(Shape{rows, cols});
    const auto* src = m.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < rows; ++r) {
        std::copy(src + r * m.cols(), src + r * m.cols() + cols, dst + r * cols);
    }
    return out;
}

// First `count` columns of a matrix.
Tensor take_columns(const Tensor& m, std::int64_t count) {
    const std::int64_t rows = m.rows(), cols = m.cols();
    if (count == cols) return m;
    Tensor out(Shape{rows, count});
    const auto* src = m.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < rows; ++r) {
        std::copy(src + r * cols, src + r * cols + count, dst + r * count);
    }
    return out;
}

// diag(sigma[0..count)) * vt[0..count), the residual passed to the next
// decomposition step.
Tensor scaled_rows(const std::vector<double>& sigma, const Tensor& vt, std::int64_t count) {
    const std::int64_t cols = vt.cols();
    Tensor out(Shape{count, cols});
    const auto* src = vt.data().data();
    auto* dst = out.data().data();
    for (std::int64_t r = 0; r < count; ++r) {
        const double s = sigma[static_cast<std::size_t>(r)];
        for (std::int64_t c = 0; c < cols; ++c) dst[r * cols + c] = s * src[r * cols + c];
    }
    return out;
}

}  // namespace

std::int64_t MpoFactorization::parameter_count() const {
    std::int64_t total = 0;
    for (const auto& t : tensors) total += t.size();
    return total;
}

void MpoFactorization::validate() const {
    plan.validate();
    const int n = plan.n;
    if (static_cast<int>(tensors.size()) != n) throw PlanError("factorization tensor count != n");
    if (static_cast<int>(bonds.dims.size()) != n + 1) throw PlanError("bond profile size != n+1");
    if (bonds.dims.front() != 1 || bonds.dims.back() != 1) {
        throw PlanError("boundary bonds must be 1");
    }
    for (int k = 0; k < n; ++k) {
        const Shape expect{bonds.dims[k], plan.row_factors[k], plan.col_factors[k],
                           bonds.dims[k + 1]};
        if (tensors[static_cast<std::size_t>(k)].shape() != expect) {
            throw PlanError("local tensor " + std::to_string(k) + " shape is inconsistent");
        }
    }
}

Tensor tensorize(const Tensor& matrix, const ShapePlan& plan) {
    plan.validate();
    if (!matrix.is_matrix() || matrix.rows() != plan.rows || matrix.cols() != plan.cols) {
        throw ShapeError("matrix does not match plan dimensions [" + std::to_string(plan.rows) +
                         "," + std::to_string(plan.cols) + "]");
    }
    const int n = plan.n;
    Tensor padded = pad_matrix(matrix, plan.padded_rows, plan.padded_cols);

    // [I, J] -> [i_1..i_n, j_1..j_n] -> interleaved [i_1, j_1, ..., i_n, j_n].
    Shape split;
    split.reserve(static_cast<std::size_t>(2 * n));
    for (auto f : plan.row_factors) split.push_back(f);
    for (auto f : plan.col_factors) split.push_back(f);
    Tensor t = reshape(std::move(padded), std::move(split));

    std::vector<std::size_t> interleave(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < n; ++k) {
        interleave[static_cast<std::size_t>(2 * k)] = static_cast<std::size_t>(k);
        interleave[static_cast<std::size_t>(2 * k + 1)] = static_cast<std::size_t>(n + k);
    }
    return permute(t, interleave);
}

MpoFactorization decompose_capped(const Tensor& matrix, const ShapePlan& plan,
                                  const BondProfile& caps, std::vector<double>* local_errors) {
    plan.validate();
    const int n = plan.n;
    if (static_cast<int>(caps.dims.size()) != n + 1) {
        throw PlanError("bond cap profile must have n+1 entries");
    }
    if (local_errors) local_errors->clear();

    MpoFactorization f;
    f.plan = plan;
    f.central_index = n / 2;
    f.bonds.dims.assign(static_cast<std::size_t>(n) + 1, 1);

    Tensor cur = reshape(tensorize(matrix, plan), Shape{1, plan.padded_rows * plan.padded_cols});
    std::int64_t d_prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        const std::int64_t ik = plan.row_factors[k];
        const std::int64_t jk = plan.col_factors[k];
        const std::int64_t lead = d_prev * ik * jk;
        cur = reshape(std::move(cur), Shape{lead, cur.size() / lead});

        SvdResult svd = svd_thin(cur);
        const std::int64_t available = static_cast<std::int64_t>(svd.sigma.size());
        const std::int64_t keep = std::min(caps.dims[static_cast<std::size_t>(k) + 1], available);
        if (keep < 1) throw PlanError("bond caps must be >= 1");

        if (local_errors) local_errors->push_back(local_truncation_error(svd.sigma, keep));
        f.cut_spectra.push_back(std::move(svd.sigma));

        f.tensors.push_back(reshape(take_columns(svd.u, keep), Shape{d_prev, ik, jk, keep}));
        cur = scaled_rows(f.cut_spectra.back(), svd.vt, keep);
        f.bonds.dims[static_cast<std::size_t>(k) + 1] = keep;
        d_prev = keep;
    }
    f.tensors.push_back(
        reshape(std::move(cur), Shape{d_prev, plan.row_factors[n - 1], plan.col_factors[n - 1], 1}));
    return f;
}

MpoFactorization decompose(const Tensor& matrix, const ShapePlan& plan) {
    return decompose_capped(matrix, plan, full_bonds(plan), nullptr);
}

Tensor reconstruct_padded(const MpoFactorization& f) {
    f.validate();
    const int n = f.plan.n;
    Tensor acc = f.tensors[0];
    for (int k = 1; k < n; ++k) {
        acc = contract(acc, f.tensors[static_cast<std::size_t>(k)], {acc.rank() - 1}, {0});
    }
    // acc: [1, i_1, j_1, ..., i_n, j_n, 1] -> [i_1..i_n, j_1..j_n] -> matrix.
    Shape paired;
    paired.reserve(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < n; ++k) {
        paired.push_back(f.plan.row_factors[k]);
        paired.push_back(f.plan.col_factors[k]);
    }
    acc = reshape(std::move(acc), std::move(paired));

    std::vector<std::size_t> split(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < n; ++k) {
        split[static_cast<std::size_t>(k)] = static_cast<std::size_t>(2 * k);
        split[static_cast<std::size_t>(n + k)] = static_cast<std::size_t>(2 * k + 1);
    }
    return reshape(permute(acc, split), Shape{f.plan.padded_rows, f.plan.padded_cols});
}

Tensor reconstruct(const MpoFactorization& f) {
    return crop_matrix(reconstruct_padded(f), f.plan.rows, f.plan.cols);
}

std::pair<MpoFactorization, TruncationReport> truncate(const MpoFactorization& f,
                                                       const BondProfile& target,
                                                       const Tensor* reference) {
    f.validate();
    if (static_cast<int>(target.dims.size()) != f.plan.n + 1 || !target.dominated_by(f.bonds)) {
        throw PlanError("target bond profile must be dominated by the current bonds");
    }
    for (auto d : target.dims) {
        if (d < 1) throw PlanError("target bonds must be >= 1");
    }

    const Tensor current = reconstruct(f);
    TruncationReport report;
    MpoFactorization g = decompose_capped(current, f.plan, target, &report.local_errors);
    report.bound = error_bound(report.local_errors);
    report.params_before = f.parameter_count();
    report.params_after = g.parameter_count();
    report.rho = compression_ratio(g.plan, g.bonds).rho;
    if (reference) {
        if (reference->shape() != current.shape()) {
            throw ShapeError("reference matrix shape does not match the factorization");
        }
        report.achieved_error = frobenius_distance(reconstruct(g), *reference);
    }
    return {std::move(g), std::move(report)};
}

double local_truncation_error(std::span<const double> spectrum, std::int64_t kept) {
    if (kept < 0) throw ShapeError("kept rank must be non-negative");
    if (kept > static_cast<std::int64_t>(spectrum.size())) {
        throw ShapeError("kept rank exceeds spectrum length");
    }
    return std::sqrt(sum_of_squares(spectrum.subspan(static_cast<std::size_t>(kept))));
}

double error_bound(std::span<const double> local_errors) {
    for (auto e : local_errors) {
        if (e < 0.0) throw ShapeError("local errors must be non-negative");
    }
    return std::sqrt(sum_of_squares(local_errors));
}

CompressionStats compression_ratio(const ShapePlan& plan, const BondProfile& bonds) {
    plan.validate();
    if (static_cast<int>(bonds.dims.size()) != plan.n + 1) {
        throw PlanError("bond profile size != n+1");
    }
    CompressionStats stats;
    stats.dense_parameters = plan.padded_rows * plan.padded_cols;
    for (int k = 0; k < plan.n; ++k) {
        stats.mpo_parameters += bonds.dims[static_cast<std::size_t>(k)] * plan.row_factors[k] *
                                plan.col_factors[k] * bonds.dims[static_cast<std::size_t>(k) + 1];
    }
    stats.rho = static_cast<double>(stats.mpo_parameters) /
                static_cast<double>(stats.dense_parameters);
    return stats;
}

double entanglement_entropy(std::span<const double> spectrum, EntropyWeights weights) {
    if (spectrum.empty()) throw ShapeError("entropy of an empty spectrum");
    double total = 0.0;
    for (auto s : spectrum) {
        if (s < 0.0) throw ShapeError("spectrum entries must be non-negative");
        total += weights == EntropyWeights::SquaredSingularValues ? s * s : s;
    }
    if (total == 0.0) throw ShapeError("entropy of an all-zero spectrum");
    double entropy = 0.0;
    for (auto s : spectrum) {
        const double w = (weights == EntropyWeights::SquaredSingularValues ? s * s : s) / total;
        if (w > 0.0) entropy -= w * std::log(w);
    }
    return entropy;
}

MpoFactorization& balance_scales(MpoFactorization& f) {
    const int n = f.plan.n;
    double log_sum = 0.0;
    std::vector<double> norms(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double nk = f.tensors[static_cast<std::size_t>(k)].frobenius_norm();
        if (nk == 0.0 || !std::isfinite(nk)) return f;  // degenerate chain, leave as-is
        norms[static_cast<std::size_t>(k)] = nk;
        log_sum += std::log(nk);
    }
    const double target = std::exp(log_sum / n);
    double scale_product = 1.0;
    for (int k = 0; k < n; ++k) {
        const double s = target / norms[static_cast<std::size_t>(k)];
        scale_product *= s;
        for (auto& v : f.tensors[static_cast<std::size_t>(k)].data()) v *= s;
    }
    // Fold the rounding residue of the scale product into the central
    // tensor so the represented matrix is preserved exactly.
    const double correction = 1.0 / scale_product;
    if (correction != 1.0) {
        for (auto& v : f.tensors[static_cast<std::size_t>(f.central_index)].data()) v *= correction;
    }
    return f;
}

std::vector<std::vector<double>> unfolding_spectra(const Tensor& matrix, const ShapePlan& plan) {
    return decompose(matrix, plan).cut_spectra;
}

}  // namespace mpo
