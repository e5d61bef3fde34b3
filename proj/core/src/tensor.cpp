#include "mpo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace mpo {

namespace {

std::string shape_to_string(std::span<const std::int64_t> shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

void validate_shape(const Shape& shape) {
    if (shape.empty()) throw ShapeError("tensor shape must be non-empty");
    for (auto e : shape) {
        if (e < 1) throw ShapeError("tensor extents must be >= 1, got " + shape_to_string(shape));
    }
}

}  // namespace

std::int64_t shape_product(std::span<const std::int64_t> shape) {
    std::int64_t p = 1;
    for (auto e : shape) p *= e;
    return p;
}

std::vector<std::int64_t> row_major_strides(std::span<const std::int64_t> shape) {
    std::vector<std::int64_t> strides(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * shape[i];
    }
    return strides;
}

Tensor::Tensor() : shape_{1}, data_(1, 0.0) {}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(static_cast<std::size_t>(shape_product(shape_)), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    if (static_cast<std::int64_t>(data_.size()) != shape_product(shape_)) {
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::identity(std::int64_t n) {
    if (n < 1) throw ShapeError("identity extent must be >= 1");
    Tensor t(Shape{n, n});
    for (std::int64_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
    return t;
}

std::int64_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) throw ShapeError("axis out of range");
    return shape_[axis];
}

std::int64_t Tensor::rows() const {
    if (!is_matrix()) throw ShapeError("rows() requires a rank-2 tensor");
    return shape_[0];
}

std::int64_t Tensor::cols() const {
    if (!is_matrix()) throw ShapeError("cols() requires a rank-2 tensor");
    return shape_[1];
}

double Tensor::at(std::span<const std::int64_t> index) const {
    return const_cast<Tensor*>(this)->at(index);
}

double& Tensor::at(std::span<const std::int64_t> index) {
    if (index.size() != shape_.size()) throw ShapeError("index rank mismatch");
    std::int64_t flat = 0;
    std::int64_t stride = 1;
    for (std::size_t i = shape_.size(); i-- > 0;) {
        if (index[i] < 0 || index[i] >= shape_[i]) throw ShapeError("index out of range");
        flat += index[i] * stride;
        stride *= shape_[i];
    }
    return data_[static_cast<std::size_t>(flat)];
}

double Tensor::at(std::initializer_list<std::int64_t> index) const {
    std::vector<std::int64_t> idx(index);
    return at(std::span<const std::int64_t>(idx));
}

double Tensor::frobenius_norm() const {
    return std::sqrt(sum_of_squares(data_));
}

Tensor reshape(const Tensor& t, Shape new_shape) {
    if (shape_product(new_shape) != t.size()) {
        throw ShapeError("reshape: element count mismatch (" + std::to_string(t.size()) +
                         " vs " + std::to_string(shape_product(new_shape)) + ")");
    }
    return Tensor(std::move(new_shape), std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor reshape(Tensor&& t, Shape new_shape) {
    if (shape_product(new_shape) != t.size()) {
        throw ShapeError("reshape: element count mismatch (" + std::to_string(t.size()) +
                         " vs " + std::to_string(shape_product(new_shape)) + ")");
    }
    return Tensor(std::move(new_shape), std::move(t).take_data());
}

Tensor permute(const Tensor& t, std::span<const std::size_t> perm) {
    const std::size_t r = t.rank();
    if (perm.size() != r) throw ShapeError("permute: permutation rank mismatch");
    std::vector<bool> seen(r, false);
    for (auto p : perm) {
        if (p >= r || seen[p]) throw ShapeError("permute: invalid permutation");
        seen[p] = true;
    }

    Shape out_shape(r);
    for (std::size_t i = 0; i < r; ++i) out_shape[i] = t.shape()[perm[i]];

    const auto in_strides = row_major_strides(t.shape());
    // Stride of output axis i in the input buffer.
    std::vector<std::int64_t> gather(r);
    for (std::size_t i = 0; i < r; ++i) gather[i] = in_strides[perm[i]];

    Tensor out(out_shape);
    std::vector<std::int64_t> counter(r, 0);
    const std::int64_t total = out.size();
    std::int64_t src = 0;
    auto* dst = out.data().data();
    const auto* in = t.data().data();
    for (std::int64_t flat = 0; flat < total; ++flat) {
        dst[flat] = in[src];
        // Odometer increment over the output multi-index.
        for (std::size_t axis = r; axis-- > 0;) {
            src += gather[axis];
            if (++counter[axis] < out_shape[axis]) break;
            src -= gather[axis] * out_shape[axis];
            counter[axis] = 0;
        }
    }
    return out;
}

Tensor permute(const Tensor& t, std::initializer_list<std::size_t> perm) {
    std::vector<std::size_t> p(perm);
    return permute(t, std::span<const std::size_t>(p));
}

Tensor matricize(const Tensor& t, std::size_t split) {
    if (split < 1 || split >= t.rank()) {
        throw ShapeError("matricize: split must satisfy 1 <= split < rank");
    }
    std::int64_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < t.rank(); ++i) {
        (i < split ? rows : cols) *= t.shape()[i];
    }
    return reshape(t, Shape{rows, cols});
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (!a.is_matrix() || !b.is_matrix()) throw ShapeError("matmul requires matrices");
    const std::int64_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw ShapeError("matmul: inner extents differ (" + std::to_string(k) + " vs " +
                         std::to_string(b.rows()) + ")");
    }
    Tensor c(Shape{m, n});
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    double* pc = c.data().data();
    for (std::int64_t i = 0; i < m; ++i) {
        double* crow = pc + i * n;
        const double* arow = pa + i * k;
        for (std::int64_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            const double* brow = pb + kk * n;
            for (std::int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Tensor transpose(const Tensor& m) {
    if (!m.is_matrix()) throw ShapeError("transpose requires a matrix");
    return permute(m, {1, 0});
}

namespace {

bool is_identity_perm(std::span<const std::size_t> perm) {
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (perm[i] != i) return false;
    }
    return true;
}

}  // namespace

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::size_t> axes_a,
                std::span<const std::size_t> axes_b) {
    if (axes_a.size() != axes_b.size()) throw ShapeError("contract: axis list sizes differ");
    const std::size_t ra = a.rank(), rb = b.rank();
    std::vector<bool> used_a(ra, false), used_b(rb, false);
    for (std::size_t i = 0; i < axes_a.size(); ++i) {
        const std::size_t pa = axes_a[i], pb = axes_b[i];
        if (pa >= ra || pb >= rb) throw ShapeError("contract: axis out of range");
        if (used_a[pa] || used_b[pb]) throw ShapeError("contract: repeated axis");
        used_a[pa] = used_b[pb] = true;
        if (a.shape()[pa] != b.shape()[pb]) {
            throw ShapeError("contract: extent mismatch on axes " + std::to_string(pa) + "/" +
                             std::to_string(pb));
        }
    }

    std::vector<std::size_t> perm_a, perm_b;
    Shape out_shape;
    std::int64_t m = 1, k = 1, n = 1;
    for (std::size_t i = 0; i < ra; ++i) {
        if (!used_a[i]) {
            perm_a.push_back(i);
            out_shape.push_back(a.shape()[i]);
            m *= a.shape()[i];
        }
    }
    for (auto p : axes_a) {
        perm_a.push_back(p);
        k *= a.shape()[p];
    }
    for (auto p : axes_b) perm_b.push_back(p);
    for (std::size_t i = 0; i < rb; ++i) {
        if (!used_b[i]) {
            perm_b.push_back(i);
            out_shape.push_back(b.shape()[i]);
            n *= b.shape()[i];
        }
    }
    if (out_shape.empty()) out_shape.push_back(1);  // full contraction -> scalar

    Tensor lhs = is_identity_perm(perm_a) ? reshape(a, Shape{m, k})
                                          : reshape(permute(a, perm_a), Shape{m, k});
    Tensor rhs = is_identity_perm(perm_b) ? reshape(b, Shape{k, n})
                                          : reshape(permute(b, perm_b), Shape{k, n});
    return reshape(matmul(lhs, rhs), std::move(out_shape));
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<std::size_t> axes_a,
                std::initializer_list<std::size_t> axes_b) {
    std::vector<std::size_t> aa(axes_a), bb(axes_b);
    return contract(a, b, std::span<const std::size_t>(aa), std::span<const std::size_t>(bb));
}

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("add: shape mismatch");
    Tensor out = a;
    auto* o = out.data().data();
    const auto* p = b.data().data();
    for (std::int64_t i = 0; i < out.size(); ++i) o[i] += p[i];
    return out;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("subtract: shape mismatch");
    Tensor out = a;
    auto* o = out.data().data();
    const auto* p = b.data().data();
    for (std::int64_t i = 0; i < out.size(); ++i) o[i] -= p[i];
    return out;
}

Tensor scale(const Tensor& t, double factor) {
    Tensor out = t;
    for (auto& v : out.data()) v *= factor;
    return out;
}

namespace {

template <typename F>
double pairwise_reduce(const double* v, std::size_t n, F&& term) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += term(v[i]);
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_reduce(v, half, term) + pairwise_reduce(v + half, n - half, term);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return pairwise_reduce(values.data(), values.size(), [](double x) { return x; });
}

double sum_of_squares(std::span<const double> values) {
    return pairwise_reduce(values.data(), values.size(), [](double x) { return x * x; });
}

double frobenius_distance(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) throw ShapeError("frobenius_distance: shape mismatch");
    const auto* pa = a.data().data();
    const auto* pb = b.data().data();
    const std::size_t n = a.data().size();
    // Pairwise over differences, same reduction order as sum_of_squares.
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = pa[i] - pb[i];
    return std::sqrt(sum_of_squares(diff));
}

double relative_frobenius_error(const Tensor& approx, const Tensor& reference) {
    const double denom = reference.frobenius_norm();
    const double dist = frobenius_distance(approx, reference);
    if (denom == 0.0) return dist == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return dist / denom;
}

}  // namespace mpo
