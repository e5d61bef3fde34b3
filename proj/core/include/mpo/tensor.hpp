#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mpo/errors.hpp"

namespace mpo {

using Shape = std::vector<std::int64_t>;

/// Dense multi-dimensional array of doubles, row-major.
///
/// Value semantics throughout: operations return new tensors and never
/// alias their inputs, so tensors are safe to share across threads.
/// The shape is always non-empty and every extent is >= 1; a scalar is
/// represented as shape {1}.
class Tensor {
public:
    /// Scalar zero (shape {1}).
    Tensor();

    /// Zero-filled tensor of the given shape.
    explicit Tensor(Shape shape);

    /// Tensor over existing data; data.size() must equal product(shape).
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }

    /// n-by-n identity matrix.
    static Tensor identity(std::int64_t n);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::int64_t extent(std::size_t axis) const;
    std::int64_t size() const noexcept { return static_cast<std::int64_t>(data_.size()); }

    bool is_matrix() const noexcept { return shape_.size() == 2; }
    std::int64_t rows() const;  ///< first extent (matrices only)
    std::int64_t cols() const;  ///< second extent (matrices only)

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double operator[](std::int64_t flat) const { return data_[static_cast<std::size_t>(flat)]; }
    double& operator[](std::int64_t flat) { return data_[static_cast<std::size_t>(flat)]; }

    /// Checked multi-index access.
    double at(std::span<const std::int64_t> index) const;
    double& at(std::span<const std::int64_t> index);
    double at(std::initializer_list<std::int64_t> index) const;

    double frobenius_norm() const;

    /// Releases the flat buffer (used by move-aware reshape).
    std::vector<double> take_data() && { return std::move(data_); }

private:
    Shape shape_;
    std::vector<double> data_;
};

std::int64_t shape_product(std::span<const std::int64_t> shape);

/// Row-major strides for a shape.
std::vector<std::int64_t> row_major_strides(std::span<const std::int64_t> shape);

/// Same data, new shape; products must match.
Tensor reshape(const Tensor& t, Shape new_shape);
Tensor reshape(Tensor&& t, Shape new_shape);

/// Physically reorders data so out.shape[p] == t.shape[perm[p]].
Tensor permute(const Tensor& t, std::span<const std::size_t> perm);
Tensor permute(const Tensor& t, std::initializer_list<std::size_t> perm);

/// Unfolds a tensor into a matrix, grouping the first `split` axes into
/// rows and the remaining axes into columns (row-major on both sides).
Tensor matricize(const Tensor& t, std::size_t split);

/// General contraction over the paired axes; result carries a's free
/// axes (in order) followed by b's free axes. A full contraction yields
/// a scalar of shape {1}.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::size_t> axes_a,
                std::span<const std::size_t> axes_b);
Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<std::size_t> axes_a,
                std::initializer_list<std::size_t> axes_b);

/// Plain matrix product of two rank-2 tensors.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& m);

/// a + b (shapes must match). Element-wise helpers used by the layers.
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& t, double factor);

/// Deterministic pairwise summation (stable reduction order).
double pairwise_sum(std::span<const double> values);
double sum_of_squares(std::span<const double> values);

double frobenius_distance(const Tensor& a, const Tensor& b);
double relative_frobenius_error(const Tensor& approx, const Tensor& reference);

}  // namespace mpo
