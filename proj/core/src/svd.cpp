#include "mpo/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpo/errors.hpp"

namespace mpo {

namespace {

// Column-major working storage: col(j) is contiguous at a[j * m].
struct Jacobi {
    std::int64_t m, n;
    std::vector<double> a;  // m x n
    std::vector<double> v;  // n x n, accumulated rotations

    double* col(std::vector<double>& buf, std::int64_t j, std::int64_t lead) {
        return buf.data() + j * lead;
    }

    static double dot(const double* x, const double* y, std::int64_t len) {
        double s = 0.0;
        for (std::int64_t i = 0; i < len; ++i) s += x[i] * y[i];
        return s;
    }

    static void rotate(double* x, double* y, std::int64_t len, double c, double s) {
        for (std::int64_t i = 0; i < len; ++i) {
            const double xi = x[i];
            const double yi = y[i];
            x[i] = c * xi - s * yi;
            y[i] = s * xi + c * yi;
        }
    }

    // Orthogonalizes the columns of `a` by cyclic plane rotations.
    // Returns false if the sweep cap is hit before convergence.
    bool run(std::int64_t max_sweeps) {
        constexpr double tol = 1e-15;
        std::vector<double> sq(n);
        for (std::int64_t j = 0; j < n; ++j) {
            const double* cj = a.data() + j * m;
            sq[j] = dot(cj, cj, m);
        }
        for (std::int64_t sweep = 0; sweep < max_sweeps; ++sweep) {
            bool converged = true;
            for (std::int64_t p = 0; p < n - 1; ++p) {
                for (std::int64_t q = p + 1; q < n; ++q) {
                    double* ap = a.data() + p * m;
                    double* aq = a.data() + q * m;
                    const double alpha = sq[p];
                    const double beta = sq[q];
                    if (alpha == 0.0 || beta == 0.0) continue;
                    const double gamma = dot(ap, aq, m);
                    if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                    converged = false;
                    const double zeta = (beta - alpha) / (2.0 * gamma);
                    const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = c * t;
                    rotate(ap, aq, m, c, s);
                    rotate(v.data() + p * n, v.data() + q * n, n, c, s);
                    // Exact norm updates under the applied rotation.
                    sq[p] = c * c * alpha - 2.0 * c * s * gamma + s * s * beta;
                    sq[q] = s * s * alpha + 2.0 * c * s * gamma + c * c * beta;
                }
            }
            if (converged) return true;
            if (sweep + 1 == max_sweeps) break;
            // Refresh norms once per sweep against incremental drift.
            for (std::int64_t j = 0; j < n; ++j) {
                const double* cj = a.data() + j * m;
                sq[j] = dot(cj, cj, m);
            }
        }
        return false;
    }
};

// Fills zero columns of u (column-major, m x n) with vectors orthonormal
// to all other columns, chosen deterministically from the standard basis.
void complete_basis(std::vector<double>& u, std::int64_t m, std::int64_t n,
                    const std::vector<bool>& needs_fill) {
    std::vector<double> work(m);
    for (std::int64_t j = 0; j < n; ++j) {
        if (!needs_fill[static_cast<std::size_t>(j)]) continue;
        bool placed = false;
        for (std::int64_t k = 0; k < m && !placed; ++k) {
            std::fill(work.begin(), work.end(), 0.0);
            work[k] = 1.0;
            for (int pass = 0; pass < 2; ++pass) {
                for (std::int64_t c = 0; c < n; ++c) {
                    if (c == j || (needs_fill[static_cast<std::size_t>(c)] && c > j)) continue;
                    const double* uc = u.data() + c * m;
                    const double proj = Jacobi::dot(work.data(), uc, m);
                    for (std::int64_t i = 0; i < m; ++i) work[i] -= proj * uc[i];
                }
            }
            const double norm = std::sqrt(Jacobi::dot(work.data(), work.data(), m));
            if (norm > 0.5) {
                double* uj = u.data() + j * m;
                for (std::int64_t i = 0; i < m; ++i) uj[i] = work[i] / norm;
                placed = true;
            }
        }
        if (!placed) throw SvdError("svd_thin: basis completion failed");
    }
}

}  // namespace

SvdResult svd_thin(const Tensor& input) {
    if (!input.is_matrix()) throw ShapeError("svd_thin requires a rank-2 tensor");
    const std::int64_t r = input.rows();
    const std::int64_t c = input.cols();
    const bool transposed = r < c;
    const std::int64_t m = transposed ? c : r;  // working rows
    const std::int64_t n = transposed ? r : c;  // working cols, n <= m

    Jacobi jac;
    jac.m = m;
    jac.n = n;
    jac.a.resize(static_cast<std::size_t>(m * n));
    jac.v.assign(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t j = 0; j < n; ++j) jac.v[j * n + j] = 1.0;

    const auto* src = input.data().data();
    for (std::int64_t j = 0; j < n; ++j) {
        double* colj = jac.a.data() + j * m;
        for (std::int64_t i = 0; i < m; ++i) {
            colj[i] = transposed ? src[j * c + i] : src[i * c + j];
        }
    }

    if (!jac.run(100 * n)) {
        throw SvdError("svd_thin: Jacobi sweeps did not converge within 100*min(r,c) iterations");
    }

    std::vector<double> sigma(n);
    for (std::int64_t j = 0; j < n; ++j) {
        const double* colj = jac.a.data() + j * m;
        sigma[j] = std::sqrt(Jacobi::dot(colj, colj, m));
    }
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t x, std::int64_t y) { return sigma[x] > sigma[y]; });

    // Normalized left vectors in sorted order; zero columns completed below.
    std::vector<double> uw(static_cast<std::size_t>(m * n));
    std::vector<double> vw(static_cast<std::size_t>(n * n));
    std::vector<double> sorted_sigma(n);
    std::vector<bool> needs_fill(static_cast<std::size_t>(n), false);
    for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t s = order[j];
        sorted_sigma[j] = sigma[s];
        const double* asrc = jac.a.data() + s * m;
        double* udst = uw.data() + j * m;
        if (sigma[s] == 0.0) {
            needs_fill[static_cast<std::size_t>(j)] = true;
        } else {
            for (std::int64_t i = 0; i < m; ++i) udst[i] = asrc[i] / sigma[s];
        }
        const double* vsrc = jac.v.data() + s * n;
        double* vdst = vw.data() + j * n;
        for (std::int64_t i = 0; i < n; ++i) vdst[i] = vsrc[i];
    }
    complete_basis(uw, m, n, needs_fill);

    // Assemble in the orientation of the original input. For a transposed
    // run the roles swap: input = V * diag(sigma) * U^T.
    Tensor u(Shape{r, n});
    Tensor vt(Shape{n, c});
    auto* pu = u.data().data();
    auto* pvt = vt.data().data();
    if (!transposed) {
        for (std::int64_t i = 0; i < r; ++i)
            for (std::int64_t j = 0; j < n; ++j) pu[i * n + j] = uw[j * m + i];
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t i = 0; i < c; ++i) pvt[j * c + i] = vw[j * n + i];
    } else {
        for (std::int64_t i = 0; i < r; ++i)
            for (std::int64_t j = 0; j < n; ++j) pu[i * n + j] = vw[j * n + i];
        for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t i = 0; i < c; ++i) pvt[j * c + i] = uw[j * m + i];
    }

    // Sign convention: largest-magnitude entry of each left vector positive.
    for (std::int64_t j = 0; j < n; ++j) {
        std::int64_t arg = 0;
        double best = -1.0;
        for (std::int64_t i = 0; i < r; ++i) {
            const double mag = std::abs(pu[i * n + j]);
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (pu[arg * n + j] < 0.0) {
            for (std::int64_t i = 0; i < r; ++i) pu[i * n + j] = -pu[i * n + j];
            for (std::int64_t i = 0; i < c; ++i) pvt[j * c + i] = -pvt[j * c + i];
        }
    }

    return SvdResult{std::move(u), std::move(sorted_sigma), std::move(vt)};
}

}  // namespace mpo
