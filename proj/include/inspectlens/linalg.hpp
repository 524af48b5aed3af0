#pragma once

// Dense least squares for the small, tall systems produced by the regression
// module: Householder QR with column pivoting, plus singular values of the
// triangular factor for the 2-norm condition number.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace inspectlens::linalg {

/// Row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
    assert(x.size() == a.cols());
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

/// Computes A^T v.
inline std::vector<double> multiply_transposed(const Matrix& a, std::span<const double> v) {
    assert(v.size() == a.rows());
    std::vector<double> out(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * v[i];
    }
    return out;
}

inline double norm2(std::span<const double> v) {
    // Scaled accumulation so large or tiny entries do not over/underflow.
    double scale = 0.0;
    double ssq = 1.0;
    for (double x : v) {
        if (x == 0.0) continue;
        const double ax = std::fabs(x);
        if (scale < ax) {
            ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
            scale = ax;
        } else {
            ssq += (ax / scale) * (ax / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

inline double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (double x : a.row(i)) sum += x * x;
    }
    return std::sqrt(sum);
}

/// Singular values of a small square matrix by one-sided Jacobi rotations,
/// sorted descending.
inline std::vector<double> singular_values(Matrix a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += a(i, p) * a(i, p);
                    beta += a(i, q) * a(i, q);
                    gamma += a(i, p) * a(i, q);
                }
                if (gamma == 0.0) continue;
                const double denom = std::sqrt(alpha * beta);
                if (denom == 0.0) continue;
                off = std::max(off, std::fabs(gamma) / denom);
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double ap = a(i, p);
                    const double aq = a(i, q);
                    a(i, p) = c * ap - s * aq;
                    a(i, q) = s * ap + c * aq;
                }
            }
        }
        if (off < 1e-15) break;
    }
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += a(i, j) * a(i, j);
        sv[j] = std::sqrt(sum);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

struct PivotedQr {
    Matrix r;                        // cols x cols upper triangle of the factor
    std::vector<std::size_t> perm;   // perm[k] = original column placed at position k
    std::vector<double> qty;         // first cols entries of Q^T y
    std::size_t rank = 0;
};

/// Householder QR of `a` (rows >= cols) with column pivoting, applied to `y`
/// on the fly. Factorization stops at the first pivot whose magnitude falls
/// below `rank_tol` times the leading pivot; `rank` reports where it stopped.
inline PivotedQr pivoted_qr(Matrix a, std::vector<double> y, double rank_tol) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    assert(m >= n && y.size() == m);

    PivotedQr out;
    out.perm.resize(n);
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});

    double lead = 0.0;
    std::vector<double> col(m);
    for (std::size_t k = 0; k < n; ++k) {
        // Exact trailing column norms; the systems here are a few columns wide.
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            for (std::size_t i = k; i < m; ++i) col[i - k] = a(i, j);
            const double nrm = norm2(std::span<const double>(col.data(), m - k));
            if (nrm > best_norm) {
                best_norm = nrm;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
            std::swap(out.perm[k], out.perm[best]);
        }
        if (k == 0) lead = best_norm;
        if (best_norm == 0.0 || best_norm <= rank_tol * lead) {
            out.rank = k;
            break;
        }
        out.rank = k + 1;

        // Reflector v with H = I - 2 v v^T / (v^T v) mapping a(k:,k) to -sign * norm * e1.
        const double alpha = a(k, k) >= 0.0 ? -best_norm : best_norm;
        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
        v[0] -= alpha;
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        if (vtv > 0.0) {
            for (std::size_t j = k; j < n; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
                const double f = 2.0 * dot / vtv;
                for (std::size_t i = k; i < m; ++i) a(i, j) -= f * v[i - k];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * y[i];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i - k];
        }
        a(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
    }

    out.r = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) out.r(i, j) = a(i, j);
    }
    out.qty.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

/// Solves R z = qty by back substitution and undoes the column permutation.
inline std::vector<double> solve_factored(const PivotedQr& qr) {
    const std::size_t n = qr.r.cols();
    std::vector<double> z(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = qr.qty[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= qr.r(ii, j) * z[j];
        z[ii] = acc / qr.r(ii, ii);
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) x[qr.perm[k]] = z[k];
    return x;
}

/// 2-norm condition number of a full-rank triangular factor.
inline double condition_number(const Matrix& r) {
    const auto sv = singular_values(r);
    if (sv.empty()) return 1.0;
    if (sv.back() == 0.0) return std::numeric_limits<double>::infinity();
    return sv.front() / sv.back();
}

}  // namespace inspectlens::linalg
