#pragma once

#include "tfde/fft.hpp"
#include "tfde/linear_operator.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tfde {

/// Square Toeplitz matrix T[i][j] = b_{i-j}.
///
/// first_col holds b_0, b_1, ..., b_{M-1}; first_row holds b_0, b_{-1}, ..., b_{1-M}.
struct ToeplitzDescriptor {
    Vector first_col;
    Vector first_row;

    std::size_t size() const { return first_col.size(); }
    /// b_k for k in (-M, M)
    double coefficient(std::ptrdiff_t k) const;
    double entry(std::size_t i, std::size_t j) const;
    ToeplitzDescriptor transposed() const;
};

/// Validates lengths and first_col[0] == first_row[0].
ToeplitzDescriptor make_toeplitz(Vector first_col, Vector first_row);

enum class PaddingPolicy {
    PowerOfTwo,  ///< next power of two >= 2M-1
    Minimal      ///< exactly 2M-1
};

std::size_t embedding_length(std::size_t m, PaddingPolicy policy);

/// Toeplitz product through a circulant embedding with a cached spectrum.
class ToeplitzMatvec {
public:
    explicit ToeplitzMatvec(const ToeplitzDescriptor& t, PaddingPolicy policy = PaddingPolicy::PowerOfTwo);

    std::size_t size() const { return m_; }
    std::size_t embedding_size() const { return len_; }

    void apply(std::span<const double> v, std::span<double> out) const;
    void apply_transpose(std::span<const double> v, std::span<double> out) const;
    /// T v and T^T v from one forward transform.
    void apply_both(std::span<const double> v, std::span<double> out, std::span<double> out_t) const;

private:
    std::size_t m_;
    std::size_t len_;
    std::shared_ptr<const RealFft> fft_;
    std::vector<Complex> spectrum_;
};

Vector toeplitz_matvec(const ToeplitzDescriptor& t, std::span<const double> v);

/// Real circulant matrix given by its first column, with cached eigenvalues.
class CirculantDescriptor {
public:
    explicit CirculantDescriptor(Vector first_col);

    std::size_t size() const { return first_col_.size(); }
    const Vector& first_col() const { return first_col_; }
    /// All M eigenvalues (DFT of the first column).
    std::vector<Complex> spectrum() const;
    /// The non-redundant half, k = 0..M/2.
    std::span<const Complex> half_spectrum() const { return half_; }

    Vector matvec(std::span<const double> v) const;
    /// Eigenvalues of C + C^T (real), all M of them.
    Vector symmetric_part_eigenvalues() const;

private:
    Vector first_col_;
    std::shared_ptr<const RealFft> fft_;
    std::vector<Complex> half_;
};

/// Frobenius-optimal circulant: c_k = ((M-k) t_k + k t_{k-M}) / M.
CirculantDescriptor chan_circulant(const ToeplitzDescriptor& t);

/// C^{-1} v by spectral division. Throws SingularError naming the mode
/// whose eigenvalue is below 1e-14 relative to the largest.
Vector circulant_solve(const CirculantDescriptor& c, std::span<const double> v);

/// Block Toeplitz with Toeplitz blocks acting on x-major vectors of size m1*m2:
/// (T u)[i1, i2] = sum c[i1-j1][i2-j2] u[j1, j2].
struct BTTBDescriptor {
    std::size_t m1 = 0;  // x (fast) extent
    std::size_t m2 = 0;  // y (slow) extent
    Vector coeffs;       // (2 m1 - 1) * (2 m2 - 1), k1 fastest

    static BTTBDescriptor zeros(std::size_t m1, std::size_t m2);
    double& at(std::ptrdiff_t k1, std::ptrdiff_t k2);
    double at(std::ptrdiff_t k1, std::ptrdiff_t k2) const;
    std::size_t size() const { return m1 * m2; }
};

class BTTBMatvec {
public:
    explicit BTTBMatvec(const BTTBDescriptor& b, PaddingPolicy policy = PaddingPolicy::PowerOfTwo);

    std::size_t size() const { return m1_ * m2_; }
    void apply(std::span<const double> u, std::span<double> out) const;

private:
    std::size_t m1_, m2_, l1_, l2_;
    std::shared_ptr<const RealFft2D> fft_;
    std::vector<Complex> spectrum_;
};

Vector bttb_matvec(const BTTBDescriptor& b, std::span<const double> u);

/// Default cap on the dimension of materialized operators.
inline constexpr std::size_t kDenseCap = 4096;

/// Column-by-column application to unit vectors.
Eigen::MatrixXd materialize_dense(const LinearOperator& op, std::size_t cap = kDenseCap);
Eigen::MatrixXd materialize_dense(const ToeplitzDescriptor& t, std::size_t cap = kDenseCap);
Eigen::MatrixXd materialize_dense(const BTTBDescriptor& b, std::size_t cap = kDenseCap);

/// Tridiagonal solve without pivoting. lower[i] = A(i+1, i), upper[i] = A(i, i+1).
Vector tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                     std::span<const double> upper, std::span<const double> v);

}  // namespace tfde
