#include "tfde/fastlinalg.hpp"

#include "tfde/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace tfde {

double ToeplitzDescriptor::coefficient(std::ptrdiff_t k) const {
    const auto m = static_cast<std::ptrdiff_t>(size());
    if (k <= -m || k >= m) return 0.0;
    return k >= 0 ? first_col[static_cast<std::size_t>(k)] : first_row[static_cast<std::size_t>(-k)];
}

double ToeplitzDescriptor::entry(std::size_t i, std::size_t j) const {
    return coefficient(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j));
}

ToeplitzDescriptor ToeplitzDescriptor::transposed() const { return {first_row, first_col}; }

ToeplitzDescriptor make_toeplitz(Vector first_col, Vector first_row) {
    if (first_col.empty()) throw DomainError("Toeplitz matrix must be nonempty");
    require_size(first_row.size(), first_col.size(), "Toeplitz first_row");
    if (first_col[0] != first_row[0]) throw DomainError("Toeplitz first_col[0] != first_row[0]");
    return {std::move(first_col), std::move(first_row)};
}

std::size_t embedding_length(std::size_t m, PaddingPolicy policy) {
    const std::size_t minimal = m > 0 ? 2 * m - 1 : 1;
    return policy == PaddingPolicy::Minimal ? minimal : std::bit_ceil(minimal);
}

ToeplitzMatvec::ToeplitzMatvec(const ToeplitzDescriptor& t, PaddingPolicy policy)
    : m_(t.size()), len_(embedding_length(t.size(), policy)), fft_(real_fft(len_)) {
    Vector c(len_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) c[k] = t.first_col[k];
    for (std::size_t k = 1; k < m_; ++k) c[len_ - k] = t.first_row[k];
    spectrum_.resize(fft_->spectrum_size());
    fft_->forward(c, spectrum_);
}

void ToeplitzMatvec::apply_both(std::span<const double> v, std::span<double> out,
                                std::span<double> out_t) const {
    require_size(v.size(), m_, "Toeplitz matvec input");
    Vector buf(len_, 0.0);
    std::copy(v.begin(), v.end(), buf.begin());
    std::vector<Complex> x(fft_->spectrum_size()), y(x.size());
    fft_->forward(buf, x);
    const double scale = 1.0 / static_cast<double>(len_);
    if (!out.empty()) {
        require_size(out.size(), m_, "Toeplitz matvec output");
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] * spectrum_[k];
        fft_->inverse(y, buf);
        for (std::size_t i = 0; i < m_; ++i) out[i] = buf[i] * scale;
    }
    if (!out_t.empty()) {
        require_size(out_t.size(), m_, "Toeplitz matvec output");
        // the transposed embedding has the conjugate spectrum
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] * std::conj(spectrum_[k]);
        fft_->inverse(y, buf);
        for (std::size_t i = 0; i < m_; ++i) out_t[i] = buf[i] * scale;
    }
}

void ToeplitzMatvec::apply(std::span<const double> v, std::span<double> out) const {
    require_size(out.size(), m_, "Toeplitz matvec output");
    apply_both(v, out, {});
}

void ToeplitzMatvec::apply_transpose(std::span<const double> v, std::span<double> out) const {
    require_size(out.size(), m_, "Toeplitz matvec output");
    apply_both(v, {}, out);
}

Vector toeplitz_matvec(const ToeplitzDescriptor& t, std::span<const double> v) {
    require_size(v.size(), t.size(), "toeplitz_matvec");
    Vector out(t.size());
    ToeplitzMatvec(t).apply(v, out);
    return out;
}

CirculantDescriptor::CirculantDescriptor(Vector first_col)
    : first_col_(std::move(first_col)) {
    if (first_col_.empty()) throw DomainError("circulant must be nonempty");
    fft_ = real_fft(first_col_.size());
    half_.resize(fft_->spectrum_size());
    fft_->forward(first_col_, half_);
}

std::vector<Complex> CirculantDescriptor::spectrum() const {
    const std::size_t m = size();
    std::vector<Complex> full(m);
    for (std::size_t k = 0; k < m; ++k) full[k] = k < half_.size() ? half_[k] : std::conj(half_[m - k]);
    return full;
}

Vector CirculantDescriptor::matvec(std::span<const double> v) const {
    require_size(v.size(), size(), "circulant matvec");
    std::vector<Complex> x(half_.size());
    fft_->forward(v, x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= half_[k];
    Vector out(size());
    fft_->inverse(x, out);
    for (double& o : out) o /= static_cast<double>(size());
    return out;
}

Vector CirculantDescriptor::symmetric_part_eigenvalues() const {
    const auto full = spectrum();
    Vector ev(full.size());
    std::transform(full.begin(), full.end(), ev.begin(), [](Complex z) { return 2.0 * z.real(); });
    return ev;
}

CirculantDescriptor chan_circulant(const ToeplitzDescriptor& t) {
    const std::size_t m = t.size();
    Vector c(m);
    c[0] = t.first_col[0];
    for (std::size_t k = 1; k < m; ++k) {
        c[k] = (static_cast<double>(m - k) * t.first_col[k] + static_cast<double>(k) * t.first_row[m - k]) /
               static_cast<double>(m);
    }
    return CirculantDescriptor(std::move(c));
}

Vector circulant_solve(const CirculantDescriptor& c, std::span<const double> v) {
    require_size(v.size(), c.size(), "circulant_solve");
    const auto spec = c.half_spectrum();
    double largest = 0.0;
    for (const Complex& z : spec) largest = std::max(largest, std::abs(z));
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (std::abs(spec[k]) <= 1e-14 * largest || largest == 0.0) {
            throw SingularError("circulant_solve: zero eigenvalue", k);
        }
    }
    const auto fft = real_fft(c.size());
    std::vector<Complex> x(spec.size());
    fft->forward(v, x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] /= spec[k];
    Vector out(c.size());
    fft->inverse(x, out);
    for (double& o : out) o /= static_cast<double>(c.size());
    return out;
}

BTTBDescriptor BTTBDescriptor::zeros(std::size_t m1, std::size_t m2) {
    if (m1 == 0 || m2 == 0) throw DomainError("BTTB extents must be positive");
    return {m1, m2, Vector((2 * m1 - 1) * (2 * m2 - 1), 0.0)};
}

double& BTTBDescriptor::at(std::ptrdiff_t k1, std::ptrdiff_t k2) {
    const auto w = static_cast<std::ptrdiff_t>(2 * m1 - 1);
    const auto o1 = static_cast<std::ptrdiff_t>(m1) - 1, o2 = static_cast<std::ptrdiff_t>(m2) - 1;
    return coeffs[static_cast<std::size_t>((k1 + o1) + w * (k2 + o2))];
}

double BTTBDescriptor::at(std::ptrdiff_t k1, std::ptrdiff_t k2) const {
    return const_cast<BTTBDescriptor&>(*this).at(k1, k2);
}

BTTBMatvec::BTTBMatvec(const BTTBDescriptor& b, PaddingPolicy policy)
    : m1_(b.m1), m2_(b.m2),
      l1_(embedding_length(b.m1, policy)), l2_(embedding_length(b.m2, policy)),
      fft_(real_fft_2d(l1_, l2_)) {
    require_size(b.coeffs.size(), (2 * m1_ - 1) * (2 * m2_ - 1), "BTTB coefficients");
    Vector c(l1_ * l2_, 0.0);
    const auto m1 = static_cast<std::ptrdiff_t>(m1_), m2 = static_cast<std::ptrdiff_t>(m2_);
    const auto l1 = static_cast<std::ptrdiff_t>(l1_), l2 = static_cast<std::ptrdiff_t>(l2_);
    for (std::ptrdiff_t k2 = 1 - m2; k2 < m2; ++k2) {
        for (std::ptrdiff_t k1 = 1 - m1; k1 < m1; ++k1) {
            const std::ptrdiff_t i1 = (k1 + l1) % l1, i2 = (k2 + l2) % l2;
            c[static_cast<std::size_t>(i1 + l1 * i2)] = b.at(k1, k2);
        }
    }
    spectrum_.resize(fft_->spectrum_size());
    fft_->forward(c, spectrum_);
}

void BTTBMatvec::apply(std::span<const double> u, std::span<double> out) const {
    require_size(u.size(), size(), "BTTB matvec input");
    require_size(out.size(), size(), "BTTB matvec output");
    Vector buf(l1_ * l2_, 0.0);
    for (std::size_t j = 0; j < m2_; ++j) {
        std::copy_n(u.begin() + static_cast<std::ptrdiff_t>(j * m1_), m1_, buf.begin() + static_cast<std::ptrdiff_t>(j * l1_));
    }
    std::vector<Complex> x(fft_->spectrum_size());
    fft_->forward(buf, x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= spectrum_[k];
    fft_->inverse(x, buf);
    const double scale = 1.0 / static_cast<double>(l1_ * l2_);
    for (std::size_t j = 0; j < m2_; ++j) {
        for (std::size_t i = 0; i < m1_; ++i) out[i + j * m1_] = buf[i + j * l1_] * scale;
    }
}

Vector bttb_matvec(const BTTBDescriptor& b, std::span<const double> u) {
    Vector out(b.size());
    BTTBMatvec(b).apply(u, out);
    return out;
}

Eigen::MatrixXd materialize_dense(const LinearOperator& op, std::size_t cap) {
    const std::size_t n = op.size();
    if (n > cap) {
        throw DomainError("materialize_dense: size " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    }
    Eigen::MatrixXd a(n, n);
    Vector e(n, 0.0), col(n);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    return a;
}

Eigen::MatrixXd materialize_dense(const ToeplitzDescriptor& t, std::size_t cap) {
    const std::size_t n = t.size();
    if (n > cap) throw DomainError("materialize_dense: Toeplitz size exceeds cap");
    Eigen::MatrixXd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.entry(i, j);
    return a;
}

Eigen::MatrixXd materialize_dense(const BTTBDescriptor& b, std::size_t cap) {
    const std::size_t n = b.size();
    if (n > cap) throw DomainError("materialize_dense: BTTB size exceeds cap");
    Eigen::MatrixXd a(n, n);
    for (std::size_t i2 = 0; i2 < b.m2; ++i2)
        for (std::size_t i1 = 0; i1 < b.m1; ++i1)
            for (std::size_t j2 = 0; j2 < b.m2; ++j2)
                for (std::size_t j1 = 0; j1 < b.m1; ++j1) {
                    const auto k1 = static_cast<std::ptrdiff_t>(i1) - static_cast<std::ptrdiff_t>(j1);
                    const auto k2 = static_cast<std::ptrdiff_t>(i2) - static_cast<std::ptrdiff_t>(j2);
                    a(static_cast<Eigen::Index>(i1 + b.m1 * i2), static_cast<Eigen::Index>(j1 + b.m1 * j2)) = b.at(k1, k2);
                }
    return a;
}

Vector tridiag_solve(std::span<const double> lower, std::span<const double> diag,
                     std::span<const double> upper, std::span<const double> v) {
    const std::size_t n = diag.size();
    if (n == 0) throw DomainError("tridiag_solve: empty system");
    require_size(lower.size(), n - 1, "tridiag_solve lower");
    require_size(upper.size(), n - 1, "tridiag_solve upper");
    require_size(v.size(), n, "tridiag_solve rhs");
    Vector c(n, 0.0), x(v.begin(), v.end());
    double pivot = diag[0];
    if (pivot == 0.0) throw SingularError("tridiag_solve: zero pivot", 0);
    if (n > 1) c[0] = upper[0] / pivot;
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if (pivot == 0.0) throw SingularError("tridiag_solve: zero pivot", i);
        if (i + 1 < n) c[i] = upper[i] / pivot;
        x[i] = (x[i] - lower[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

}  // namespace tfde
