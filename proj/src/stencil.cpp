#include "tfde/stencil.hpp"

#include "tfde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tfde {

namespace {

void check_alpha(double alpha, bool allow_two) {
    const bool ok = alpha > 1.0 && (alpha < 2.0 || (allow_two && alpha == 2.0));
    if (!ok || !std::isfinite(alpha)) {
        throw DomainError("fractional order alpha=" + std::to_string(alpha) + " outside (1, 2)");
    }
}

}  // namespace

Gamma3Interval gamma3_interval(double alpha) {
    const double a2 = alpha * alpha;
    const double lo1 = (2.0 - alpha) * (a2 + alpha - 8.0) / (2.0 * (a2 + 3.0 * alpha + 2.0));
    const double lo2 = (1.0 - alpha) * (a2 + 2.0 * alpha) / (2.0 * (a2 + 3.0 * alpha + 4.0));
    const double hi = (2.0 - alpha) * (a2 + 2.0 * alpha - 3.0) / (2.0 * (a2 + 3.0 * alpha + 2.0));
    return {std::max(lo1, lo2), hi};
}

FractionalParams make_params(double alpha, double gamma3, double lambda) {
    check_alpha(alpha, false);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("tempering lambda must be >= 0");
    if (!std::isfinite(gamma3)) throw DomainError("gamma3 must be finite");
    FractionalParams p;
    p.alpha = alpha;
    p.lambda = lambda;
    p.gamma3 = gamma3;
    p.gamma1 = alpha / 2.0 + gamma3;
    p.gamma2 = (2.0 - alpha) / 2.0 - 2.0 * gamma3;
    p.valid = gamma3_interval(alpha).contains(gamma3);
    return p;
}

FractionalParams laplacian_params() {
    FractionalParams p;
    p.alpha = 2.0;
    p.lambda = 0.0;
    p.gamma3 = 0.0;
    p.gamma1 = 1.0;
    p.gamma2 = 0.0;
    p.valid = true;
    return p;
}

Grid1D Grid1D::make(double a, double b, std::size_t M) {
    if (M < 1) throw DomainError("Grid1D needs at least one interior point");
    if (!(b > a)) throw DomainError("Grid1D needs b > a");
    return {a, b, M, (b - a) / static_cast<double>(M + 1)};
}

TimeGrid TimeGrid::make(double T, std::size_t N) {
    if (N < 1 || !(T > 0.0)) throw DomainError("TimeGrid needs T > 0 and N >= 1");
    return {T, N, T / static_cast<double>(N)};
}

Vector grunwald_weights(double alpha, std::size_t K) {
    check_alpha(alpha, true);
    Vector w(K + 1);
    w[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(k));
    return w;
}

double phi_value(const FractionalParams& p, double h) {
    if (!(h > 0.0)) throw DomainError("phi_value: h must be positive");
    const double hl = h * p.lambda;
    return (p.gamma1 * std::exp(hl) + p.gamma2 + p.gamma3 * std::exp(-hl)) * std::pow(1.0 - std::exp(-hl), p.alpha);
}

TemperedStencil tempered_stencil(const FractionalParams& p, double h, std::size_t K) {
    if (K < 2) throw DomainError("tempered_stencil: K must be >= 2");
    if (!(h > 0.0)) throw DomainError("tempered_stencil: h must be positive");
    TemperedStencil s;
    s.params = p;
    s.h = h;
    s.omega = grunwald_weights(p.alpha, K);
    s.phi = phi_value(p, h);
    s.g.resize(K + 1);
    const auto& w = s.omega;
    const double hl = h * p.lambda;
    s.g[0] = p.gamma1 * w[0] * std::exp(hl);
    s.g[1] = p.gamma1 * w[1] + p.gamma2 * w[0];
    for (std::size_t k = 2; k <= K; ++k) {
        s.g[k] = (p.gamma1 * w[k] + p.gamma2 * w[k - 1] + p.gamma3 * w[k - 2]) *
                 std::exp(-static_cast<double>(k - 1) * hl);
    }
    return s;
}

ToeplitzDescriptor toeplitz_B(const TemperedStencil& s, std::size_t M) {
    if (M < 1) throw DomainError("toeplitz_B: M must be >= 1");
    if (s.length() < M + 1) {
        throw DomainError("toeplitz_B: stencil has " + std::to_string(s.length()) + " coefficients, need " +
                          std::to_string(M + 1));
    }
    Vector col(M), row(M, 0.0);
    col[0] = s.diagonal();
    for (std::size_t k = 1; k < M; ++k) col[k] = s.g[k + 1];
    row[0] = col[0];
    if (M > 1) row[1] = s.g[0];
    return make_toeplitz(std::move(col), std::move(row));
}

DiffusionField1D DiffusionField1D::constant(std::size_t M, double c_l, double c_r) {
    return {Vector(M, c_l), Vector(M, c_r)};
}

bool DiffusionField1D::is_constant() const {
    auto flat = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }); };
    return flat(c_l) && flat(c_r);
}

Operator1D::Operator1D(TemperedStencil stencil, std::size_t M, double identity_weight, double diffusion_scale,
                       double advection_scale, DiffusionField1D coeffs)
    : m_(M),
      stencil_(std::move(stencil)),
      toeplitz_(toeplitz_B(stencil_, M)),
      matvec_(toeplitz_),
      identity_weight_(identity_weight),
      diffusion_scale_(diffusion_scale),
      advection_scale_(advection_scale),
      coeffs_(std::move(coeffs)) {
    require_size(coeffs_.c_l.size(), M, "Operator1D c_l");
    require_size(coeffs_.c_r.size(), M, "Operator1D c_r");
    auto negative = [](double c) { return c < 0.0 || !std::isfinite(c); };
    if (std::any_of(coeffs_.c_l.begin(), coeffs_.c_l.end(), negative) ||
        std::any_of(coeffs_.c_r.begin(), coeffs_.c_r.end(), negative)) {
        throw DomainError("diffusion coefficients must be nonnegative");
    }
}

void Operator1D::apply(std::span<const double> x, std::span<double> y) const {
    require_size(x.size(), m_, "Operator1D input");
    require_size(y.size(), m_, "Operator1D output");
    Vector bt(m_);
    matvec_.apply_both(x, y, bt);
    const auto& cl = coeffs_.c_l;
    const auto& cr = coeffs_.c_r;
    for (std::size_t i = 0; i < m_; ++i) {
        const double right = i + 1 < m_ ? x[i + 1] : 0.0;
        const double left = i > 0 ? x[i - 1] : 0.0;
        y[i] = identity_weight_ * x[i] - diffusion_scale_ * (cl[i] * y[i] + cr[i] * bt[i]) +
               advection_scale_ * (cl[i] - cr[i]) * (right - left);
    }
}

void Operator1D::apply_explicit(std::span<const double> x, std::span<double> y) const {
    apply(x, y);
    for (std::size_t i = 0; i < m_; ++i) y[i] = 2.0 * identity_weight_ * x[i] - y[i];
}

Vector Operator1D::diagonal() const {
    Vector d(m_);
    const double b0 = stencil_.diagonal();
    for (std::size_t i = 0; i < m_; ++i) {
        d[i] = identity_weight_ - diffusion_scale_ * (coeffs_.c_l[i] + coeffs_.c_r[i]) * b0;
    }
    return d;
}

Operator1D cn_operator(const FractionalParams& p, const Grid1D& grid, double tau, const DiffusionField1D& coeffs) {
    if (!(tau > 0.0)) throw DomainError("cn_operator: tau must be positive");
    const double r = tau / (2.0 * std::pow(grid.h, p.alpha));
    const double s = p.alpha * tau * std::pow(p.lambda, p.alpha - 1.0) / (4.0 * grid.h);
    return Operator1D(tempered_stencil(p, grid.h, grid.M + 1), grid.M, 1.0, r, s, coeffs);
}

Operator1D steady_operator(const FractionalParams& p, const Grid1D& grid, const DiffusionField1D& coeffs) {
    const double r = 1.0 / std::pow(grid.h, p.alpha);
    const double s = p.alpha * std::pow(p.lambda, p.alpha - 1.0) / (2.0 * grid.h);
    return Operator1D(tempered_stencil(p, grid.h, grid.M + 1), grid.M, 0.0, r, s, coeffs);
}

Vector boundary_rhs(const TemperedStencil& s, const Grid1D& grid, const DiffusionField1D& coeffs, double u_left,
                    double u_right, double scale, double advection_scale) {
    const std::size_t M = grid.M;
    require_size(coeffs.c_l.size(), M, "boundary_rhs c_l");
    require_size(coeffs.c_r.size(), M, "boundary_rhs c_r");
    if (s.length() < M + 2) throw DomainError("boundary_rhs: stencil must reach g_{M+1}");
    const auto& g = s.g;
    Vector out(M, 0.0);
    for (std::size_t i = 1; i <= M; ++i) {
        const double cl = coeffs.c_l[i - 1], cr = coeffs.c_r[i - 1];
        double left = cl * g[i + 1];
        double right = cr * g[M - i + 2];
        if (i == 1) left += cr * g[0];
        if (i == M) right += cl * g[0];
        double v = scale * (u_left * left + u_right * right);
        // H ghost couplings: row 1 sees -u_0, row M sees +u_{M+1}
        double h_ghost = 0.0;
        if (i == 1) h_ghost -= u_left;
        if (i == M) h_ghost += u_right;
        v -= advection_scale * (cl - cr) * h_ghost;
        out[i - 1] = v;
    }
    return out;
}

Vector cn_rhs(const Operator1D& op_prev, std::span<const double> u_prev, std::span<const double> forcing_midpoint,
              std::span<const double> boundary_contrib, double tau) {
    const std::size_t M = op_prev.size();
    require_size(u_prev.size(), M, "cn_rhs u_prev");
    require_size(forcing_midpoint.size(), M, "cn_rhs forcing");
    if (!boundary_contrib.empty()) require_size(boundary_contrib.size(), M, "cn_rhs boundary");
    Vector out(M);
    op_prev.apply_explicit(u_prev, out);
    for (std::size_t i = 0; i < M; ++i) {
        const double bc = boundary_contrib.empty() ? 0.0 : boundary_contrib[i];
        out[i] += tau * (forcing_midpoint[i] + bc);
    }
    return out;
}

}  // namespace tfde
