#include "tfde/operator2d.hpp"

#include "tfde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tfde {

DiffusionField2D DiffusionField2D::constant(std::size_t m1, std::size_t m2, double c_l, double c_r, double e_l,
                                            double e_r) {
    const std::size_t n = m1 * m2;
    return {Vector(n, c_l), Vector(n, c_r), Vector(n, e_l), Vector(n, e_r)};
}

bool DiffusionField2D::is_constant() const {
    auto flat = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }); };
    return flat(c_l) && flat(c_r) && flat(e_l) && flat(e_r);
}

Operator2D::Operator2D(TemperedStencil stencil_x, TemperedStencil stencil_y, std::size_t m1, std::size_t m2,
                       Scales scales, DiffusionField2D fields)
    : m1_(m1),
      m2_(m2),
      stencil_x_(std::move(stencil_x)),
      stencil_y_(std::move(stencil_y)),
      bx_(toeplitz_B(stencil_x_, m1)),
      by_(toeplitz_B(stencil_y_, m2)),
      mx_(bx_),
      my_(by_),
      scales_(scales),
      fields_(std::move(fields)) {
    if (m1 == 0 || m2 == 0) throw DomainError("Operator2D: grid sizes must be positive");
    const std::size_t n = m1 * m2;
    for (const Vector* f : {&fields_.c_l, &fields_.c_r, &fields_.e_l, &fields_.e_r}) {
        require_size(f->size(), n, "Operator2D coefficient field");
        if (std::any_of(f->begin(), f->end(), [](double c) { return c < 0.0 || !std::isfinite(c); })) {
            throw DomainError("diffusion coefficients must be nonnegative");
        }
    }
}

void Operator2D::apply(std::span<const double> u, std::span<double> out) const {
    const std::size_t n = size();
    require_size(u.size(), n, "Operator2D input");
    require_size(out.size(), n, "Operator2D output");
    const auto& [cl, cr, el, er] = fields_;
    const auto& sc = scales_;

    Vector b(m1_), bt(m1_);
    for (std::size_t j = 0; j < m2_; ++j) {
        const std::size_t off = j * m1_;
        const auto line = u.subspan(off, m1_);
        mx_.apply_both(line, b, bt);
        for (std::size_t i = 0; i < m1_; ++i) {
            const std::size_t k = off + i;
            const double right = i + 1 < m1_ ? line[i + 1] : 0.0;
            const double left = i > 0 ? line[i - 1] : 0.0;
            const double mx = sc.r1 * (cl[k] * b[i] + cr[k] * bt[i]) - sc.s1 * (cl[k] - cr[k]) * (right - left);
            out[k] = sc.identity * u[k] - mx;
        }
    }

    Vector col(m2_), c(m2_), ct(m2_);
    for (std::size_t i = 0; i < m1_; ++i) {
        for (std::size_t j = 0; j < m2_; ++j) col[j] = u[i + j * m1_];
        my_.apply_both(col, c, ct);
        for (std::size_t j = 0; j < m2_; ++j) {
            const std::size_t k = i + j * m1_;
            const double up = j + 1 < m2_ ? col[j + 1] : 0.0;
            const double down = j > 0 ? col[j - 1] : 0.0;
            out[k] -= sc.r2 * (el[k] * c[j] + er[k] * ct[j]) - sc.s2 * (el[k] - er[k]) * (up - down);
        }
    }
}

void Operator2D::apply_explicit(std::span<const double> u, std::span<double> out) const {
    apply(u, out);
    for (std::size_t k = 0; k < size(); ++k) out[k] = 2.0 * scales_.identity * u[k] - out[k];
}

Vector Operator2D::diagonal() const {
    Vector d(size());
    const double bx0 = stencil_x_.diagonal(), by0 = stencil_y_.diagonal();
    for (std::size_t k = 0; k < d.size(); ++k) {
        d[k] = scales_.identity - scales_.r1 * (fields_.c_l[k] + fields_.c_r[k]) * bx0 -
               scales_.r2 * (fields_.e_l[k] + fields_.e_r[k]) * by0;
    }
    return d;
}

BTTBDescriptor Operator2D::as_bttb() const {
    if (!fields_.is_constant()) throw DomainError("as_bttb: coefficient fields are not constant");
    const double cl = fields_.c_l[0], cr = fields_.c_r[0], el = fields_.e_l[0], er = fields_.e_r[0];
    auto h = [](std::ptrdiff_t k) { return k == 1 ? -1.0 : (k == -1 ? 1.0 : 0.0); };
    BTTBDescriptor t = BTTBDescriptor::zeros(m1_, m2_);
    const auto m1 = static_cast<std::ptrdiff_t>(m1_), m2 = static_cast<std::ptrdiff_t>(m2_);
    for (std::ptrdiff_t k = 1 - m1; k < m1; ++k) {
        t.at(k, 0) -= scales_.r1 * (cl * bx_.coefficient(k) + cr * bx_.coefficient(-k)) - scales_.s1 * (cl - cr) * h(k);
    }
    for (std::ptrdiff_t k = 1 - m2; k < m2; ++k) {
        t.at(0, k) -= scales_.r2 * (el * by_.coefficient(k) + er * by_.coefficient(-k)) - scales_.s2 * (el - er) * h(k);
    }
    t.at(0, 0) += scales_.identity;
    return t;
}

Operator2D operator_2d(const FractionalParams& px, const FractionalParams& py, const Grid1D& gx, const Grid1D& gy,
                       double tau, const DiffusionField2D& fields) {
    if (!(tau > 0.0)) throw DomainError("operator_2d: tau must be positive");
    Operator2D::Scales sc;
    sc.identity = 1.0;
    sc.r1 = tau / (2.0 * std::pow(gx.h, px.alpha));
    sc.r2 = tau / (2.0 * std::pow(gy.h, py.alpha));
    sc.s1 = px.alpha * tau * std::pow(px.lambda, px.alpha - 1.0) / (4.0 * gx.h);
    sc.s2 = py.alpha * tau * std::pow(py.lambda, py.alpha - 1.0) / (4.0 * gy.h);
    return Operator2D(tempered_stencil(px, gx.h, gx.M + 1), tempered_stencil(py, gy.h, gy.M + 1), gx.M, gy.M, sc,
                      fields);
}

Operator2D steady_operator_2d(const FractionalParams& px, const FractionalParams& py, const Grid1D& gx,
                              const Grid1D& gy, const DiffusionField2D& fields) {
    Operator2D::Scales sc;
    sc.identity = 0.0;
    sc.r1 = 1.0 / std::pow(gx.h, px.alpha);
    sc.r2 = 1.0 / std::pow(gy.h, py.alpha);
    sc.s1 = px.alpha * std::pow(px.lambda, px.alpha - 1.0) / (2.0 * gx.h);
    sc.s2 = py.alpha * std::pow(py.lambda, py.alpha - 1.0) / (2.0 * gy.h);
    return Operator2D(tempered_stencil(px, gx.h, gx.M + 1), tempered_stencil(py, gy.h, gy.M + 1), gx.M, gy.M, sc,
                      fields);
}

}  // namespace tfde
