#include "tfde/symbol.hpp"

#include "tfde/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>

namespace tfde {

namespace {

constexpr double kPi = std::numbers::pi;

void format_number(std::ostream& os, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, res.ptr - buf);
}

}  // namespace

double f_symbol(double alpha, double gamma3, double x) {
    const double ax = std::abs(x);
    const double s = std::pow(std::abs(2.0 * std::sin(ax / 2.0)), alpha);
    const double t = alpha / 2.0 * (ax - kPi);
    const double z = alpha / 2.0 * std::cos(t - ax) + (2.0 - alpha) / 2.0 * std::cos(t);
    return s * (z + 2.0 * gamma3 * std::cos(t) * (std::cos(ax) - 1.0));
}

Vector partial_symbol_scan(const FractionalParams& p, double h, std::size_t M, std::span<const double> xs) {
    if (M < 2) throw DomainError("partial_symbol: M must be at least 2");
    const TemperedStencil s = tempered_stencil(p, h, M);
    Vector out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        // cos((k-1)x) by the Chebyshev recurrence, k = 0..M
        const double c1 = std::cos(xs[j]);
        double prev = c1, cur = 1.0;  // cos(-x), cos(0)
        double acc = s.g[0] * prev + s.g[1] * cur;
        for (std::size_t k = 2; k <= M; ++k) {
            const double next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
            acc += s.g[k] * cur;
        }
        out[j] = acc - s.phi;
    }
    return out;
}

double partial_symbol(const FractionalParams& p, double h, std::size_t M, double x) {
    return partial_symbol_scan(p, h, M, std::span<const double>(&x, 1))[0];
}

Vector symbol_grid(std::size_t n) {
    if (n < 2) throw DomainError("symbol_grid: need at least two points");
    Vector xs(n);
    for (std::size_t j = 0; j < n; ++j) xs[j] = -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n - 1);
    return xs;
}

double symbol_inf_norm(double alpha, double gamma3) {
    const double closed = std::pow(2.0, alpha) * (alpha - 1.0 + 4.0 * gamma3);
    // The closed form assumes |f| peaks at pi; fall back to the scan if it does not.
    double sampled = 0.0;
    for (double x : symbol_grid(2049)) sampled = std::max(sampled, std::abs(f_symbol(alpha, gamma3, x)));
    return std::max(closed, sampled);
}

SmoothingBound smoothing_bound(const SymbolSpec& spec, int dims) {
    if (dims != 1 && dims != 2) throw DomainError("smoothing_bound: dims must be 1 or 2");
    auto zeroth = [&](double a) { return a * (a + 1.0) / 2.0 + spec.gamma3 * (a + 2.0) - 1.0; };
    if (spec.alpha <= 1.0 || spec.alpha >= 2.0) throw DomainError("smoothing_bound: alpha must lie in (1,2)");
    SmoothingBound out;
    out.zeroth_coeff = spec.c * zeroth(spec.alpha);
    out.inf_norm = spec.c * symbol_inf_norm(spec.alpha, spec.gamma3);
    if (dims == 2) {
        const double beta = spec.beta.value_or(spec.alpha);
        if (beta <= 1.0 || beta >= 2.0) throw DomainError("smoothing_bound: beta must lie in (1,2)");
        out.zeroth_coeff += spec.e * zeroth(beta);
        out.inf_norm += spec.e * symbol_inf_norm(beta, spec.gamma3);
    }
    if (!(out.inf_norm > 0.0)) throw DomainError("smoothing_bound: degenerate symbol");
    out.xi = 2.0 * out.zeroth_coeff / out.inf_norm;
    if (!(out.xi > 0.0)) throw DomainError("smoothing_bound: xi is not positive");
    out.omega_star = (dims == 1 ? 2.0 / 3.0 : 4.0 / 5.0) * out.xi;
    return out;
}

double stability_check(const FractionalParams& p, const Grid1D& grid, double tau, double c) {
    if (grid.M > 512) throw DomainError("stability_check: M above dense limit 512");
    const Operator1D op = cn_operator(p, grid, tau, DiffusionField1D::constant(grid.M, c, c));
    const Eigen::MatrixXd a = materialize_dense(op);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd g = a.partialPivLu().solve(2.0 * id - a);
    return g.eigenvalues().cwiseAbs().maxCoeff();
}

double szego_sampling_check(const FractionalParams& p, double c, std::size_t M) {
    if (M > 512) throw DomainError("szego_sampling_check: M above dense limit 512");
    const Grid1D grid = Grid1D::make(0.0, 1.0, M);
    const double tau = grid.h;
    const double shift = std::pow(grid.h, p.alpha) / tau;
    const Operator1D op = cn_operator(p, grid, tau, DiffusionField1D::constant(M, c, c));
    Eigen::MatrixXd a = shift * materialize_dense(op);
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    Vector eig(es.eigenvalues().data(), es.eigenvalues().data() + M);
    Vector samples(M);
    for (std::size_t j = 1; j <= M; ++j) {
        samples[j - 1] = shift - c * f_symbol(p.alpha, p.gamma3, static_cast<double>(j) * kPi / static_cast<double>(M + 1));
    }
    std::sort(eig.begin(), eig.end());
    std::sort(samples.begin(), samples.end());
    double dev = 0.0;
    for (std::size_t j = 0; j < M; ++j) dev = std::max(dev, std::abs(eig[j] - samples[j]));
    return dev;
}

void write_symbol_scan(std::ostream& os, const FractionalParams& p, double h, std::size_t M, std::size_t points) {
    const Vector xs = symbol_grid(points);
    const Vector fm = partial_symbol_scan(p, h, M, xs);
    for (std::size_t j = 0; j < xs.size(); ++j) {
        format_number(os, xs[j]);
        os << ' ';
        format_number(os, fm[j]);
        os << ' ';
        format_number(os, f_symbol(p.alpha, p.gamma3, xs[j]));
        os << '\n';
    }
}

}  // namespace tfde
