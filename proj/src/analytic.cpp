#include "tfde/errors.hpp"
#include "tfde/problems.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tfde {

namespace {

// 1/Gamma(z), zero at the poles.
double rgamma(double z) {
    if (z <= 0.0 && z == std::floor(z)) return 0.0;
    return 1.0 / std::tgamma(z);
}

}  // namespace

double tempered_rl_exp_monomial(double kappa, double p, double lambda, double alpha, double s, double trunc_tol) {
    if (!(p > -1.0)) throw DomainError("tempered derivative needs p > -1");
    if (!(s > 0.0)) throw DomainError("tempered derivative evaluated at s <= 0");
    const double mu = lambda + kappa;
    double term = std::tgamma(p + 1.0) * rgamma(p + 1.0 - alpha) * std::pow(s, p - alpha);
    double sum = term;
    if (mu != 0.0) {
        // t_{n+1} = t_n mu s / (n+1) (p+n+1) / (p+n+1-alpha)
        for (int n = 0;; ++n) {
            if (n > 100000) throw ConvergenceError("tempered series did not converge");
            const double k = p + n + 1.0;
            term *= mu * s / (n + 1.0) * k / (k - alpha);
            sum += term;
            if (!std::isfinite(sum)) throw ConvergenceError("tempered series overflowed");
            if (n + 1 > std::abs(mu) * s && std::abs(term) <= trunc_tol * std::abs(sum)) break;
        }
    }
    return std::exp(-lambda * s) * sum;
}

double rl_tempered_series(double p, double lambda, double alpha, Side side, double x, double a, double b,
                          double trunc_tol) {
    if (p <= alpha - 1.0) throw DomainError("rl_tempered_series: p must exceed alpha - 1");
    const double s = side == Side::Left ? x - a : b - x;
    return tempered_rl_exp_monomial(-lambda, p, lambda, alpha, s, trunc_tol);
}

double tempered_derivative(const std::vector<ExpPolyTerm>& terms, double lambda, double alpha, double s) {
    double sum = 0.0;
    for (const auto& t : terms) {
        for (std::size_t q = 0; q < t.poly.size(); ++q) {
            if (t.poly[q] == 0.0) continue;
            sum += t.scale * t.poly[q] * tempered_rl_exp_monomial(t.kappa, static_cast<double>(q), lambda, alpha, s);
        }
    }
    return sum;
}

ConsistencyResult consistency_order(const FractionalParams& params, Side side, double p,
                                    const std::vector<std::size_t>& sizes) {
    if (sizes.size() < 2) throw DomainError("consistency_order: need at least two sizes");
    const double lam = params.lambda;
    const double la = std::pow(lam, params.alpha);
    ConsistencyResult out;
    for (std::size_t M : sizes) {
        const Grid1D g = Grid1D::make(0.0, 1.0, M);
        const TemperedStencil st = tempered_stencil(params, g.h, M + 1);
        // samples of e^{-lambda s} s^p in the side's variable, on nodes 0..M+1
        Vector u(M + 2);
        for (std::size_t i = 0; i <= M + 1; ++i) {
            const double s = side == Side::Left ? g.node(i) : 1.0 - g.node(i);
            u[i] = std::exp(-lam * s) * std::pow(s, p);
        }
        const double scale = 1.0 / std::pow(g.h, params.alpha);
        double err = 0.0;
        for (std::size_t i = 1; i <= M; ++i) {
            // left: sum_{k=0}^{i+1} g_k u_{i-k+1}; right mirrors the index
            double acc = -st.phi * u[i];
            if (side == Side::Left) {
                for (std::size_t k = 0; k <= i + 1; ++k) acc += st.g[k] * u[i + 1 - k];
            } else {
                for (std::size_t k = 0; k <= M + 2 - i; ++k) acc += st.g[k] * u[i - 1 + k];
            }
            const double exact = rl_tempered_series(p, lam, params.alpha, side, g.node(i)) - la * u[i];
            err = std::max(err, std::abs(scale * acc - exact));
        }
        out.h.push_back(g.h);
        out.error.push_back(err);
    }
    for (std::size_t k = 1; k < out.h.size(); ++k) {
        out.slopes.push_back(std::log(out.error[k - 1] / out.error[k]) / std::log(out.h[k - 1] / out.h[k]));
    }
    out.order = out.slopes.back();
    return out;
}

}  // namespace tfde
