#pragma once

#include "tfde/fastlinalg.hpp"
#include "tfde/linear_operator.hpp"

#include <cstddef>
#include <memory>
#include <span>

namespace tfde {

/// Order, tempering and shift weights of the tempered WSGD operator with
/// shifts {1, 0, -1}.
struct FractionalParams {
    double alpha = 1.5;
    double lambda = 0.0;
    double gamma1 = 0.75;
    double gamma2 = 0.25;
    double gamma3 = 0.0;
    /// gamma3 lies in the interval guaranteeing the coefficient sign pattern.
    bool valid = true;
};

struct Gamma3Interval {
    double lower;
    double upper;
    bool contains(double g) const { return g >= lower && g <= upper; }
};

Gamma3Interval gamma3_interval(double alpha);

/// Throws DomainError for alpha outside (1, 2) or negative lambda. An
/// out-of-interval gamma3 only clears `valid`.
FractionalParams make_params(double alpha, double gamma3, double lambda);

/// Second-order Laplacian limit (alpha = 2, gamma3 = 0, lambda = 0), used
/// only to build the Laplacian preconditioner.
FractionalParams laplacian_params();

struct Grid1D {
    double a = 0.0;
    double b = 1.0;
    std::size_t M = 1;  // interior points
    double h = 0.5;

    static Grid1D make(double a, double b, std::size_t M);
    /// x_i = a + i h, i = 0..M+1
    double node(std::size_t i) const { return a + static_cast<double>(i) * h; }
};

struct TimeGrid {
    double T = 1.0;
    std::size_t N = 1;
    double tau = 1.0;

    static TimeGrid make(double T, std::size_t N);
    double time(std::size_t j) const { return static_cast<double>(j) * tau; }
};

/// omega_k = (-1)^k binom(alpha, k), k = 0..K. Accepts 1 < alpha <= 2.
Vector grunwald_weights(double alpha, std::size_t K);

/// phi(lambda) = (gamma1 e^{h lambda} + gamma2 + gamma3 e^{-h lambda}) (1 - e^{-h lambda})^alpha
double phi_value(const FractionalParams& p, double h);

struct TemperedStencil {
    FractionalParams params;
    double h = 0.0;
    Vector g;      // g_0 .. g_K
    double phi = 0.0;
    Vector omega;  // omega_0 .. omega_K

    std::size_t length() const { return g.size(); }
    /// Main diagonal of B: g_1 - phi.
    double diagonal() const { return g[1] - phi; }
};

TemperedStencil tempered_stencil(const FractionalParams& p, double h, std::size_t K);

/// Lower-Hessenberg Toeplitz B: first column [g_1 - phi, g_2, ..., g_M],
/// first row [g_1 - phi, g_0, 0, ..., 0].
ToeplitzDescriptor toeplitz_B(const TemperedStencil& s, std::size_t M);

/// Nonnegative diffusion coefficients sampled at interior nodes.
struct DiffusionField1D {
    Vector c_l;
    Vector c_r;

    static DiffusionField1D constant(std::size_t M, double c_l, double c_r);
    bool is_constant() const;
};

/// A v = w v - r (C_l B v + C_r B^T v) + s (C_l - C_r) H v, with
/// H = tridiag{-1, 0, 1}.
///
/// Crank-Nicolson: w = 1, r = tau / (2 h^alpha), s = alpha tau lambda^{alpha-1} / (4h).
/// Steady: w = 0, r = 1 / h^alpha, s = alpha lambda^{alpha-1} / (2h).
class Operator1D final : public LinearOperator {
public:
    Operator1D(TemperedStencil stencil, std::size_t M, double identity_weight, double diffusion_scale,
               double advection_scale, DiffusionField1D coeffs);

    std::size_t size() const override { return m_; }
    using LinearOperator::apply;
    void apply(std::span<const double> x, std::span<double> y) const override;
    Vector diagonal() const override;

    /// (2w I - A) v, i.e. (I + M) v in Crank-Nicolson mode.
    void apply_explicit(std::span<const double> x, std::span<double> y) const;

    const TemperedStencil& stencil() const { return stencil_; }
    const ToeplitzDescriptor& toeplitz() const { return toeplitz_; }
    const DiffusionField1D& coeffs() const { return coeffs_; }
    double identity_weight() const { return identity_weight_; }
    double diffusion_scale() const { return diffusion_scale_; }
    double advection_scale() const { return advection_scale_; }

private:
    std::size_t m_;
    TemperedStencil stencil_;
    ToeplitzDescriptor toeplitz_;
    ToeplitzMatvec matvec_;
    double identity_weight_;
    double diffusion_scale_;
    double advection_scale_;
    DiffusionField1D coeffs_;
};

/// I - M_M for the Crank-Nicolson step.
Operator1D cn_operator(const FractionalParams& p, const Grid1D& grid, double tau, const DiffusionField1D& coeffs);

/// -(1/h^alpha)(C_l B + C_r B^T) + (alpha lambda^{alpha-1} / (2h))(C_l - C_r) H
Operator1D steady_operator(const FractionalParams& p, const Grid1D& grid, const DiffusionField1D& coeffs);

/// Contribution of Dirichlet ghost values u_0 = u_left and u_{M+1} = u_right
/// to an operator  scale (C_l B + C_r B^T) - advection_scale (C_l - C_r) H
/// acting on the extended vector. Row i (1-based) collects
///   u_left  * (c_{l,i} g_{i+1} + [i=1] c_{r,1} g_0)
///   u_right * (c_{r,i} g_{M-i+2} + [i=M] c_{l,M} g_0)
/// times `scale`, plus the H ghost couplings.
Vector boundary_rhs(const TemperedStencil& s, const Grid1D& grid, const DiffusionField1D& coeffs, double u_left,
                    double u_right, double scale, double advection_scale = 0.0);

/// (I + M^j) u^j + tau (forcing + boundary)
Vector cn_rhs(const Operator1D& op_prev, std::span<const double> u_prev, std::span<const double> forcing_midpoint,
              std::span<const double> boundary_contrib, double tau);

}  // namespace tfde
