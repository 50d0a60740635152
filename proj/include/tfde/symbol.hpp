#pragma once

#include "tfde/stencil.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>

namespace tfde {

/// f(alpha; x) = |2 sin(x/2)|^alpha (z_alpha(x) + 2 gamma3 cos(alpha/2 (x - pi)) (cos x - 1)),
/// z_alpha(x) = alpha/2 cos(alpha/2 (x - pi) - x) + (2 - alpha)/2 cos(alpha/2 (x - pi)).
/// Even in x; the formula is evaluated at |x|.
double f_symbol(double alpha, double gamma3, double x);

/// f_M(x) = sum_{k=0}^{M} g_k cos((k-1) x) - phi
double partial_symbol(const FractionalParams& p, double h, std::size_t M, double x);

/// partial_symbol at every point of xs, building the stencil once.
Vector partial_symbol_scan(const FractionalParams& p, double h, std::size_t M, std::span<const double> xs);

/// n equispaced points on [-pi, pi], endpoints included.
Vector symbol_grid(std::size_t n);

struct SymbolSpec {
    double alpha = 1.5;
    std::optional<double> beta;  // set for 2D
    double gamma3 = 0.0;
    double c = 1.0;
    double e = 1.0;
};

struct SmoothingBound {
    double xi = 0.0;
    double omega_star = 0.0;
    /// Order-zero Fourier coefficient of -f_alpha (h^alpha/tau dropped).
    double zeroth_coeff = 0.0;
    double inf_norm = 0.0;
};

/// xi = 2 zeroth_coeff / inf_norm; omega* = 2/3 xi (dims = 1) or 4/5 xi (dims = 2).
/// Throws DomainError if xi <= 0.
SmoothingBound smoothing_bound(const SymbolSpec& spec, int dims);

/// |f(alpha; pi)| = 2^alpha (alpha - 1 + 4 gamma3); checked against a dense scan.
double symbol_inf_norm(double alpha, double gamma3);

/// rho((I - M)^{-1} (I + M)) for constant c_l = c_r = c, dense.
double stability_check(const FractionalParams& p, const Grid1D& grid, double tau, double c);

/// Largest deviation between the sorted eigenvalues of (h^alpha/tau) A_M and
/// the sorted samples h^alpha/tau - c f(alpha; j pi / (M+1)), j = 1..M, with
/// h = 1/(M+1) and tau = h.
double szego_sampling_check(const FractionalParams& p, double c, std::size_t M);

/// Writes "x f_M f" rows, one per grid point.
void write_symbol_scan(std::ostream& os, const FractionalParams& p, double h, std::size_t M, std::size_t points);

}  // namespace tfde
