#pragma once

#include "tfde/fastlinalg.hpp"
#include "tfde/stencil.hpp"

#include <cstddef>
#include <span>

namespace tfde {

/// Coefficient samples on the M1 x M2 interior grid, x-major
/// (index i1 + M1 * i2).
struct DiffusionField2D {
    Vector c_l, c_r;  // x direction
    Vector e_l, e_r;  // y direction

    static DiffusionField2D constant(std::size_t m1, std::size_t m2, double c_l, double c_r, double e_l, double e_r);
    bool is_constant() const;
};

/// A u = w u - M_x u - M_y u with
///   M_x = r1 [C_l (I (x) B_x) + C_r (I (x) B_x^T)] - s1 (C_l - C_r)(I (x) H)
///   M_y = r2 [E_l (B_y (x) I) + E_r (B_y^T (x) I)] - s2 (E_l - E_r)(H (x) I)
/// applied as batched 1D Toeplitz products along grid lines.
class Operator2D final : public LinearOperator {
public:
    struct Scales {
        double identity = 1.0;
        double r1 = 0.0, r2 = 0.0;
        double s1 = 0.0, s2 = 0.0;
    };

    Operator2D(TemperedStencil stencil_x, TemperedStencil stencil_y, std::size_t m1, std::size_t m2, Scales scales,
               DiffusionField2D fields);

    std::size_t size() const override { return m1_ * m2_; }
    using LinearOperator::apply;
    void apply(std::span<const double> u, std::span<double> out) const override;
    Vector diagonal() const override;

    /// (2w I - A) u, i.e. (I + M_x + M_y) u in Crank-Nicolson mode.
    void apply_explicit(std::span<const double> u, std::span<double> out) const;

    std::size_t m1() const { return m1_; }
    std::size_t m2() const { return m2_; }
    const Scales& scales() const { return scales_; }
    const TemperedStencil& stencil_x() const { return stencil_x_; }
    const TemperedStencil& stencil_y() const { return stencil_y_; }
    const ToeplitzDescriptor& toeplitz_x() const { return bx_; }
    const ToeplitzDescriptor& toeplitz_y() const { return by_; }
    const DiffusionField2D& fields() const { return fields_; }

    /// Equivalent BTTB description; only defined for constant coefficient fields.
    BTTBDescriptor as_bttb() const;

private:
    std::size_t m1_, m2_;
    TemperedStencil stencil_x_, stencil_y_;
    ToeplitzDescriptor bx_, by_;
    ToeplitzMatvec mx_, my_;
    Scales scales_;
    DiffusionField2D fields_;
};

/// I - M_x - M_y of the 2D Crank-Nicolson step.
Operator2D operator_2d(const FractionalParams& px, const FractionalParams& py, const Grid1D& gx, const Grid1D& gy,
                       double tau, const DiffusionField2D& fields);

/// Steady counterpart: no identity, r = 1/h^alpha, s = alpha lambda^{alpha-1} / (2h).
Operator2D steady_operator_2d(const FractionalParams& px, const FractionalParams& py, const Grid1D& gx,
                              const Grid1D& gy, const DiffusionField2D& fields);

}  // namespace tfde
