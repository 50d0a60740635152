#pragma once

#include "tfde/multigrid.hpp"
#include "tfde/operator2d.hpp"
#include "tfde/solve_report.hpp"
#include "tfde/stencil.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace tfde {

/// Linear approximation of A^{-1}.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual std::size_t size() const = 0;
    virtual void apply_inverse(std::span<const double> r, std::span<double> z) const = 0;
};

class IdentityPreconditioner final : public Preconditioner {
public:
    explicit IdentityPreconditioner(std::size_t n) : n_(n) {}
    std::size_t size() const override { return n_; }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override;

private:
    std::size_t n_;
};

/// `cycles` V-cycles from a zero initial guess.
class MultigridPreconditioner final : public Preconditioner {
public:
    explicit MultigridPreconditioner(std::shared_ptr<const Hierarchy> h, int cycles = 1);
    std::size_t size() const override { return h_->size(); }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override;
    const Hierarchy& hierarchy() const { return *h_; }

private:
    std::shared_ptr<const Hierarchy> h_;
    int cycles_;
};

enum class ResidualReference {
    InitialResidual,  ///< ||r_k|| / ||r_0||
    RightHandSide     ///< ||r_k|| / ||b|| (preconditioned norms for GMRES)
};

struct SolverOptions {
    double tol = 1e-7;
    std::size_t maxit = 1000;
    ResidualReference reference = ResidualReference::InitialResidual;
};

/// Preconditioned CG; stops on the true relative residual. Breakdown
/// (p^T A p <= 0) ends the solve unconverged.
SolveResult cg(const LinearOperator& op, const Preconditioner& prec, std::span<const double> b,
               std::span<const double> x0, const SolverOptions& opts = {});

/// Full GMRES with modified Gram-Schmidt and left preconditioning; stops on
/// the preconditioned relative residual.
SolveResult gmres(const LinearOperator& op, const Preconditioner& prec, std::span<const double> b,
                  std::span<const double> x0, const SolverOptions& opts = {});

struct PreconditionerSpec {
    enum class Kind { Identity, Multigrid, Circulant, LaplacianExact, LaplacianInner };

    Kind kind = Kind::Identity;
    CycleConfig cycle{};                        // Multigrid
    Coarsening coarsening = Coarsening::Geometric;  // Multigrid
    int inner_cycles = 1;                       // LaplacianInner

    /// none | mg:nu1,nu2 | circulant | laplacian | laplacian-inner:nu
    static PreconditionerSpec parse(std::string_view text);
    std::string label() const;
};

/// The system to precondition: one of the two operators, plus the
/// rediscretization used by geometric multigrid.
struct SystemContext {
    std::shared_ptr<const Operator1D> op1;
    std::shared_ptr<const Operator2D> op2;
    LevelFactory factory;

    const LinearOperator& op() const;
    GridShape shape() const;
};

std::unique_ptr<Preconditioner> build_preconditioner(const PreconditionerSpec& spec, const SystemContext& ctx);

/// Toeplitz form of an Operator1D with coefficients replaced by their means.
ToeplitzDescriptor mean_toeplitz(const Operator1D& op);

/// I - r1 (C_l + C_r)(I (x) L) - r2 (E_l + E_r)(L (x) I), L = tridiag{1,-2,1}.
SparseMatrix laplacian_2d(const Operator2D& op);
/// w I - r (C_l + C_r) L
SparseMatrix laplacian_1d(const Operator1D& op);

}  // namespace tfde
