#pragma once

#include "tfde/linear_operator.hpp"
#include "tfde/solve_report.hpp"

#include <Eigen/LU>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace tfde {

/// Interior grid extents; m2 = 1 for 1D problems. Vectors are x-major.
struct GridShape {
    std::size_t m1 = 1;
    std::size_t m2 = 1;
    int dims = 1;

    static GridShape line(std::size_t m) { return {m, 1, 1}; }
    static GridShape square(std::size_t m1, std::size_t m2) { return {m1, m2, 2}; }
    std::size_t size() const { return m1 * m2; }
    /// floor((m-1)/2) in every active dimension: odd m halves exactly.
    GridShape coarsened() const;
    bool operator==(const GridShape&) const = default;
};

/// Linear (1D) or bilinear (2D) interpolation between the fine and coarse
/// node positions on the same interval. For odd m coarse node i sits at fine
/// node 2i+1 (0-based) with stencil [1/2, 1, 1/2]; for even m the grids are
/// not nested and the weights come from the coarse hat functions.
/// Restriction is the transpose.
class TransferOp {
public:
    explicit TransferOp(GridShape fine);

    const GridShape& fine() const { return fine_; }
    const GridShape& coarse() const { return coarse_; }

    void prolong(std::span<const double> coarse, std::span<double> fine) const;
    void restrict(std::span<const double> fine, std::span<double> coarse) const;
    /// P as a fine.size() x coarse.size() sparse matrix.
    const SparseMatrix& matrix() const { return p_; }

private:
    GridShape fine_, coarse_;
    SparseMatrix p_;
};

enum class Coarsening { Geometric, Galerkin };

struct CycleConfig {
    int nu1 = 1;
    int nu2 = 1;
    double omega = 0.7;
    std::size_t min_size = 16;
};

/// Rediscretization of the fine problem on a coarser grid (geometric mode).
using LevelFactory = std::function<OperatorPtr(const GridShape&)>;

/// Caps on the fine size for dense Galerkin products.
inline constexpr std::size_t kGalerkinCap1D = 4096;
inline constexpr std::size_t kGalerkinCap2D = 32;

class Hierarchy {
public:
    struct Level {
        OperatorPtr op;
        GridShape shape;
        Vector inv_diag;
        std::optional<TransferOp> to_coarse;  // empty on the coarsest level
    };

    Hierarchy(std::vector<Level> levels, CycleConfig config, Coarsening mode);

    const std::vector<Level>& levels() const { return levels_; }
    const CycleConfig& config() const { return config_; }
    Coarsening mode() const { return mode_; }
    std::size_t size() const { return levels_.front().op->size(); }
    void coarse_solve(std::span<const double> b, std::span<double> x) const;

private:
    std::vector<Level> levels_;
    CycleConfig config_;
    Coarsening mode_;
    Eigen::PartialPivLU<Eigen::MatrixXd> coarse_lu_;
};

/// u <- u + omega D^{-1} (b - A u), count times. Throws SingularError on a zero diagonal.
void jacobi_sweep(const LinearOperator& op, std::span<double> u, std::span<const double> b, double omega, int count);

/// Geometric levels come from `factory` and are scaled by 2^dims per level,
/// matching the Galerkin product with R = P^T. Galerkin levels are R A P,
/// sparse when the operator is stored sparse and dense otherwise.
Hierarchy build_hierarchy(OperatorPtr fine, GridShape shape, const CycleConfig& config, Coarsening mode,
                          const LevelFactory& factory = {});

/// One V(nu1, nu2) cycle in place.
void v_cycle(const Hierarchy& h, std::span<double> u, std::span<const double> b);

/// Repeated V-cycles until ||r|| / ||r0|| < tol. Starts from x0 when given.
SolveResult mg_solve(const Hierarchy& h, std::span<const double> b, double tol, std::size_t maxit,
                     std::span<const double> x0 = {});

}  // namespace tfde
