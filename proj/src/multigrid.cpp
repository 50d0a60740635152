#include "tfde/multigrid.hpp"

#include "tfde/errors.hpp"
#include "tfde/fastlinalg.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace tfde {

namespace {

using Triplet = Eigen::Triplet<double>;
// Odd M halves exactly; even M drops to M/2 - 1 so every coarser level is odd
// and nested in the one above it.
std::size_t coarse_size(std::size_t m) { return m == 0 ? 0 : (m - 1) / 2; }

// Linear interpolation from the coarse grid h_c = 1/(m+1) to the fine grid
// h = 1/(M+1), both on the unit interval. For odd M this is exactly the
// [1/2, 1, 1/2] stencil on fine nodes 2i+1; for even M the grids are not
// nested and the weights follow the coarse hat functions, so the coarse space
// matches a rediscretization on the same interval.
SparseMatrix prolongation_1d(std::size_t fine) {
    const std::size_t coarse = coarse_size(fine);
    std::vector<Triplet> t;
    t.reserve(2 * fine);
    const std::size_t den = fine + 1;
    for (std::size_t i = 0; i < fine; ++i) {
        // fine node i sits at coarse coordinate q = (i+1)(m+1)/(M+1); coarse node j at q = j+1
        const std::size_t num = (i + 1) * (coarse + 1);
        const std::size_t left = num / den;
        const double frac = static_cast<double>(num % den) / static_cast<double>(den);
        if (left >= 1 && frac < 1.0) t.emplace_back(i, left - 1, 1.0 - frac);
        if (left < coarse && frac > 0.0) t.emplace_back(i, left, frac);
    }
    SparseMatrix p(static_cast<Eigen::Index>(fine), static_cast<Eigen::Index>(coarse));
    p.setFromTriplets(t.begin(), t.end());
    return p;
}

// P_y (x) P_x for x-major ordering.
SparseMatrix kron(const SparseMatrix& py, const SparseMatrix& px) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(py.nonZeros() * px.nonZeros()));
    for (Eigen::Index ky = 0; ky < py.outerSize(); ++ky) {
        for (SparseMatrix::InnerIterator iy(py, ky); iy; ++iy) {
            for (Eigen::Index kx = 0; kx < px.outerSize(); ++kx) {
                for (SparseMatrix::InnerIterator ix(px, kx); ix; ++ix) {
                    t.emplace_back(ix.row() + px.rows() * iy.row(), ix.col() + px.cols() * iy.col(),
                                   iy.value() * ix.value());
                }
            }
        }
    }
    SparseMatrix p(py.rows() * px.rows(), py.cols() * px.cols());
    p.setFromTriplets(t.begin(), t.end());
    return p;
}

Eigen::Map<const Eigen::VectorXd> view(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}
Eigen::Map<Eigen::VectorXd> view(std::span<double> v) { return {v.data(), static_cast<Eigen::Index>(v.size())}; }

Vector inverse_diagonal(const LinearOperator& op) {
    Vector d = op.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0) throw SingularError("zero diagonal entry", i);
        d[i] = 1.0 / d[i];
    }
    return d;
}

void smooth(const LinearOperator& op, const Vector& inv_diag, std::span<double> u, std::span<const double> b,
            double omega, int count, Vector& r) {
    for (int s = 0; s < count; ++s) {
        op.apply(u, r);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += omega * inv_diag[i] * (b[i] - r[i]);
    }
}

OperatorPtr galerkin_product(const LinearOperator& a, const GridShape& shape, const TransferOp& t) {
    const SparseMatrix& p = t.matrix();
    if (const SparseMatrix* s = a.sparse()) {
        SparseMatrix rap = SparseMatrix(p.transpose()) * (*s) * p;
        rap.makeCompressed();
        return std::make_shared<SparseOperator>(std::move(rap));
    }
    if (const auto* d = dynamic_cast<const DenseOperator*>(&a)) {
        Eigen::MatrixXd ap = d->matrix() * p;
        return std::make_shared<DenseOperator>(Eigen::MatrixXd(p.transpose() * ap));
    }
    const bool over = shape.dims == 1 ? shape.m1 > kGalerkinCap1D
                                      : (shape.m1 > kGalerkinCap2D || shape.m2 > kGalerkinCap2D);
    if (over) throw DomainError("galerkin coarsening requested above its size cap");
    const auto n = static_cast<Eigen::Index>(a.size());
    const auto m = p.cols();
    Eigen::MatrixXd ap(n, m);
    Vector col(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < m; ++j) {
        view(std::span<double>(col)) = p.col(j);
        a.apply(col, out);
        ap.col(j) = view(std::span<const double>(out));
    }
    return std::make_shared<DenseOperator>(Eigen::MatrixXd(p.transpose() * ap));
}

void cycle(const Hierarchy& h, std::size_t l, std::span<double> u, std::span<const double> b) {
    const auto& levels = h.levels();
    const auto& lev = levels[l];
    if (l + 1 == levels.size()) {
        h.coarse_solve(b, u);
        return;
    }
    const auto& cfg = h.config();
    const std::size_t n = u.size();
    Vector r(n);
    smooth(*lev.op, lev.inv_diag, u, b, cfg.omega, cfg.nu1, r);
    lev.op->apply(u, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const std::size_t m = lev.to_coarse->coarse().size();
    Vector bc(m), ec(m, 0.0), corr(n);
    lev.to_coarse->restrict(r, bc);
    cycle(h, l + 1, ec, bc);
    lev.to_coarse->prolong(ec, corr);
    for (std::size_t i = 0; i < n; ++i) u[i] += corr[i];
    smooth(*lev.op, lev.inv_diag, u, b, cfg.omega, cfg.nu2, r);
}

}  // namespace

GridShape GridShape::coarsened() const { return {coarse_size(m1), dims == 2 ? coarse_size(m2) : 1, dims}; }

TransferOp::TransferOp(GridShape fine) : fine_(fine), coarse_(fine.coarsened()) {
    if (coarse_.size() == 0) throw DomainError("TransferOp: grid too small to coarsen");
    p_ = fine.dims == 1 ? prolongation_1d(fine.m1) : kron(prolongation_1d(fine.m2), prolongation_1d(fine.m1));
    p_.makeCompressed();
}

void TransferOp::prolong(std::span<const double> coarse, std::span<double> fine) const {
    require_size(coarse.size(), coarse_.size(), "prolong input");
    require_size(fine.size(), fine_.size(), "prolong output");
    view(fine) = p_ * view(coarse);
}

void TransferOp::restrict(std::span<const double> fine, std::span<double> coarse) const {
    require_size(fine.size(), fine_.size(), "restrict input");
    require_size(coarse.size(), coarse_.size(), "restrict output");
    view(coarse) = p_.transpose() * view(fine);
}

Hierarchy::Hierarchy(std::vector<Level> levels, CycleConfig config, Coarsening mode)
    : levels_(std::move(levels)), config_(config), mode_(mode) {
    if (levels_.empty()) throw DomainError("Hierarchy: no levels");
    coarse_lu_.compute(materialize_dense(*levels_.back().op));
}

void Hierarchy::coarse_solve(std::span<const double> b, std::span<double> x) const {
    view(x) = coarse_lu_.solve(view(b));
}

void jacobi_sweep(const LinearOperator& op, std::span<double> u, std::span<const double> b, double omega, int count) {
    require_size(u.size(), op.size(), "jacobi_sweep u");
    require_size(b.size(), op.size(), "jacobi_sweep b");
    if (count < 1) throw DomainError("jacobi_sweep: count must be at least 1");
    Vector r(u.size());
    smooth(op, inverse_diagonal(op), u, b, omega, count, r);
}

Hierarchy build_hierarchy(OperatorPtr fine, GridShape shape, const CycleConfig& config, Coarsening mode,
                          const LevelFactory& factory) {
    if (!fine) throw DomainError("build_hierarchy: null operator");
    require_size(fine->size(), shape.size(), "build_hierarchy shape");
    if (config.nu1 < 0 || config.nu2 < 0 || config.nu1 + config.nu2 == 0) {
        throw DomainError("build_hierarchy: smoothing counts must be nonnegative and not both zero");
    }
    if (!(config.omega > 0.0)) throw DomainError("build_hierarchy: omega must be positive");
    if (mode == Coarsening::Geometric && !factory) throw DomainError("build_hierarchy: geometric mode needs a factory");

    std::vector<Hierarchy::Level> levels;
    levels.push_back({fine, shape, inverse_diagonal(*fine), std::nullopt});
    double scale = 1.0;
    while (true) {
        const GridShape cur = levels.back().shape;
        const GridShape next = cur.coarsened();
        if (cur.size() <= config.min_size || next.size() == 0) break;
        levels.back().to_coarse.emplace(cur);
        OperatorPtr op;
        if (mode == Coarsening::Galerkin) {
            op = galerkin_product(*levels.back().op, cur, *levels.back().to_coarse);
        } else {
            scale *= std::pow(2.0, cur.dims);
            op = std::make_shared<ScaledOperator>(factory(next), scale);
            require_size(op->size(), next.size(), "coarse operator from factory");
        }
        levels.push_back({op, next, inverse_diagonal(*op), std::nullopt});
    }
    return Hierarchy(std::move(levels), config, mode);
}

void v_cycle(const Hierarchy& h, std::span<double> u, std::span<const double> b) {
    require_size(u.size(), h.size(), "v_cycle u");
    require_size(b.size(), h.size(), "v_cycle b");
    cycle(h, 0, u, b);
}

SolveResult mg_solve(const Hierarchy& h, std::span<const double> b, double tol, std::size_t maxit,
                     std::span<const double> x0) {
    if (!(tol > 0.0)) throw DomainError("mg_solve: tol must be positive");
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = h.size();
    require_size(b.size(), n, "mg_solve b");
    SolveResult res;
    res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
    require_size(res.x.size(), n, "mg_solve x0");
    const LinearOperator& a = *h.levels().front().op;
    Vector r(n);
    auto residual = [&] {
        a.apply(res.x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        return norm2(r);
    };
    const double r0 = residual();
    auto& rep = res.report;
    rep.history.push_back(1.0);
    if (r0 == 0.0) {
        rep.converged = true;
    } else {
        while (rep.iterations < maxit) {
            v_cycle(h, res.x, b);
            ++rep.iterations;
            const double rel = residual() / r0;
            rep.history.push_back(rel);
            if (rel < tol) {
                rep.converged = true;
                break;
            }
            if (!std::isfinite(rel)) break;
        }
    }
    rep.final_relres = rep.history.back();
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace tfde
