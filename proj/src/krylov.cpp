#include "tfde/krylov.hpp"

#include "tfde/errors.hpp"
#include "tfde/fastlinalg.hpp"

#include <Eigen/SparseLU>

#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace tfde {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Coefficient of H = tridiag{-1, 0, 1} on diagonal offset k = i - j.
double h_coeff(std::ptrdiff_t k) { return k == 1 ? -1.0 : (k == -1 ? 1.0 : 0.0); }

double mean(const Vector& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double true_relres(const LinearOperator& op, std::span<const double> b, std::span<const double> x, double base) {
    Vector r(b.size());
    op.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const double nr = norm2(r);
    return base > 0.0 ? nr / base : nr;
}

class TridiagPreconditioner final : public Preconditioner {
public:
    TridiagPreconditioner(Vector lower, Vector diag, Vector upper)
        : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {}
    std::size_t size() const override { return diag_.size(); }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override {
        const Vector x = tridiag_solve(lower_, diag_, upper_, r);
        std::copy(x.begin(), x.end(), z.begin());
    }

private:
    Vector lower_, diag_, upper_;
};

class SparseLUPreconditioner final : public Preconditioner {
public:
    explicit SparseLUPreconditioner(const SparseMatrix& a) {
        lu_.compute(a);
        if (lu_.info() != Eigen::Success) throw SingularError("sparse LU factorization failed", 0);
    }
    std::size_t size() const override { return static_cast<std::size_t>(lu_.rows()); }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override {
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
        Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size())) = lu_.solve(rv);
    }

private:
    Eigen::SparseLU<SparseMatrix> lu_;
};

class Circulant1DPreconditioner final : public Preconditioner {
public:
    explicit Circulant1DPreconditioner(CirculantDescriptor c) : c_(std::move(c)) {
        circulant_solve(c_, Vector(c_.size(), 0.0));  // rejects singular spectra up front
    }
    std::size_t size() const override { return c_.size(); }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override {
        const Vector x = circulant_solve(c_, r);
        std::copy(x.begin(), x.end(), z.begin());
    }

private:
    CirculantDescriptor c_;
};

// I - r1 c+ (I (x) (C+C^T)) - r2 e+ ((C+C^T) (x) I), diagonalized by the 2D DFT.
class Circulant2DPreconditioner final : public Preconditioner {
public:
    explicit Circulant2DPreconditioner(const Operator2D& op) : m1_(op.m1()), m2_(op.m2()) {
        const auto& f = op.fields();
        const double cp = 0.5 * (mean(f.c_l) + mean(f.c_r));
        const double ep = 0.5 * (mean(f.e_l) + mean(f.e_r));
        const Vector ex = chan_circulant(op.toeplitz_x()).symmetric_part_eigenvalues();
        const Vector ey = chan_circulant(op.toeplitz_y()).symmetric_part_eigenvalues();
        const auto& sc = op.scales();
        fft_ = real_fft_2d(m1_, m2_);
        const std::size_t h1 = m1_ / 2 + 1;
        eig_.resize(h1 * m2_);
        double largest = 0.0;
        for (std::size_t j2 = 0; j2 < m2_; ++j2) {
            for (std::size_t j1 = 0; j1 < h1; ++j1) {
                const double v = sc.identity - sc.r1 * cp * ex[j1] - sc.r2 * ep * ey[j2];
                eig_[j1 + h1 * j2] = v;
                largest = std::max(largest, std::abs(v));
            }
        }
        for (std::size_t k = 0; k < eig_.size(); ++k) {
            if (std::abs(eig_[k]) <= 1e-14 * largest) throw SingularError("2D circulant preconditioner: zero mode", k);
        }
    }
    std::size_t size() const override { return m1_ * m2_; }
    void apply_inverse(std::span<const double> r, std::span<double> z) const override {
        std::vector<Complex> spec(fft_->spectrum_size());
        fft_->forward(r, spec);
        const double norm = 1.0 / static_cast<double>(m1_ * m2_);
        for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= norm / eig_[k];
        fft_->inverse(spec, z);
    }

private:
    std::size_t m1_, m2_;
    std::shared_ptr<const RealFft2D> fft_;
    Vector eig_;
};

Hierarchy laplacian_hierarchy(const SparseMatrix& p2, GridShape shape) {
    CycleConfig cfg;
    cfg.nu1 = 0;
    cfg.nu2 = 1;
    cfg.omega = 0.8;
    return build_hierarchy(std::make_shared<SparseOperator>(p2), shape, cfg, Coarsening::Galerkin);
}

}  // namespace

void IdentityPreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const {
    require_size(r.size(), n_, "identity preconditioner");
    std::copy(r.begin(), r.end(), z.begin());
}

MultigridPreconditioner::MultigridPreconditioner(std::shared_ptr<const Hierarchy> h, int cycles)
    : h_(std::move(h)), cycles_(cycles) {
    if (!h_) throw DomainError("MultigridPreconditioner: null hierarchy");
    if (cycles_ < 1) throw DomainError("MultigridPreconditioner: cycles must be at least 1");
}

void MultigridPreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const {
    std::fill(z.begin(), z.end(), 0.0);
    for (int c = 0; c < cycles_; ++c) v_cycle(*h_, z, r);
}

SolveResult cg(const LinearOperator& op, const Preconditioner& prec, std::span<const double> b,
               std::span<const double> x0, const SolverOptions& opts) {
    const auto t0 = Clock::now();
    const std::size_t n = op.size();
    require_size(b.size(), n, "cg b");
    require_size(prec.size(), n, "cg preconditioner");
    SolveResult res;
    res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
    require_size(res.x.size(), n, "cg x0");
    auto& rep = res.report;

    Vector r(n), z(n), p(n), ap(n);
    op.apply(res.x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double r0 = norm2(r);
    const double ref = opts.reference == ResidualReference::InitialResidual ? r0 : norm2(b);
    rep.history.push_back(ref > 0.0 ? r0 / ref : 0.0);
    if (r0 == 0.0 || ref == 0.0) {
        rep.converged = true;
    } else {
        prec.apply_inverse(r, z);
        p = z;
        double rz = dot(r, z);
        while (rep.iterations < opts.maxit) {
            op.apply(p, ap);
            const double pap = dot(p, ap);
            if (!(pap > 0.0)) break;
            const double a = rz / pap;
            axpy(a, p, res.x);
            axpy(-a, ap, r);
            ++rep.iterations;
            const double rel = norm2(r) / ref;
            rep.history.push_back(rel);
            if (rel < opts.tol) {
                rep.converged = true;
                break;
            }
            prec.apply_inverse(r, z);
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }
    rep.final_relres = true_relres(op, b, res.x, r0 > 0.0 ? r0 : norm2(b));
    rep.seconds = seconds_since(t0);
    return res;
}

SolveResult gmres(const LinearOperator& op, const Preconditioner& prec, std::span<const double> b,
                  std::span<const double> x0, const SolverOptions& opts) {
    const auto t0 = Clock::now();
    const std::size_t n = op.size();
    require_size(b.size(), n, "gmres b");
    require_size(prec.size(), n, "gmres preconditioner");
    SolveResult res;
    res.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
    require_size(res.x.size(), n, "gmres x0");
    auto& rep = res.report;

    Vector tmp(n), w(n);
    op.apply(res.x, tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
    const double true_r0 = norm2(tmp);
    Vector r(n);
    prec.apply_inverse(tmp, r);
    const double beta = norm2(r);
    double ref = beta;
    if (opts.reference == ResidualReference::RightHandSide) {
        prec.apply_inverse(b, w);
        ref = norm2(w);
    }
    rep.history.push_back(ref > 0.0 ? beta / ref : 0.0);
    if (beta == 0.0 || ref == 0.0) {
        rep.converged = true;
        rep.final_relres = true_relres(op, b, res.x, true_r0 > 0.0 ? true_r0 : norm2(b));
        rep.seconds = seconds_since(t0);
        return res;
    }

    const std::size_t kmax = std::min(opts.maxit, n);
    std::vector<Vector> v;
    v.reserve(kmax + 1);
    v.emplace_back(r);
    for (double& x : v[0]) x /= beta;
    // Hessenberg columns after Givens rotation: column j has j+2 entries.
    std::vector<Vector> hcol;
    Vector cs, sn, g{beta};
    std::size_t k = 0;
    while (k < kmax) {
        op.apply(v[k], tmp);
        prec.apply_inverse(tmp, w);
        Vector hk(k + 2, 0.0);
        for (std::size_t i = 0; i <= k; ++i) {
            hk[i] = dot(w, v[i]);
            axpy(-hk[i], v[i], w);
        }
        hk[k + 1] = norm2(w);
        for (std::size_t i = 0; i < k; ++i) {
            const double t = cs[i] * hk[i] + sn[i] * hk[i + 1];
            hk[i + 1] = -sn[i] * hk[i] + cs[i] * hk[i + 1];
            hk[i] = t;
        }
        const double denom = std::hypot(hk[k], hk[k + 1]);
        const double happy = hk[k + 1];
        cs.push_back(denom == 0.0 ? 1.0 : hk[k] / denom);
        sn.push_back(denom == 0.0 ? 0.0 : hk[k + 1] / denom);
        hk[k] = denom;
        hk[k + 1] = 0.0;
        g.push_back(-sn[k] * g[k]);
        g[k] *= cs[k];
        hcol.push_back(std::move(hk));
        ++k;
        const double rel = std::abs(g[k]) / ref;
        rep.history.push_back(rel);
        if (rel < opts.tol || happy <= 1e-14 * beta) {
            rep.converged = true;
            break;
        }
        v.emplace_back(w);
        for (double& x : v.back()) x /= happy;
    }
    // Back substitution on the k x k triangle.
    Vector y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double s = g[i];
        for (std::size_t j = i + 1; j < k; ++j) s -= hcol[j][i] * y[j];
        y[i] = hcol[i][i] == 0.0 ? 0.0 : s / hcol[i][i];
    }
    for (std::size_t j = 0; j < k; ++j) axpy(y[j], v[j], res.x);
    rep.iterations = k;
    rep.final_relres = true_relres(op, b, res.x, true_r0);
    rep.seconds = seconds_since(t0);
    return res;
}

PreconditionerSpec PreconditionerSpec::parse(std::string_view text) {
    PreconditionerSpec s;
    auto integer = [&](std::string_view v) {
        int out = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
            throw DomainError("malformed preconditioner '" + std::string(text) + "'");
        }
        return out;
    };
    if (text == "none" || text == "identity") return s;
    if (text == "circulant") {
        s.kind = Kind::Circulant;
        return s;
    }
    if (text == "laplacian") {
        s.kind = Kind::LaplacianExact;
        return s;
    }
    if (text.starts_with("laplacian-inner")) {
        s.kind = Kind::LaplacianInner;
        const auto rest = text.substr(std::string_view("laplacian-inner").size());
        if (!rest.empty()) {
            if (rest[0] != ':') throw DomainError("malformed preconditioner '" + std::string(text) + "'");
            s.inner_cycles = integer(rest.substr(1));
        }
        if (s.inner_cycles < 1) throw DomainError("laplacian-inner needs at least one cycle");
        return s;
    }
    if (text.starts_with("mg")) {
        s.kind = Kind::Multigrid;
        auto rest = text.substr(2);
        if (!rest.empty()) {
            const auto comma = rest.find(',');
            if (rest[0] != ':' || comma == std::string_view::npos) {
                throw DomainError("malformed preconditioner '" + std::string(text) + "'");
            }
            s.cycle.nu1 = integer(rest.substr(1, comma - 1));
            s.cycle.nu2 = integer(rest.substr(comma + 1));
        }
        return s;
    }
    throw DomainError("unknown preconditioner '" + std::string(text) + "'");
}

std::string PreconditionerSpec::label() const {
    switch (kind) {
        case Kind::Identity: return "none";
        case Kind::Multigrid:
            return "mg:" + std::to_string(cycle.nu1) + "," + std::to_string(cycle.nu2);
        case Kind::Circulant: return "circulant";
        case Kind::LaplacianExact: return "laplacian";
        case Kind::LaplacianInner: return "laplacian-inner:" + std::to_string(inner_cycles);
    }
    return "none";
}

const LinearOperator& SystemContext::op() const {
    if (op1) return *op1;
    if (op2) return *op2;
    throw DomainError("SystemContext: no operator");
}

GridShape SystemContext::shape() const {
    if (op1) return GridShape::line(op1->size());
    if (op2) return GridShape::square(op2->m1(), op2->m2());
    throw DomainError("SystemContext: no operator");
}

ToeplitzDescriptor mean_toeplitz(const Operator1D& op) {
    const double cl = mean(op.coeffs().c_l), cr = mean(op.coeffs().c_r);
    const auto& b = op.toeplitz();
    const std::size_t m = op.size();
    const double w = op.identity_weight(), r = op.diffusion_scale(), s = op.advection_scale();
    auto coeff = [&](std::ptrdiff_t k) {
        return (k == 0 ? w : 0.0) - r * (cl * b.coefficient(k) + cr * b.coefficient(-k)) + s * (cl - cr) * h_coeff(k);
    };
    Vector col(m), row(m);
    for (std::size_t k = 0; k < m; ++k) {
        col[k] = coeff(static_cast<std::ptrdiff_t>(k));
        row[k] = coeff(-static_cast<std::ptrdiff_t>(k));
    }
    return make_toeplitz(std::move(col), std::move(row));
}

SparseMatrix laplacian_1d(const Operator1D& op) {
    const std::size_t m = op.size();
    const double w = op.identity_weight(), r = op.diffusion_scale();
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t i = 0; i < m; ++i) {
        const double c = r * (op.coeffs().c_l[i] + op.coeffs().c_r[i]);
        const auto ii = static_cast<Eigen::Index>(i);
        t.emplace_back(ii, ii, w + 2.0 * c);
        if (i > 0) t.emplace_back(ii, ii - 1, -c);
        if (i + 1 < m) t.emplace_back(ii, ii + 1, -c);
    }
    SparseMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseMatrix laplacian_2d(const Operator2D& op) {
    const std::size_t m1 = op.m1(), m2 = op.m2();
    const auto& f = op.fields();
    const auto& sc = op.scales();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * m1 * m2);
    for (std::size_t j = 0; j < m2; ++j) {
        for (std::size_t i = 0; i < m1; ++i) {
            const std::size_t k = i + m1 * j;
            const double cx = sc.r1 * (f.c_l[k] + f.c_r[k]);
            const double cy = sc.r2 * (f.e_l[k] + f.e_r[k]);
            const auto kk = static_cast<Eigen::Index>(k);
            const auto st = static_cast<Eigen::Index>(m1);
            t.emplace_back(kk, kk, sc.identity + 2.0 * cx + 2.0 * cy);
            if (i > 0) t.emplace_back(kk, kk - 1, -cx);
            if (i + 1 < m1) t.emplace_back(kk, kk + 1, -cx);
            if (j > 0) t.emplace_back(kk, kk - st, -cy);
            if (j + 1 < m2) t.emplace_back(kk, kk + st, -cy);
        }
    }
    const auto n = static_cast<Eigen::Index>(m1 * m2);
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

std::unique_ptr<Preconditioner> build_preconditioner(const PreconditionerSpec& spec, const SystemContext& ctx) {
    const LinearOperator& a = ctx.op();
    using Kind = PreconditionerSpec::Kind;
    switch (spec.kind) {
        case Kind::Identity: return std::make_unique<IdentityPreconditioner>(a.size());
        case Kind::Multigrid: {
            OperatorPtr fine = ctx.op1 ? OperatorPtr(ctx.op1) : OperatorPtr(ctx.op2);
            auto h = std::make_shared<const Hierarchy>(
                build_hierarchy(fine, ctx.shape(), spec.cycle, spec.coarsening, ctx.factory));
            return std::make_unique<MultigridPreconditioner>(std::move(h));
        }
        case Kind::Circulant:
            if (ctx.op1) return std::make_unique<Circulant1DPreconditioner>(chan_circulant(mean_toeplitz(*ctx.op1)));
            return std::make_unique<Circulant2DPreconditioner>(*ctx.op2);
        case Kind::LaplacianExact: {
            if (ctx.op1) {
                const SparseMatrix l = laplacian_1d(*ctx.op1);
                const std::size_t m = a.size();
                Vector lo(m > 0 ? m - 1 : 0), d(m), up(m > 0 ? m - 1 : 0);
                for (std::size_t i = 0; i < m; ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    d[i] = l.coeff(ii, ii);
                    if (i + 1 < m) {
                        lo[i] = l.coeff(ii + 1, ii);
                        up[i] = l.coeff(ii, ii + 1);
                    }
                }
                return std::make_unique<TridiagPreconditioner>(std::move(lo), std::move(d), std::move(up));
            }
            return std::make_unique<SparseLUPreconditioner>(laplacian_2d(*ctx.op2));
        }
        case Kind::LaplacianInner: {
            const SparseMatrix l = ctx.op1 ? laplacian_1d(*ctx.op1) : laplacian_2d(*ctx.op2);
            auto h = std::make_shared<const Hierarchy>(laplacian_hierarchy(l, ctx.shape()));
            return std::make_unique<MultigridPreconditioner>(std::move(h), spec.inner_cycles);
        }
    }
    throw DomainError("build_preconditioner: unknown kind");
}

}  // namespace tfde
