#include "tfde/problems.hpp"

#include "tfde/errors.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace tfde {

namespace {

using Clock = std::chrono::steady_clock;

double profile_value(const std::vector<ExpPolyTerm>& terms, double s, double* derivative) {
    double v = 0.0, dv = 0.0;
    for (const auto& t : terms) {
        double pv = 0.0, pd = 0.0;
        for (std::size_t q = t.poly.size(); q-- > 0;) {
            pd = pd * s + pv;
            pv = pv * s + t.poly[q];
        }
        const double e = t.scale * std::exp(t.kappa * s);
        v += e * pv;
        dv += e * (t.kappa * pv + pd);
    }
    if (derivative) *derivative = dv;
    return v;
}

Field constant_field(double c) {
    return [c](double, double, double) { return c; };
}

ProblemSpec one_dimensional_base(int id) {
    ProblemSpec p;
    p.id = id;
    p.dims = 1;
    p.ax = 0.0;
    p.bx = 1.0;
    return p;
}

void apply_overrides(ProblemSpec& p, const Overrides& o) {
    if (o.alpha) p.alpha = *o.alpha;
    if (o.beta) p.beta = *o.beta;
    if (o.lambda1) p.lambda1 = p.lambda2 = *o.lambda1;
    if (o.lambda2) p.lambda2 = *o.lambda2;
    if (o.gamma3) p.gamma3 = *o.gamma3;
    if (o.T) p.T = *o.T;
    if (o.a) p.ax = p.ay = *o.a;
    if (o.b) p.bx = p.by = *o.b;
    if (o.M) {
        p.M1 = *o.M;
        if (p.dims == 2) p.M2 = *o.M;
    }
    if (o.N) p.N = *o.N;
    if (o.forcing) p.forcing = *o.forcing;
}

}  // namespace

ProblemSpec example(int id, const Overrides& o) {
    ProblemSpec p;
    switch (id) {
        case 1: {
            p = one_dimensional_base(1);
            p.alpha = 1.5;
            p.lambda1 = 2.0;
            p.gamma3 = 0.01;
            p.T = 1.0;
            p.M1 = p.N = 128;
            p.c_l = p.c_r = constant_field(1.0);
            p.exact = [](double x, double, double t) { return std::exp(-t) * std::pow(x * (1.0 - x), 3); };
            // x^3 (1-x)^3 is symmetric under x -> 1-x, so both forms agree.
            const Vector poly{0, 0, 0, 1, -3, 3, -1};
            p.profile_left = {{1.0, 0.0, poly}};
            p.profile_right = {{1.0, 0.0, poly}};
            p.time_factor = [](double t) { return std::exp(-t); };
            p.time_factor_dt = [](double t) { return -std::exp(-t); };
            break;
        }
        case 2:
        case 3: {
            p = one_dimensional_base(id);
            p.steady = true;
            p.alpha = 1.4;
            p.lambda1 = 3.0;
            p.gamma3 = 0.00235;
            p.M1 = 512;
            p.N = 1;
            p.c_l = constant_field(id == 2 ? 0.5 : 0.3);
            p.c_r = constant_field(id == 2 ? 0.5 : 0.7);
            p.exact = [](double x, double, double) { return std::pow(1.0 - x, 3) - std::exp(3.0 * x) * (1.0 - x); };
            // s = x: (1-s)^3 - e^{3s}(1-s);  s = 1-x: s^3 - e^3 e^{-3s} s
            p.profile_left = {{1.0, 0.0, {1, -3, 3, -1}}, {-1.0, 3.0, {1, -1}}};
            p.profile_right = {{1.0, 0.0, {0, 0, 0, 1}}, {-std::exp(3.0), -3.0, {0, 1}}};
            p.time_factor = [](double) { return 1.0; };
            p.time_factor_dt = [](double) { return 0.0; };
            break;
        }
        case 4: {
            p.id = 4;
            p.dims = 2;
            p.ax = p.ay = 0.0;
            p.bx = p.by = 2.0;
            p.T = 2.0;
            p.alpha = 1.8;
            p.beta = 1.6;
            p.gamma3 = 0.0235;
            p.lambda1 = p.lambda2 = 1.0;
            p.M1 = p.M2 = p.N = 32;
            break;
        }
        case 5: {
            p.id = 5;
            p.dims = 2;
            p.T = 1.0;
            p.alpha = 1.8;
            p.beta = 1.6;
            p.gamma3 = 0.0235;
            p.lambda1 = p.lambda2 = 1.0;
            p.M1 = p.M2 = p.N = 32;
            p.c_l = p.e_l = constant_field(1.0);
            p.c_r = p.e_r = constant_field(0.0);
            break;
        }
        default: throw DomainError("unknown example id " + std::to_string(id));
    }
    apply_overrides(p, o);
    // Fields that depend on the (possibly overridden) orders and tempering.
    if (id == 4) {
        const double ga = std::tgamma(3.0 - p.alpha), gb = std::tgamma(3.0 - p.beta);
        const double a = p.alpha, b = p.beta;
        p.c_l = [ga, a](double x, double y, double) { return ga * std::pow(1.0 + x, a) * (1.0 + y) * (1.0 + y); };
        p.c_r = [ga, a](double x, double y, double) { return ga * std::pow(3.0 - x, a) * (3.0 - y) * (3.0 - y); };
        p.e_l = [gb, b](double x, double y, double) { return gb * (1.0 + x) * (1.0 + x) * std::pow(1.0 + y, b); };
        p.e_r = [gb, b](double x, double y, double) { return gb * (3.0 - x) * (3.0 - x) * std::pow(3.0 - y, b); };
        p.exact = [](double x, double y, double t) {
            const double q = x * y * (2.0 - x) * (2.0 - y);
            return 16.0 * std::exp(-t) * q * q;
        };
    } else if (id == 5) {
        const double l1 = p.lambda1, l2 = p.lambda2;
        p.exact = [l1, l2](double x, double y, double t) {
            return std::exp(-t - l1 * x - l2 * y) * std::pow(x * y, 4) * (1.0 - x) * (1.0 - y);
        };
    }
    if (p.dims == 2 && p.forcing == ForcingMode::AnalyticSeries) {
        throw DomainError("analytic forcing is only available for the 1D examples");
    }
    return p;
}

Discretization::Discretization(ProblemSpec p) : p_(std::move(p)) {
    if (p_.dims != 1 && p_.dims != 2) throw DomainError("problem dimension must be 1 or 2");
    if (!p_.c_l || !p_.c_r || (p_.dims == 2 && (!p_.e_l || !p_.e_r))) {
        throw DomainError("problem is missing diffusion coefficients");
    }
    gx_ = Grid1D::make(p_.ax, p_.bx, p_.M1);
    px_ = make_params(p_.alpha, p_.gamma3, p_.lambda1);
    if (p_.dims == 2) {
        gy_ = Grid1D::make(p_.ay, p_.by, p_.M2);
        py_ = make_params(p_.beta, p_.gamma3, p_.lambda2);
        shape_ = GridShape::square(p_.M1, p_.M2);
    } else {
        shape_ = GridShape::line(p_.M1);
    }
    tg_ = TimeGrid::make(p_.T, p_.steady ? 1 : p_.N);
}

double Discretization::cell_measure() const { return p_.dims == 1 ? gx_.h : gx_.h * gy_.h; }

DiffusionField1D Discretization::fields_1d(const Grid1D& g, double t) const {
    DiffusionField1D f{Vector(g.M), Vector(g.M)};
    for (std::size_t i = 0; i < g.M; ++i) {
        const double x = g.node(i + 1);
        f.c_l[i] = p_.c_l(x, 0.0, t);
        f.c_r[i] = p_.c_r(x, 0.0, t);
    }
    return f;
}

DiffusionField2D Discretization::fields_2d(const Grid1D& gx, const Grid1D& gy, double t) const {
    const std::size_t n = gx.M * gy.M;
    DiffusionField2D f{Vector(n), Vector(n), Vector(n), Vector(n)};
    for (std::size_t j = 0; j < gy.M; ++j) {
        for (std::size_t i = 0; i < gx.M; ++i) {
            const double x = gx.node(i + 1), y = gy.node(j + 1);
            const std::size_t k = i + gx.M * j;
            f.c_l[k] = p_.c_l(x, y, t);
            f.c_r[k] = p_.c_r(x, y, t);
            f.e_l[k] = p_.e_l(x, y, t);
            f.e_r[k] = p_.e_r(x, y, t);
        }
    }
    return f;
}

SystemContext Discretization::build(const GridShape& shape, double t) const {
    SystemContext ctx;
    if (p_.dims == 1) {
        const Grid1D g = Grid1D::make(p_.ax, p_.bx, shape.m1);
        const auto f = fields_1d(g, t);
        ctx.op1 = std::make_shared<const Operator1D>(p_.steady ? steady_operator(px_, g, f)
                                                                : cn_operator(px_, g, tg_.tau, f));
    } else {
        const Grid1D gx = Grid1D::make(p_.ax, p_.bx, shape.m1);
        const Grid1D gy = Grid1D::make(p_.ay, p_.by, shape.m2);
        const auto f = fields_2d(gx, gy, t);
        ctx.op2 = std::make_shared<const Operator2D>(p_.steady ? steady_operator_2d(px_, py_, gx, gy, f)
                                                               : operator_2d(px_, py_, gx, gy, tg_.tau, f));
    }
    return ctx;
}

SystemContext Discretization::system(double t) const {
    SystemContext ctx = build(shape_, t);
    ctx.factory = [this, t](const GridShape& s) -> OperatorPtr {
        SystemContext c = build(s, t);
        return c.op1 ? OperatorPtr(c.op1) : OperatorPtr(c.op2);
    };
    return ctx;
}

Vector Discretization::exact(double t) const {
    if (!p_.exact) throw DomainError("problem has no exact solution");
    Vector u(size());
    for (std::size_t j = 0; j < shape_.m2; ++j) {
        for (std::size_t i = 0; i < shape_.m1; ++i) {
            const double y = p_.dims == 2 ? gy_.node(j + 1) : 0.0;
            u[i + shape_.m1 * j] = p_.exact(gx_.node(i + 1), y, t);
        }
    }
    return u;
}

Vector Discretization::analytic_forcing(double t) const {
    if (p_.dims != 1 || p_.profile_left.empty() || p_.profile_right.empty() || !p_.time_factor) {
        throw DomainError("analytic forcing needs a 1D problem with a series profile");
    }
    const double a = p_.alpha, lam = p_.lambda1;
    const double adv = a * std::pow(lam, a - 1.0), la = std::pow(lam, a);
    const double tf = p_.time_factor(t), tfd = p_.time_factor_dt(t);
    Vector f(gx_.M);
    for (std::size_t i = 0; i < gx_.M; ++i) {
        const double x = gx_.node(i + 1);
        const double sl = x - p_.ax, sr = p_.bx - x;
        double du = 0.0;
        const double u = profile_value(p_.profile_left, sl, &du);
        const double left = tempered_derivative(p_.profile_left, lam, a, sl) - adv * du - la * u;
        const double right = tempered_derivative(p_.profile_right, lam, a, sr) + adv * du - la * u;
        const double cl = p_.c_l(x, 0.0, t), cr = p_.c_r(x, 0.0, t);
        f[i] = tfd * u - tf * (cl * left + cr * right);
    }
    return f;
}

Vector Discretization::boundary(std::size_t j) const {
    Vector zero(size(), 0.0);
    if (p_.dims != 1 || !p_.exact) return zero;
    const double t0 = p_.steady ? 0.0 : tg_.time(j), t1 = p_.steady ? 0.0 : tg_.time(j + 1);
    const auto value = [&](double x, double t) { return p_.exact(x, 0.0, t); };
    const double ul = p_.steady ? value(gx_.a, 0.0) : value(gx_.a, t0) + value(gx_.a, t1);
    const double ur = p_.steady ? value(gx_.b, 0.0) : value(gx_.b, t0) + value(gx_.b, t1);
    if (ul == 0.0 && ur == 0.0) return zero;
    const SystemContext ctx = build(shape_, t1);
    const auto& op = *ctx.op1;
    // CN: tau F carries tau/(2h^alpha) (sum of both levels); F itself drops the tau.
    const double k = p_.steady ? 1.0 : 1.0 / tg_.tau;
    return boundary_rhs(op.stencil(), gx_, op.coeffs(), ul, ur, k * op.diffusion_scale(), k * op.advection_scale());
}

Vector forcing_discrete(const Discretization& d, std::size_t j) {
    const auto& p = d.problem();
    if (!p.exact) throw DomainError("discrete forcing needs an exact solution");
    const auto& tg = d.time_grid();
    const std::size_t n = d.size();
    Vector f(n);
    if (p.steady) {
        const SystemContext ctx = d.system(0.0);
        ctx.op().apply(d.exact(0.0), f);
        const Vector bt = d.boundary(0);
        for (std::size_t i = 0; i < n; ++i) f[i] -= bt[i];
        return f;
    }
    const double t0 = tg.time(j), t1 = tg.time(j + 1);
    const SystemContext c1 = d.system(t1);
    const SystemContext c0 = p.coeffs_time_dependent ? d.system(t0) : c1;
    const Vector u0 = d.exact(t0), u1 = d.exact(t1);
    Vector e(n);
    c1.op().apply(u1, f);
    if (c0.op1) {
        c0.op1->apply_explicit(u0, e);
    } else {
        c0.op2->apply_explicit(u0, e);
    }
    const Vector bt = d.boundary(j);
    for (std::size_t i = 0; i < n; ++i) f[i] = (f[i] - e[i]) / tg.tau - bt[i];
    return f;
}

Vector Discretization::forcing(std::size_t j) const {
    switch (p_.forcing) {
        case ForcingMode::DiscreteManufactured: return forcing_discrete(*this, j);
        case ForcingMode::AnalyticSeries:
            return analytic_forcing(p_.steady ? 0.0 : tg_.time(j) + 0.5 * tg_.tau);
        case ForcingMode::ExplicitFunction: {
            if (!p_.source) throw DomainError("explicit forcing needs a source function");
            const double t = p_.steady ? 0.0 : tg_.time(j) + 0.5 * tg_.tau;
            Vector f(size());
            for (std::size_t jj = 0; jj < shape_.m2; ++jj) {
                for (std::size_t i = 0; i < shape_.m1; ++i) {
                    const double y = p_.dims == 2 ? gy_.node(jj + 1) : 0.0;
                    f[i + shape_.m1 * jj] = p_.source(gx_.node(i + 1), y, t);
                }
            }
            return f;
        }
    }
    throw DomainError("unknown forcing mode");
}

namespace {

// One linear system and the solver state prepared for it.
class PreparedSolver {
public:
    PreparedSolver(const SystemContext& ctx, const SolverConfig& cfg) : ctx_(ctx), cfg_(cfg) {
        if (cfg.solver == SolverKind::MG) {
            OperatorPtr fine = ctx.op1 ? OperatorPtr(ctx.op1) : OperatorPtr(ctx.op2);
            hier_ = std::make_shared<const Hierarchy>(
                build_hierarchy(fine, ctx.shape(), cfg.cycle, cfg.coarsening, ctx.factory));
        } else {
            prec_ = build_preconditioner(cfg.precond, ctx);
        }
    }

    SolveResult solve(std::span<const double> b, std::span<const double> x0) const {
        switch (cfg_.solver) {
            case SolverKind::MG: return mg_solve(*hier_, b, cfg_.options.tol, cfg_.options.maxit, x0);
            case SolverKind::CG: return cg(ctx_.op(), *prec_, b, x0, cfg_.options);
            case SolverKind::GMRES: return gmres(ctx_.op(), *prec_, b, x0, cfg_.options);
        }
        throw DomainError("unknown solver");
    }

private:
    SystemContext ctx_;
    SolverConfig cfg_;
    std::shared_ptr<const Hierarchy> hier_;
    std::unique_ptr<Preconditioner> prec_;
};

void finish(const Discretization& d, RunOutcome& out, double t_final) {
    if (d.problem().exact) {
        const Vector ex = d.exact(t_final);
        const auto [einf, el2] = error_norms(out.u, ex, d.cell_measure());
        out.error_inf = einf;
        out.error_l2 = el2;
    }
}

}  // namespace

RunOutcome steady_solve(const Discretization& d, const SolverConfig& cfg) {
    if (!d.problem().steady) throw DomainError("steady_solve on a time-dependent problem");
    const auto t0 = Clock::now();
    const SystemContext ctx = d.system(0.0);
    Vector b = d.forcing(0);
    const Vector bt = d.boundary(0);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += bt[i];
    const PreparedSolver solver(ctx, cfg);
    SolveResult res = solver.solve(b, {});
    if (!res.report.converged) throw ConvergenceError("steady solve did not converge");
    RunOutcome out;
    out.u = std::move(res.x);
    out.report = res.report;
    out.step_iterations = {res.report.iterations};
    out.avg_iterations = static_cast<double>(res.report.iterations);
    out.cpu_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    finish(d, out, 0.0);
    return out;
}

RunOutcome cn_march(const Discretization& d, const SolverConfig& cfg) {
    const auto& p = d.problem();
    if (p.steady) throw DomainError("cn_march on a steady problem");
    const auto t0 = Clock::now();
    const auto& tg = d.time_grid();
    const std::size_t n = d.size();

    RunOutcome out;
    if (p.initial) {
        out.u.resize(n);
        for (std::size_t j = 0; j < d.shape().m2; ++j) {
            for (std::size_t i = 0; i < d.shape().m1; ++i) {
                const double y = p.dims == 2 ? d.grid_y().node(j + 1) : 0.0;
                out.u[i + d.shape().m1 * j] = p.initial(d.grid_x().node(i + 1), y, 0.0);
            }
        }
    } else {
        out.u = d.exact(0.0);
    }

    SystemContext ctx = d.system(tg.time(1));
    auto solver = std::make_unique<PreparedSolver>(ctx, cfg);
    SystemContext prev = p.coeffs_time_dependent ? d.system(0.0) : ctx;
    Vector rhs(n);
    for (std::size_t j = 0; j < tg.N; ++j) {
        if (p.coeffs_time_dependent && j > 0) {
            prev = ctx;
            ctx = d.system(tg.time(j + 1));
            solver = std::make_unique<PreparedSolver>(ctx, cfg);
        }
        if (prev.op1) {
            prev.op1->apply_explicit(out.u, rhs);
        } else {
            prev.op2->apply_explicit(out.u, rhs);
        }
        const Vector f = d.forcing(j);
        const Vector bt = d.boundary(j);
        for (std::size_t i = 0; i < n; ++i) rhs[i] += tg.tau * (f[i] + bt[i]);
        SolveResult res = solver->solve(rhs, out.u);
        if (!res.report.converged) {
            throw ConvergenceError("time step " + std::to_string(j + 1) + " did not converge");
        }
        out.u = std::move(res.x);
        out.step_iterations.push_back(res.report.iterations);
        out.report.iterations += res.report.iterations;
        out.report.final_relres = res.report.final_relres;
        out.report.history.push_back(static_cast<double>(res.report.iterations));
    }
    out.report.converged = true;
    out.avg_iterations = static_cast<double>(out.report.iterations) / static_cast<double>(tg.N);
    out.cpu_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.report.seconds = out.cpu_seconds;
    finish(d, out, tg.T);
    return out;
}

RunOutcome run_problem(const Discretization& d, const SolverConfig& cfg) {
    return d.problem().steady ? steady_solve(d, cfg) : cn_march(d, cfg);
}

std::pair<double, double> error_norms(std::span<const double> numeric, std::span<const double> exact, double measure) {
    require_size(numeric.size(), exact.size(), "error_norms");
    double inf = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double e = numeric[i] - exact[i];
        inf = std::max(inf, std::abs(e));
        sq += e * e;
    }
    return {inf, std::sqrt(measure * sq)};
}

}  // namespace tfde
