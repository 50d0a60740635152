#include "tfde/experiment.hpp"

#include "tfde/errors.hpp"
#include "tfde/symbol.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace tfde {

std::string solver_label(SolverKind s) {
    switch (s) {
        case SolverKind::CG: return "cg";
        case SolverKind::GMRES: return "gmres";
        case SolverKind::MG: return "mg";
    }
    return "?";
}

std::string precond_label(const SolverConfig& c) {
    const auto coarsening = [](Coarsening m) { return m == Coarsening::Galerkin ? "/galerkin" : "/geometric"; };
    if (c.solver == SolverKind::MG) {
        return "mg:" + std::to_string(c.cycle.nu1) + "," + std::to_string(c.cycle.nu2) + coarsening(c.coarsening);
    }
    std::string s = c.precond.label();
    if (c.precond.kind == PreconditionerSpec::Kind::Multigrid) s += coarsening(c.precond.coarsening);
    return s;
}

double auto_omega(const ProblemSpec& p) {
    SymbolSpec s;
    s.alpha = p.alpha;
    s.gamma3 = p.gamma3;
    if (p.dims == 2) {
        s.beta = p.beta;
        return smoothing_bound(s, 2).omega_star;
    }
    return smoothing_bound(s, 1).omega_star;
}

ResultRow run_one(const RunSpec& spec, std::size_t repetitions) {
    ResultRow row;
    row.problem = spec.problem;
    row.solver = solver_label(spec.config.solver);
    row.precond = precond_label(spec.config);
    row.omega = spec.omega;
    try {
        const ProblemSpec p = example(spec.problem, spec.overrides);
        row.lambda = p.lambda1;
        row.alpha = p.alpha;
        if (p.dims == 2) row.beta = p.beta;
        row.M = p.M1;
        row.N = p.steady ? p.M1 : p.N;
        const Discretization d(p);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < std::max<std::size_t>(1, repetitions); ++r) {
            const RunOutcome out = run_problem(d, spec.config);
            best = std::min(best, out.cpu_seconds);
            row.avg_iters = out.avg_iterations;
            row.final_relres = out.report.final_relres;
            row.error_inf = out.error_inf;
            row.error_l2 = out.error_l2;
        }
        row.cpu_seconds = best;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.avg_iters.reset();
    }
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentPlan& plan, std::size_t threads) {
    std::vector<ResultRow> rows(plan.runs.size());
    if (rows.empty()) return rows;
    if (threads == 0) {
        if (const char* env = std::getenv("TFDE_THREADS")) threads = std::strtoul(env, nullptr, 10);
        if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, rows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = run_one(plan.runs[i], plan.repetitions);
    };
    if (threads <= 1) {
        worker();
        return rows;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    return rows;
}

namespace {

template <class T>
std::vector<T> pick(const std::vector<T>& given, std::vector<T> fallback) {
    return given.empty() ? fallback : given;
}

RunSpec base_run(int problem, double alpha, std::optional<double> lambda, std::size_t size,
                 const TablePlanOptions& opts) {
    RunSpec r;
    r.problem = problem;
    r.overrides.alpha = alpha;
    if (lambda) r.overrides.lambda1 = *lambda;
    r.overrides.M = size;
    r.overrides.N = size;
    r.config.options.reference = opts.reference;
    r.config.options.maxit = opts.maxit;
    r.config.coarsening = opts.coarsening;
    r.config.precond.coarsening = opts.coarsening;
    return r;
}

RunSpec standalone(RunSpec r, int nu1, int nu2, double omega) {
    r.config.solver = SolverKind::MG;
    r.config.cycle.nu1 = nu1;
    r.config.cycle.nu2 = nu2;
    r.config.cycle.omega = omega;
    r.omega = omega;
    return r;
}

RunSpec krylov(RunSpec r, SolverKind s, const std::string& prec, std::optional<double> omega = {},
               std::optional<Coarsening> c = {}) {
    r.config.solver = s;
    const Coarsening keep = r.config.precond.coarsening;
    r.config.precond = PreconditionerSpec::parse(prec);
    r.config.precond.coarsening = c.value_or(keep);
    if (omega) r.config.precond.cycle.omega = *omega;
    r.omega = omega;
    return r;
}

}  // namespace

ExperimentPlan table_plan(int table, const TablePlanOptions& opts) {
    ExperimentPlan plan;
    const std::vector<double> omegas{0.5, 0.6, 0.7, 0.8, 0.9};
    switch (table) {
        case 1: {
            for (double lam : pick(opts.lambdas, {0.0, 2.0, 10.0})) {
                for (double a : pick(opts.alphas, {1.2, 1.5, 1.8})) {
                    for (std::size_t m : pick(opts.sizes, {64, 128, 256, 512})) {
                        RunSpec r = base_run(1, a, lam, m, opts);
                        const double ws = auto_omega(example(1, r.overrides));
                        for (double w : omegas) plan.runs.push_back(standalone(r, 1, 1, w));
                        plan.runs.push_back(standalone(r, 1, 1, ws));
                    }
                }
            }
            break;
        }
        case 2:
        case 3: {
            const int ex = table;
            const SolverKind ks = table == 2 ? SolverKind::CG : SolverKind::GMRES;
            for (double a : pick(opts.alphas, {1.4, 1.7, 1.9})) {
                for (std::size_t m : pick(opts.sizes, {128, 256, 512, 1024})) {
                    RunSpec r = base_run(ex, a, std::nullopt, m, opts);
                    const double ws = auto_omega(example(ex, r.overrides));
                    plan.runs.push_back(krylov(r, ks, "none"));
                    if (table == 2) {
                        for (double w : omegas) plan.runs.push_back(standalone(r, 1, 1, w));
                    }
                    plan.runs.push_back(standalone(r, 1, 1, ws));
                    plan.runs.push_back(standalone(r, 0, 1, ws));
                    plan.runs.push_back(krylov(r, ks, "mg:1,1", ws));
                    if (table == 3) plan.runs.push_back(krylov(r, ks, "mg:0,1", ws));
                    plan.runs.push_back(krylov(r, ks, "circulant"));
                    plan.runs.push_back(krylov(r, ks, "laplacian"));
                }
            }
            break;
        }
        case 4:
        case 5: {
            const int ex = table;
            for (double lam : pick(opts.lambdas, {0.0, 1.0, 5.0})) {
                for (std::size_t n : pick(opts.sizes, {16, 32})) {
                    RunSpec r = base_run(ex, 1.8, lam, n, opts);
                    r.overrides.beta = 1.6;
                    const double ws = auto_omega(example(ex, r.overrides));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "none"));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "laplacian"));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "laplacian-inner:1"));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "laplacian-inner:2"));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "mg:1,1", ws, Coarsening::Galerkin));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "mg:1,1", ws, Coarsening::Geometric));
                    plan.runs.push_back(krylov(r, SolverKind::GMRES, "circulant"));
                }
            }
            break;
        }
        default: throw DomainError("unknown table " + std::to_string(table));
    }
    return plan;
}

}  // namespace tfde
