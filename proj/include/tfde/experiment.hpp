#pragma once

#include "tfde/problems.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tfde {

/// One fully resolved run.
struct RunSpec {
    int problem = 1;
    Overrides overrides;
    SolverConfig config;
    std::optional<double> omega;  // reported Jacobi weight, if any
};

struct ExperimentPlan {
    std::vector<RunSpec> runs;
    std::size_t repetitions = 1;  // timing only; the fastest repetition is kept
};

struct ResultRow {
    int problem = 0;
    double lambda = 0.0;
    double alpha = 0.0;
    std::optional<double> beta;
    std::size_t M = 0;
    std::size_t N = 0;
    std::optional<double> omega;
    std::string solver;
    std::string precond;
    std::optional<double> avg_iters;
    double cpu_seconds = 0.0;
    std::optional<double> final_relres;
    std::optional<double> error_inf;
    std::optional<double> error_l2;
    std::string error;  // empty when the run succeeded

    bool ok() const { return error.empty(); }
};

std::string solver_label(SolverKind s);
/// Preconditioner (Krylov) or cycle (standalone multigrid) label, with the
/// coarsening appended for multigrid.
std::string precond_label(const SolverConfig& c);

/// Runs one spec; failures end up in ResultRow::error.
ResultRow run_one(const RunSpec& spec, std::size_t repetitions = 1);

/// Executes every run, in parallel when threads > 1. threads = 0 reads
/// TFDE_THREADS and falls back to the hardware concurrency. Row order
/// follows the plan.
std::vector<ResultRow> run_experiment(const ExperimentPlan& plan, std::size_t threads = 0);

struct TablePlanOptions {
    /// Sizes M (1D) or N = M1 = M2 (2D); empty selects the table's own list.
    std::vector<std::size_t> sizes;
    /// Tempering values for tables 1, 4, 5; empty selects the table's own list.
    std::vector<double> lambdas;
    /// Orders for tables 1-3; empty selects the table's own list.
    std::vector<double> alphas;
    ResidualReference reference = ResidualReference::InitialResidual;
    std::size_t maxit = 2000;
    /// Multigrid coarsening for the 1D tables; tables 4-5 fix their own per column.
    Coarsening coarsening = Coarsening::Geometric;
};

/// Plans reproducing the five iteration tables.
ExperimentPlan table_plan(int table, const TablePlanOptions& opts = {});

/// omega* for a problem: 1D from (alpha, gamma3) with the symmetric-part
/// coefficient, 2D from (alpha, beta, gamma3) with c = e = 1.
double auto_omega(const ProblemSpec& p);

}  // namespace tfde
