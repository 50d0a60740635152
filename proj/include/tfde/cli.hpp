#pragma once

#include "tfde/experiment.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tfde {

/// Every recognized option; unset fields fall back to per-command defaults.
/// Keys in config files are the long option names (e.g. `alpha = 1.5`).
struct RunConfig {
    std::optional<int> problem;
    std::optional<double> alpha, beta, lambda, lambda2, gamma3, T, a, b, h;
    std::optional<std::size_t> M, N, K;
    std::optional<std::string> solver;      // cg | gmres | mg
    std::optional<std::string> precond;     // none | mg:nu1,nu2 | circulant | laplacian | laplacian-inner:nu
    std::optional<std::string> omega;       // number | auto
    std::optional<std::string> coarsening;  // geometric | galerkin
    std::optional<std::size_t> min_size;
    std::optional<int> nu1, nu2;
    std::optional<double> tol;
    std::optional<std::size_t> maxit;
    std::optional<std::string> reference;  // initial | rhs
    std::optional<std::string> forcing;    // discrete | analytic
    std::optional<int> table;
    std::vector<std::size_t> sizes;
    std::vector<double> lambdas, alphas;
    std::optional<std::size_t> threads, points, repetitions;
    std::optional<double> p;
    std::optional<std::string> side;    // left | right
    std::optional<std::string> format;  // csv | pretty
    std::optional<std::string> output;

    bool operator==(const RunConfig&) const = default;
};

/// `key = value` lines for every set field.
std::string to_config_text(const RunConfig& c);
/// Parses config text with the same option table as the command line.
RunConfig parse_config_text(std::string_view text);

enum class TableFormat { Csv, Pretty };

inline constexpr std::string_view kCsvHeader =
    "lambda,alpha,beta,M,N,omega,solver,precond,avg_iters,cpu_seconds,final_relres,error_inf,error_l2";

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format);
/// Reads CSV produced by emit_table.
std::vector<ResultRow> parse_csv(std::string_view text);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// argv[1] names the subcommand: weights, symbol, solve, experiment, consistency.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfde
