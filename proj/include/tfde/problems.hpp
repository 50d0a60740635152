#pragma once

#include "tfde/krylov.hpp"
#include "tfde/multigrid.hpp"
#include "tfde/operator2d.hpp"
#include "tfde/solve_report.hpp"
#include "tfde/stencil.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tfde {

/// f(x, y, t); y is ignored by 1D problems and t by steady ones.
using Field = std::function<double(double, double, double)>;

enum class ForcingMode { DiscreteManufactured, AnalyticSeries, ExplicitFunction };

/// scale * e^{kappa s} * sum_q poly[q] s^q, where s = x - a (left form) or
/// s = b - x (right form).
struct ExpPolyTerm {
    double scale = 1.0;
    double kappa = 0.0;
    Vector poly;
};

struct ProblemSpec {
    int id = 0;
    int dims = 1;
    bool steady = false;
    double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
    double alpha = 1.5, beta = 1.5;
    double lambda1 = 0.0, lambda2 = 0.0;
    double gamma3 = 0.0;
    double T = 1.0;
    std::size_t M1 = 64, M2 = 1;
    std::size_t N = 64;  // time steps
    Field c_l, c_r, e_l, e_r;
    bool coeffs_time_dependent = false;
    Field exact;    // optional
    Field initial;  // defaults to exact at t = 0
    Field source;  // ExplicitFunction mode
    ForcingMode forcing = ForcingMode::DiscreteManufactured;
    /// Spatial profile u(x, t) = time_factor(t) * profile(x) in both one-sided
    /// forms, enabling AnalyticSeries forcing in 1D.
    std::vector<ExpPolyTerm> profile_left, profile_right;
    std::function<double(double)> time_factor, time_factor_dt;
};

struct Overrides {
    std::optional<double> alpha, beta, lambda1, lambda2, gamma3, T, a, b;
    std::optional<std::size_t> M, N;
    std::optional<ForcingMode> forcing;
};

/// The five benchmark problems. Throws DomainError for an unknown id.
ProblemSpec example(int id, const Overrides& overrides = {});

enum class SolverKind { CG, GMRES, MG };

struct SolverConfig {
    SolverKind solver = SolverKind::MG;
    PreconditionerSpec precond{};     // Krylov solvers
    CycleConfig cycle{};              // standalone multigrid
    Coarsening coarsening = Coarsening::Geometric;  // standalone multigrid
    SolverOptions options{};
};

/// A problem on its grids: operators, exact samples and forcing.
class Discretization {
public:
    explicit Discretization(ProblemSpec p);

    const ProblemSpec& problem() const { return p_; }
    std::size_t size() const { return shape_.size(); }
    const GridShape& shape() const { return shape_; }
    const Grid1D& grid_x() const { return gx_; }
    const Grid1D& grid_y() const { return gy_; }
    const TimeGrid& time_grid() const { return tg_; }
    /// h in 1D, h_x h_y in 2D.
    double cell_measure() const;

    /// System operator at time t (steady problems ignore t), with the
    /// geometric rediscretization attached.
    SystemContext system(double t) const;

    Vector exact(double t) const;
    /// F^{j+1} for the step t_j -> t_{j+1}; steady problems use j = 0 and get f.
    Vector forcing(std::size_t j) const;
    /// Dirichlet ghost contributions of step j, added next to the forcing.
    /// Taken from the exact solution; zero for homogeneous data and in 2D.
    Vector boundary(std::size_t j) const;

private:
    ProblemSpec p_;
    GridShape shape_;
    Grid1D gx_, gy_;
    TimeGrid tg_;
    FractionalParams px_, py_;

    SystemContext build(const GridShape& shape, double t) const;
    DiffusionField1D fields_1d(const Grid1D& g, double t) const;
    DiffusionField2D fields_2d(const Grid1D& gx, const Grid1D& gy, double t) const;
    Vector analytic_forcing(double t) const;
};

/// Discretely manufactured forcing of step j; see Discretization::forcing.
Vector forcing_discrete(const Discretization& d, std::size_t j);

struct RunOutcome {
    Vector u;  // final solution
    SolveReport report;  // iterations = total over steps
    std::vector<std::size_t> step_iterations;
    double avg_iterations = 0.0;
    double cpu_seconds = 0.0;
    std::optional<double> error_inf, error_l2;
};

/// Crank-Nicolson march; each step starts from the previous solution.
/// Throws ConvergenceError naming the step that failed.
RunOutcome cn_march(const Discretization& d, const SolverConfig& cfg);

/// One solve from the zero initial guess.
RunOutcome steady_solve(const Discretization& d, const SolverConfig& cfg);

/// Dispatches on problem().steady.
RunOutcome run_problem(const Discretization& d, const SolverConfig& cfg);

/// (max |a - b|, sqrt(measure * sum (a - b)^2))
std::pair<double, double> error_norms(std::span<const double> numeric, std::span<const double> exact, double measure);

// Analytic tempered derivatives.

/// Left Riemann-Liouville tempered derivative (order alpha, tempering
/// lambda, base point 0) of e^{kappa s} s^p at s > 0:
///   e^{-lambda s} sum_n mu^n / n! Gamma(p+n+1) / Gamma(p+n+1-alpha) s^{p+n-alpha},
/// mu = lambda + kappa. Throws DomainError for p <= alpha - 1 or s <= 0 and
/// ConvergenceError if the series stalls.
double tempered_rl_exp_monomial(double kappa, double p, double lambda, double alpha, double s,
                                double trunc_tol = 1e-16);

enum class Side { Left, Right };

/// Tempered derivative of e^{-lambda x} x^p on [a, b]; the right side
/// mirrors to the left one in s = b - x.
double rl_tempered_series(double p, double lambda, double alpha, Side side, double x, double a = 0.0,
                          double b = 1.0, double trunc_tol = 1e-16);

/// Tempered derivative (left or right) of a sum of ExpPolyTerm written in
/// that side's variable s.
double tempered_derivative(const std::vector<ExpPolyTerm>& terms, double lambda, double alpha, double s);

struct ConsistencyResult {
    Vector h;
    Vector error;  // max-norm error on interior nodes away from the boundary
    Vector slopes;
    double order = 0.0;  // slope of the last halving
};

/// Observed order of the shifted stencil against the series for
/// u = e^{-lambda x} x^p on [0, 1]; h_list is a halving sequence of the form 1/(M+1).
ConsistencyResult consistency_order(const FractionalParams& params, Side side, double p,
                                    const std::vector<std::size_t>& sizes);

}  // namespace tfde
