// One PASS/FAIL line per acceptance criterion. Reference iteration counts are
// pinned below together with their tolerances; averages are rounded half-up.

#include "tfde/cli.hpp"
#include "tfde/experiment.hpp"
#include "tfde/fastlinalg.hpp"
#include "tfde/multigrid.hpp"
#include "tfde/operator2d.hpp"
#include "tfde/problems.hpp"
#include "tfde/stencil.hpp"
#include "tfde/symbol.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

using namespace tfde;

namespace {

double round_half_up(double x) { return std::floor(x + 0.5); }

struct Criterion {
    bool pass = true;
    std::ostringstream detail;
    int misses = 0;

    // |got - want| <= tol, with tol absolute
    void expect(const std::string& what, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        if (!ok) {
            pass = false;
            ++misses;
            detail << ' ' << what << '=' << got << "(want " << want << "+-" << tol << ')';
        }
    }
    void require(const std::string& what, bool ok) {
        if (!ok) {
            pass = false;
            ++misses;
            detail << ' ' << what;
        }
    }
};

int failures = 0;

void report(int id, const char* name, Criterion& c) {
    if (!c.pass) ++failures;
    std::printf("%s %d %s%s\n", c.pass ? "PASS" : "FAIL", id, name, c.detail.str().c_str());
    std::fflush(stdout);
}

// Finds the rounded iteration count of the row with the given labels.
double find(const std::vector<ResultRow>& rows, double alpha, double lambda, std::size_t M, const std::string& solver,
            const std::string& precond, std::optional<double> omega = {}) {
    for (const auto& r : rows) {
        if (std::abs(r.alpha - alpha) > 1e-12 || std::abs(r.lambda - lambda) > 1e-12 || r.M != M) continue;
        if (r.solver != solver || r.precond != precond) continue;
        if (omega && (!r.omega || std::abs(*r.omega - *omega) > 1e-9)) continue;
        if (!r.ok() || !r.avg_iters) return std::nan("");
        return round_half_up(*r.avg_iters);
    }
    return std::nan("");
}

const ResultRow* find_row(const std::vector<ResultRow>& rows, const std::string& precond) {
    for (const auto& r : rows)
        if (r.precond == precond) return &r;
    return nullptr;
}

// Criterion 1 reference grid: rows (lambda, alpha), blocks M = 64..512,
// columns omega = 0.5, 0.6, 0.7, 0.8, 0.9, omega*.
struct Table1Row {
    double lambda, alpha;
    int counts[4][6];
};

constexpr Table1Row kTable1[] = {
    {0, 1.2, {{7, 6, 5, 4, 4, 4}, {6, 5, 4, 4, 4, 3}, {6, 5, 4, 3, 4, 3}, {5, 4, 4, 3, 3, 3}}},
    {0, 1.5, {{8, 6, 5, 6, 9, 6}, {7, 6, 5, 6, 9, 6}, {7, 6, 5, 6, 8, 6}, {6, 6, 5, 5, 8, 5}}},
    {0, 1.8, {{11, 8, 8, 11, 19, 8}, {10, 8, 7, 11, 18, 7}, {10, 8, 7, 10, 18, 7}, {9, 7, 7, 10, 17, 7}}},
    {2, 1.2, {{7, 5, 5, 4, 4, 4}, {6, 5, 4, 4, 4, 3}, {6, 5, 4, 3, 4, 3}, {5, 4, 4, 3, 3, 3}}},
    {2, 1.5, {{8, 7, 5, 6, 9, 6}, {7, 6, 5, 6, 9, 6}, {6, 5, 5, 6, 8, 6}, {6, 5, 5, 5, 8, 5}}},
    {2, 1.8, {{11, 9, 8, 11, 19, 8}, {10, 8, 7, 11, 19, 7}, {10, 8, 7, 10, 18, 7}, {9, 7, 7, 10, 17, 7}}},
    {10, 1.2, {{7, 5, 4, 4, 5, 5}, {6, 5, 4, 3, 4, 4}, {5, 4, 4, 3, 4, 3}, {5, 4, 3, 3, 3, 3}}},
    {10, 1.5, {{9, 7, 6, 8, 11, 7}, {8, 6, 5, 7, 10, 7}, {7, 5, 5, 6, 9, 6}, {6, 5, 4, 6, 8, 6}}},
    {10, 1.8, {{11, 9, 8, 12, 21, 8}, {10, 8, 7, 11, 20, 8}, {10, 8, 7, 11, 18, 7}, {9, 7, 7, 10, 17, 7}}},
};

void criterion1() {
    Criterion c;
    const auto rows = run_experiment(table_plan(1));
    const std::size_t sizes[] = {64, 128, 256, 512};
    const double omegas[] = {0.5, 0.6, 0.7, 0.8, 0.9};
    for (const auto& ref : kTable1) {
        Overrides o;
        o.alpha = ref.alpha;
        const double ws = auto_omega(example(1, o));
        for (int b = 0; b < 4; ++b) {
            for (int k = 0; k < 6; ++k) {
                const double w = k < 5 ? omegas[k] : ws;
                const double got = find(rows, ref.alpha, ref.lambda, sizes[b], "mg", "mg:1,1/geometric", w);
                std::ostringstream what;
                what << "(lam=" << ref.lambda << ",a=" << ref.alpha << ",M=" << sizes[b] << ",w=" << (k < 5 ? w : 0.0)
                     << (k < 5 ? "" : "*") << ')';
                c.expect(what.str(), got, ref.counts[b][k], 1.0);
            }
        }
    }
    c.detail << " [" << (216 - c.misses) << "/216 cells within 1]";
    report(1, "table1-standalone-vcycle", c);
}

// Criterion 2 references at M = 2^10: CG, V(1,1) omega=0.8, V(0,1) omega*, PV(1,1) omega*, P_C, P_2.
void criterion2() {
    Criterion c;
    TablePlanOptions o;
    o.sizes = {1024};
    const auto rows = run_experiment(table_plan(2, o));
    struct Ref {
        double alpha;
        double cg, v08, v01, pv, pc, p2;
    };
    const Ref refs[] = {{1.4, 322, 9, 13, 6, 17, 35}, {1.7, 603, 11, 14, 6, 24, 19}, {1.9, 891, 14, 15, 7, 32, 10}};
    for (const auto& r : refs) {
        Overrides ov;
        ov.alpha = r.alpha;
        ov.M = 1024;
        const double ws = auto_omega(example(2, ov));
        const std::string a = "a=" + format_number(r.alpha) + ' ';
        const double cg = find(rows, r.alpha, 3.0, 1024, "cg", "none");
        c.expect(a + "CG", cg, r.cg, 0.1 * r.cg);
        c.expect(a + "V(1,1)w=0.8", find(rows, r.alpha, 3.0, 1024, "mg", "mg:1,1/geometric", 0.8), r.v08, 1);
        c.expect(a + "V(0,1)", find(rows, r.alpha, 3.0, 1024, "mg", "mg:0,1/geometric", ws), r.v01, 2);
        const double pv = find(rows, r.alpha, 3.0, 1024, "cg", "mg:1,1/geometric", ws);
        const double pc = find(rows, r.alpha, 3.0, 1024, "cg", "circulant");
        const double p2 = find(rows, r.alpha, 3.0, 1024, "cg", "laplacian");
        c.expect(a + "PV(1,1)", pv, r.pv, 1);
        c.expect(a + "P_C", pc, r.pc, 2);
        c.expect(a + "P_2", p2, r.p2, 3);
        c.require(a + "preconditioned-not-faster", pv <= cg && pc <= cg && p2 <= cg);
    }
    report(2, "table2-symmetric-1d", c);
}

void criterion3() {
    Criterion c;
    TablePlanOptions o;
    o.sizes = {1024};
    o.alphas = {1.9};
    const auto rows = run_experiment(table_plan(3, o));
    Overrides ov;
    ov.alpha = 1.9;
    ov.M = 1024;
    const double ws = auto_omega(example(3, ov));
    const double gm = find(rows, 1.9, 3.0, 1024, "gmres", "none");
    c.expect("GMRES", gm, 944, 94.4);
    c.expect("V(1,1)", find(rows, 1.9, 3.0, 1024, "mg", "mg:1,1/geometric", ws), 11, 2);
    const double pv11 = find(rows, 1.9, 3.0, 1024, "gmres", "mg:1,1/geometric", ws);
    const double pv01 = find(rows, 1.9, 3.0, 1024, "gmres", "mg:0,1/geometric", ws);
    const double pc = find(rows, 1.9, 3.0, 1024, "gmres", "circulant");
    const double p2 = find(rows, 1.9, 3.0, 1024, "gmres", "laplacian");
    c.expect("PV(1,1)", pv11, 4, 1);
    c.expect("PV(0,1)", pv01, 7, 1);
    c.expect("P_C", pc, 27, 2);
    c.expect("P_2", p2, 6, 1);
    c.require("preconditioned-not-faster", pv11 <= gm && pv01 <= gm && pc <= gm && p2 <= gm);
    report(3, "table3-nonsymmetric-1d", c);
}

// 2D table cell: GMRES, P~_2, P_2^1, P_2^2, P~V(1,1), PV(1,1), P_C, with per-column tolerances.
void check_2d(Criterion& c, const std::vector<ResultRow>& rows, const double ref[7], const double tol[7]) {
    const char* labels[] = {"none", "laplacian", "laplacian-inner:1", "laplacian-inner:2",
                            "mg:1,1/galerkin", "mg:1,1/geometric", "circulant"};
    const char* names[] = {"GMRES", "P~_2", "P_2^1", "P_2^2", "P~V(1,1)", "PV(1,1)", "P_C"};
    double gm = 0.0;
    for (int k = 0; k < 7; ++k) {
        if (ref[k] < 0) continue;
        const ResultRow* r = find_row(rows, labels[k]);
        const double got = r && r->ok() && r->avg_iters ? round_half_up(*r->avg_iters) : std::nan("");
        if (k == 0) gm = got;
        c.expect(names[k], got, ref[k], tol[k]);
        if (k > 0) c.require(std::string(names[k]) + "-not-faster", got <= gm);
    }
}

void criterion4() {
    Criterion c;
    TablePlanOptions o;
    o.sizes = {32};
    o.lambdas = {1.0};
    const auto rows = run_experiment(table_plan(4, o), 1);
    const double ref[7] = {76, 7, 15, 12, 9, 9, 21};
    const double tol[7] = {7.6, 1, 2, 2, 2, 2, 2};
    check_2d(c, rows, ref, tol);
    // relative timing sanity: multigrid-preconditioned GMRES beats plain GMRES
    const ResultRow* plain = find_row(rows, "none");
    const ResultRow* pv = find_row(rows, "mg:1,1/geometric");
    c.require("PV-not-faster-than-GMRES-in-cpu-time", plain && pv && pv->cpu_seconds < plain->cpu_seconds);
    report(4, "table4-2d-variable-coefficients", c);
}

void criterion5() {
    Criterion c;
    TablePlanOptions o;
    o.sizes = {16};
    o.lambdas = {5.0};
    const auto rows = run_experiment(table_plan(5, o), 1);
    const double ref[7] = {30, 7, -1, -1, -1, 8, 12};
    const double tol[7] = {3, 1, 0, 0, 0, 2, 2};
    check_2d(c, rows, ref, tol);
    report(5, "table5-2d-one-sided", c);
}

void criterion6() {
    Criterion c;
    auto two_decimals = [](double x) { return std::round(x * 100.0) / 100.0; };
    SymbolSpec s;
    s.gamma3 = 0.01;
    const std::tuple<double, double> first[] = {{1.2, 0.85}, {1.5, 0.79}, {1.8, 0.71}};
    for (auto [a, w] : first) {
        s.alpha = a;
        c.expect("omega*(a=" + format_number(a) + ")", two_decimals(smoothing_bound(s, 1).omega_star), w, 1e-9);
    }
    s.gamma3 = 0.00235;
    const std::tuple<double, double> second[] = {{1.4, 0.85}, {1.7, 0.75}, {1.9, 0.69}};
    for (auto [a, w] : second) {
        s.alpha = a;
        c.expect("omega*(a=" + format_number(a) + ")", two_decimals(smoothing_bound(s, 1).omega_star), w, 1e-9);
    }
    SymbolSpec two;
    two.alpha = 1.8;
    two.beta = 1.6;
    two.gamma3 = 0.0235;
    c.expect("omega*-2d", smoothing_bound(two, 2).omega_star, 0.8507, 5e-5);
    report(6, "omega-star", c);
}

void criterion7() {
    Criterion c;
    const std::vector<std::size_t> sizes{31, 63, 127, 255, 511};
    for (double a : {1.2, 1.5, 1.8}) {
        for (double lam : {0.0, 2.0}) {
            for (double g3 : {0.0, 0.01}) {
                for (Side side : {Side::Left, Side::Right}) {
                    const double order = consistency_order(make_params(a, g3, lam), side, 4.0, sizes).order;
                    std::ostringstream what;
                    what << "(a=" << a << ",lam=" << lam << ",g3=" << g3 << (side == Side::Left ? ",L)" : ",R)");
                    c.expect(what.str(), order, 2.0, 0.1);
                }
            }
        }
    }
    report(7, "consistency-order", c);
}

void criterion8() {
    Criterion c;
    const Grid1D g = Grid1D::make(0.0, 1.0, 64);
    for (double lam : {0.0, 2.0, 10.0}) {
        for (double a : {1.2, 1.5, 1.8}) {
            const double rho = stability_check(make_params(a, 0.01, lam), g, 1.0 / 64.0, 1.0);
            std::ostringstream what;
            what << "rho(a=" << a << ",lam=" << lam << ")=" << rho;
            c.require(what.str(), rho < 1.0);
        }
    }
    report(8, "crank-nicolson-stability", c);
}

void criterion9() {
    Criterion c;
    const Vector xs = symbol_grid(4096);
    const double pi = std::numbers::pi;
    struct Pair {
        double a, g3;
    };
    const Pair lattice[] = {{1.2, 0.0}, {1.2, 0.01}, {1.5, 0.0}, {1.5, 0.01}, {1.8, 0.0},      {1.8, 0.01},
                            {1.4, 0.00235}, {1.7, 0.00235}, {1.9, 0.00235}, {1.6, 0.0235}, {1.8, 0.0235}};
    for (const auto& p : lattice) {
        bool nonpos = true, unique_zero = true;
        for (double x : xs) {
            const double f = f_symbol(p.a, p.g3, x);
            if (f > 0.0) nonpos = false;
            if (std::abs(x) > 2.0 * pi / 4096.0 && f == 0.0) unique_zero = false;
        }
        unique_zero = unique_zero && f_symbol(p.a, p.g3, 0.0) == 0.0;
        std::ostringstream what;
        what << "(a=" << p.a << ",g3=" << p.g3 << ")";
        c.require("nonpositive" + what.str(), nonpos);
        c.require("unique-zero" + what.str(), unique_zero);
    }
    const FractionalParams fp = make_params(1.5, 0.01, 3.0);
    const Vector grid = symbol_grid(2048);
    auto sup = [&](std::size_t M) {
        const Vector fm = partial_symbol_scan(fp, 1.0 / static_cast<double>(M + 1), M, grid);
        double e = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) e = std::max(e, std::abs(fm[j] - f_symbol(1.5, 0.01, grid[j])));
        return e;
    };
    const double e500 = sup(500), e1000 = sup(1000), e5000 = sup(5000);
    c.require("partial-sums-not-decreasing", e500 > e1000 && e1000 > e5000);
    const FractionalParams sp = make_params(1.5, 0.01, 2.0);
    const double d64 = szego_sampling_check(sp, 1.0, 64), d256 = szego_sampling_check(sp, 1.0, 256);
    c.require("szego-deviation-not-decreasing", d256 < d64);
    report(9, "symbol-properties", c);
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double rel(const Vector& a, const Eigen::VectorXd& b) {
    const Eigen::Map<const Eigen::VectorXd> x(a.data(), static_cast<Eigen::Index>(a.size()));
    return (x - b).norm() / b.norm();
}

Eigen::Map<const Eigen::VectorXd> view(const Vector& v) { return {v.data(), static_cast<Eigen::Index>(v.size())}; }

// Dense oracles are assembled entry by entry from the defining index formulas.
void criterion10() {
    Criterion c;
    constexpr double tol = 1e-12;
    std::mt19937_64 rng(2024);

    for (std::size_t M : {17u, 100u, 256u}) {
        Vector col = random_vector(M, rng), row = random_vector(M, rng);
        row[0] = col[0];
        const ToeplitzDescriptor t = make_toeplitz(col, row);
        Eigen::MatrixXd d(M, M);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j) d(i, j) = i >= j ? col[i - j] : row[j - i];
        const Vector v = random_vector(M, rng);
        c.require("toeplitz-matvec(M=" + std::to_string(M) + ")", rel(toeplitz_matvec(t, v), d * view(v)) <= tol);

        Vector cc = random_vector(M, rng);
        cc[0] += 8.0;
        const CirculantDescriptor circ(cc);
        Eigen::MatrixXd cd(M, M);
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j) cd(i, j) = cc[(i + M - j) % M];
        c.require("circulant-matvec(M=" + std::to_string(M) + ")", rel(circ.matvec(v), cd * view(v)) <= tol);
        c.require("circulant-solve(M=" + std::to_string(M) + ")",
                  rel(circulant_solve(circ, v), cd.partialPivLu().solve(view(v))) <= tol);
    }

    for (std::size_t M : {16u, 64u, 256u}) {
        const FractionalParams p = make_params(1.7, 0.01, 2.0);
        const Grid1D g = Grid1D::make(0.0, 1.0, M);
        Vector cl = random_vector(M, rng), cr = random_vector(M, rng);
        for (auto& x : cl) x = std::abs(x);
        for (auto& x : cr) x = std::abs(x);
        const TemperedStencil st = tempered_stencil(p, g.h, M + 1);
        const auto& gk = st.g;
        const double r = 0.3, s = 0.2;
        const Operator1D op = cn_operator(p, g, 0.05, DiffusionField1D{cl, cr});
        // extended matrix on nodes 0..M+1 of r (C_l L + C_r R) - s (C_l - C_r) H
        Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(M, M + 2);
        Eigen::MatrixXd opd = Eigen::MatrixXd::Zero(M, M);
        const double rr = op.diffusion_scale(), ss = op.advection_scale();
        for (std::size_t i = 1; i <= M; ++i) {
            Eigen::RowVectorXd left = Eigen::RowVectorXd::Zero(M + 2), right = Eigen::RowVectorXd::Zero(M + 2),
                               h = Eigen::RowVectorXd::Zero(M + 2);
            for (std::size_t k = 0; k <= i + 1; ++k) left(i + 1 - k) += gk.size() > k ? gk[k] : 0.0;
            for (std::size_t k = 0; k <= M + 2 - i; ++k) right(i - 1 + k) += gk.size() > k ? gk[k] : 0.0;
            left(i) -= st.phi;
            right(i) -= st.phi;
            h(i + 1) = 1.0;
            h(i - 1) = -1.0;
            const double a = cl[i - 1], b = cr[i - 1];
            ext.row(i - 1) = r * (a * left + b * right) - s * (a - b) * h;
            Eigen::RowVectorXd full = -rr * (a * left + b * right) + ss * (a - b) * h;
            full(i) += 1.0;
            opd.row(i - 1) = full.segment(1, M);
        }
        const Vector v = random_vector(M, rng);
        c.require("operator1d(M=" + std::to_string(M) + ")", rel(op.apply(v), opd * view(v)) <= tol);
        const Eigen::VectorXd bref = ext.col(0) * 0.7 + ext.col(M + 1) * (-1.3);
        c.require("boundary(M=" + std::to_string(M) + ")",
                  rel(boundary_rhs(st, g, DiffusionField1D{cl, cr}, 0.7, -1.3, r, s), bref) <= tol);

        // Galerkin product against dense R A P
        CycleConfig cfg;
        cfg.min_size = 3;
        const OperatorPtr fine = std::make_shared<Operator1D>(op);
        const Hierarchy hier = build_hierarchy(fine, GridShape::line(M), cfg, Coarsening::Galerkin);
        const Eigen::MatrixXd P(hier.levels()[0].to_coarse->matrix());
        const Eigen::MatrixXd rap = P.transpose() * opd * P;
        const Eigen::MatrixXd got = materialize_dense(*hier.levels()[1].op);
        c.require("galerkin(M=" + std::to_string(M) + ")", (got - rap).norm() <= tol * rap.norm());
    }

    {
        const std::size_t m1 = 16, m2 = 16;
        BTTBDescriptor b = BTTBDescriptor::zeros(m1, m2);
        b.coeffs = random_vector(b.coeffs.size(), rng);
        Eigen::MatrixXd d(m1 * m2, m1 * m2);
        for (std::size_t i2 = 0; i2 < m2; ++i2)
            for (std::size_t i1 = 0; i1 < m1; ++i1)
                for (std::size_t j2 = 0; j2 < m2; ++j2)
                    for (std::size_t j1 = 0; j1 < m1; ++j1)
                        d(i1 + m1 * i2, j1 + m1 * j2) =
                            b.at(static_cast<std::ptrdiff_t>(i1) - static_cast<std::ptrdiff_t>(j1),
                                 static_cast<std::ptrdiff_t>(i2) - static_cast<std::ptrdiff_t>(j2));
        const Vector u = random_vector(m1 * m2, rng);
        c.require("bttb-matvec(16x16)", rel(bttb_matvec(b, u), d * view(u)) <= tol);

        Overrides o;
        o.M = 16;
        const Discretization disc(example(4, o));
        const SystemContext ctx = disc.system(disc.time_grid().tau);
        const Operator2D& op = *ctx.op2;
        const Eigen::MatrixXd dense = materialize_dense(op);
        const Eigen::MatrixXd P(TransferOp(GridShape::square(m1, m2)).matrix());
        const Eigen::MatrixXd rap = P.transpose() * dense * P;
        CycleConfig cfg;
        cfg.min_size = 3;
        const Hierarchy hier = build_hierarchy(ctx.op2, GridShape::square(m1, m2), cfg, Coarsening::Galerkin);
        c.require("galerkin-2d(16x16)", (materialize_dense(*hier.levels()[1].op) - rap).norm() <= tol * rap.norm());

        const Operator2D cop = operator_2d(make_params(1.8, 0.0235, 1.0), make_params(1.6, 0.0235, 1.0),
                                           Grid1D::make(0.0, 1.0, m1), Grid1D::make(0.0, 1.0, m2), 0.1,
                                           DiffusionField2D::constant(m1, m2, 1.0, 0.3, 0.6, 0.2));
        c.require("operator2d-bttb(16x16)", rel(cop.apply(u), materialize_dense(cop.as_bttb()) * view(u)) <= tol);
    }
    report(10, "structured-algebra-oracles", c);
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9, criterion10};
    for (const auto& f : all) {
        try {
            f();
        } catch (const std::exception& e) {
            ++failures;
            std::printf("FAIL ? exception: %s\n", e.what());
        }
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
