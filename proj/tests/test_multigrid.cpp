#include "oracles.hpp"

#include "tfde/errors.hpp"
#include "tfde/experiment.hpp"
#include "tfde/multigrid.hpp"
#include "tfde/problems.hpp"
#include "tfde/stencil.hpp"
#include "tfde/symbol.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace tfde;

namespace {

// Steady constant-coefficient operator on [0, 1] with its rediscretization.
struct SteadyLine {
    OperatorPtr op;
    LevelFactory factory;

    SteadyLine(double alpha, double lambda, double gamma3, std::size_t M) {
        const FractionalParams p = make_params(alpha, gamma3, lambda);
        factory = [p](const GridShape& s) -> OperatorPtr {
            const Grid1D g = Grid1D::make(0.0, 1.0, s.m1);
            return std::make_shared<Operator1D>(steady_operator(p, g, DiffusionField1D::constant(s.m1, 1.0, 1.0)));
        };
        op = factory(GridShape::line(M));
    }
};

// Hat function of coarse node j (of m) evaluated at fine node i (of M), both on [0, 1].
double hat(std::size_t M, std::size_t m, std::size_t i, std::size_t j) {
    const double x = static_cast<double>(i + 1) / static_cast<double>(M + 1);
    const double X = static_cast<double>(j + 1) / static_cast<double>(m + 1);
    return std::max(0.0, 1.0 - std::abs(x - X) * static_cast<double>(m + 1));
}

double round_half_up(double x) { return std::floor(x + 0.5); }

double mg_iterations(int problem, const Overrides& o, int nu1, int nu2, double omega,
                     Coarsening mode = Coarsening::Geometric) {
    SolverConfig cfg;
    cfg.solver = SolverKind::MG;
    cfg.cycle.nu1 = nu1;
    cfg.cycle.nu2 = nu2;
    cfg.cycle.omega = omega;
    cfg.coarsening = mode;
    const Discretization d(example(problem, o));
    return round_half_up(run_problem(d, cfg).avg_iterations);
}

Overrides sized(std::size_t M, double alpha, std::optional<double> lambda = {}) {
    Overrides o;
    o.M = M;
    o.N = M;
    o.alpha = alpha;
    if (lambda) o.lambda1 = *lambda;
    return o;
}

}  // namespace

TEST_CASE("weighted Jacobi") {
    SUBCASE("exact solution is a fixed point") {
        const SteadyLine s(1.5, 2.0, 0.01, 32);
        const Vector u = oracle::random_vector(32, 1);
        const Vector b = s.op->apply(u);
        Vector v = u;
        jacobi_sweep(*s.op, v, b, 0.7, 3);
        CHECK(oracle::rel_diff(v, u) < 1e-13);
    }
    SUBCASE("diagonal system with omega = 1 solves in one sweep") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
        d.diagonal() << 2.0, 4.0, -1.0;
        const DenseOperator op(d);
        Vector u(3, 0.0);
        const Vector b{2.0, 2.0, 3.0};
        jacobi_sweep(op, u, b, 1.0, 1);
        CHECK(u[0] == doctest::Approx(1.0));
        CHECK(u[1] == doctest::Approx(0.5));
        CHECK(u[2] == doctest::Approx(-3.0));
    }
    SUBCASE("smoother contracts for omega in (0, xi)") {
        const std::size_t M = 64;
        const FractionalParams p = make_params(1.5, 0.01, 2.0);
        const Grid1D g = Grid1D::make(0.0, 1.0, M);
        const Operator1D op = cn_operator(p, g, 1.0 / M, DiffusionField1D::constant(M, 1.0, 1.0));
        SymbolSpec spec;
        spec.alpha = 1.5;
        spec.gamma3 = 0.01;
        const double xi = smoothing_bound(spec, 1).xi;
        const Eigen::MatrixXd A = oracle::dense(op);
        const Eigen::VectorXd dinv = A.diagonal().cwiseInverse();
        for (double frac : {0.25, 0.5, 2.0 / 3.0, 0.95}) {
            const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(M, M) - frac * xi * dinv.asDiagonal() * A;
            CHECK(S.eigenvalues().cwiseAbs().maxCoeff() < 1.0);
        }
    }
    SUBCASE("errors") {
        Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2, 2);
        z(1, 1) = 0.0;
        Vector u(2, 0.0);
        CHECK_THROWS_AS(jacobi_sweep(DenseOperator(z), u, Vector{1.0, 1.0}, 0.5, 1), SingularError);
        CHECK_THROWS_AS(jacobi_sweep(IdentityOperator(2), u, Vector{1.0, 1.0}, 0.5, 0), DomainError);
    }
}

TEST_CASE("grid transfers") {
    SUBCASE("M = 3") {
        const TransferOp t(GridShape::line(3));
        CHECK(t.coarse().m1 == 1);
        Vector fine(3);
        t.prolong(Vector{1.0}, fine);
        CHECK(fine[0] == doctest::Approx(0.5));
        CHECK(fine[1] == doctest::Approx(1.0));
        CHECK(fine[2] == doctest::Approx(0.5));
        Vector c(1);
        t.restrict(Vector{1.0, 1.0, 1.0}, c);
        CHECK(c[0] == doctest::Approx(2.0));
    }
    SUBCASE("R P e_j = 1.5 on the diagonal") {
        const TransferOp t(GridShape::line(15));
        const Eigen::MatrixXd P(t.matrix());
        const Eigen::MatrixXd rp = P.transpose() * P;
        for (Eigen::Index j = 0; j < rp.rows(); ++j) CHECK(rp(j, j) == doctest::Approx(1.5));
        Vector f(15), c(7);
        Vector e(7, 0.0);
        e[3] = 1.0;
        t.prolong(e, f);
        t.restrict(f, c);
        CHECK(c[3] == doctest::Approx(1.5));
    }
    SUBCASE("odd and even sizes follow the coarse hat functions") {
        for (std::size_t M : {3u, 4u, 6u, 7u, 10u, 15u, 16u, 64u}) {
            const TransferOp t(GridShape::line(M));
            const std::size_t m = t.coarse().m1;
            CHECK(m == (M - 1) / 2);
            const Eigen::MatrixXd P(t.matrix());
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t j = 0; j < m; ++j) CHECK(P(i, j) == doctest::Approx(hat(M, m, i, j)).epsilon(1e-14));
        }
        const TransferOp t4(GridShape::line(4));
        const Eigen::MatrixXd P4(t4.matrix());
        CHECK(P4(0, 0) == doctest::Approx(0.4));
        CHECK(P4(1, 0) == doctest::Approx(0.8));
    }
    SUBCASE("2D tensor pattern") {
        const TransferOp t(GridShape::square(7, 7));
        CHECK(t.coarse() == GridShape::square(3, 3));
        Vector e(9, 0.0), f(49);
        e[4] = 1.0;
        t.prolong(e, f);
        // coarse centre sits at fine (3, 3)
        for (std::size_t j = 0; j < 7; ++j) {
            for (std::size_t i = 0; i < 7; ++i) {
                const double wx = i == 3 ? 1.0 : (i == 2 || i == 4 ? 0.5 : 0.0);
                const double wy = j == 3 ? 1.0 : (j == 2 || j == 4 ? 0.5 : 0.0);
                CHECK(f[i + 7 * j] == doctest::Approx(wx * wy));
            }
        }
        t.prolong(Vector(9, 1.0), f);
        for (double v : f) CHECK((v == doctest::Approx(0.25) || v == doctest::Approx(0.5) || v == doctest::Approx(1.0)));
        CHECK(f[0] == doctest::Approx(0.25));
        CHECK(f[1] == doctest::Approx(0.5));
        CHECK(f[8] == doctest::Approx(1.0));
    }
    SUBCASE("too small to coarsen") { CHECK_THROWS_AS(TransferOp(GridShape::line(1)), DomainError); }
}

TEST_CASE("hierarchy construction") {
    SUBCASE("level sizes") {
        const SteadyLine s(1.5, 2.0, 0.01, 15);
        CycleConfig cfg;
        cfg.min_size = 3;
        const Hierarchy h = build_hierarchy(s.op, GridShape::line(15), cfg, Coarsening::Geometric, s.factory);
        REQUIRE(h.levels().size() == 3);
        CHECK(h.levels()[0].shape.m1 == 15);
        CHECK(h.levels()[1].shape.m1 == 7);
        CHECK(h.levels()[2].shape.m1 == 3);

        const SteadyLine e(1.5, 2.0, 0.01, 64);
        const Hierarchy he = build_hierarchy(e.op, GridShape::line(64), CycleConfig{}, Coarsening::Geometric, e.factory);
        std::vector<std::size_t> sizes;
        for (const auto& l : he.levels()) sizes.push_back(l.shape.m1);
        CHECK(sizes == std::vector<std::size_t>{64, 31, 15});
    }
    SUBCASE("Galerkin coarse operator equals dense R A P") {
        const SteadyLine s(1.5, 2.0, 0.01, 16);
        CycleConfig cfg;
        cfg.min_size = 3;
        const Hierarchy h = build_hierarchy(s.op, GridShape::line(16), cfg, Coarsening::Galerkin);
        const Eigen::MatrixXd A = oracle::dense(*s.op);
        const Eigen::MatrixXd P(h.levels()[0].to_coarse->matrix());
        const Eigen::MatrixXd rap = P.transpose() * A * P;
        CHECK((oracle::dense(*h.levels()[1].op) - rap).norm() <= 1e-12 * rap.norm());
        const Eigen::MatrixXd P1(h.levels()[1].to_coarse->matrix());
        const Eigen::MatrixXd rap2 = P1.transpose() * rap * P1;
        CHECK((oracle::dense(*h.levels()[2].op) - rap2).norm() <= 1e-12 * rap2.norm());
    }
    SUBCASE("geometric levels are scaled rediscretizations") {
        const SteadyLine s(1.5, 2.0, 0.01, 31);
        CycleConfig cfg;
        cfg.min_size = 7;
        const Hierarchy h = build_hierarchy(s.op, GridShape::line(31), cfg, Coarsening::Geometric, s.factory);
        REQUIRE(h.levels().size() == 3);
        const Eigen::MatrixXd c2 = oracle::dense(*h.levels()[2].op);
        const Eigen::MatrixXd ref = 4.0 * oracle::dense(*s.factory(GridShape::line(7)));
        CHECK((c2 - ref).norm() <= 1e-13 * ref.norm());
    }
    SUBCASE("invalid configurations") {
        const SteadyLine s(1.5, 2.0, 0.01, 15);
        CycleConfig bad;
        bad.nu1 = bad.nu2 = 0;
        CHECK_THROWS_AS(build_hierarchy(s.op, GridShape::line(15), bad, Coarsening::Galerkin), DomainError);
        CycleConfig neg;
        neg.omega = 0.0;
        CHECK_THROWS_AS(build_hierarchy(s.op, GridShape::line(15), neg, Coarsening::Galerkin), DomainError);
        CHECK_THROWS_AS(build_hierarchy(s.op, GridShape::line(15), CycleConfig{}, Coarsening::Geometric), DomainError);
        CHECK_THROWS_AS(build_hierarchy(s.op, GridShape::line(14), CycleConfig{}, Coarsening::Galerkin), SizeMismatch);
    }
}

TEST_CASE("V-cycle") {
    const SteadyLine s(1.5, 2.0, 0.01, 127);
    const Hierarchy h = build_hierarchy(s.op, GridShape::line(127), CycleConfig{}, Coarsening::Geometric, s.factory);

    SUBCASE("exact solution stays put") {
        const Vector u = oracle::random_vector(127, 5);
        const Vector b = s.op->apply(u);
        Vector v = u;
        v_cycle(h, v, b);
        Vector r = s.op->apply(v);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
        CHECK(norm2(r) <= 1e-12 * norm2(b));
    }

    SUBCASE("zero right-hand side converges in zero iterations") {
        const SolveResult res = mg_solve(h, Vector(127, 0.0), 1e-7, 50);
        CHECK(res.report.iterations == 0);
        CHECK(res.report.converged);
        for (double x : res.x) CHECK(x == 0.0);
    }

    SUBCASE("A-norm of the error decreases every cycle") {
        const Eigen::MatrixXd A = oracle::dense(*s.op);
        const Vector u = oracle::random_vector(127, 6);
        const Vector b = s.op->apply(u);
        Vector v(127, 0.0);
        auto anorm = [&] {
            Eigen::VectorXd e = oracle::to_eigen(v) - oracle::to_eigen(u);
            return std::sqrt(e.dot(A * e));
        };
        double prev = anorm();
        for (int k = 0; k < 8; ++k) {
            v_cycle(h, v, b);
            const double cur = anorm();
            CHECK(cur < prev);
            prev = cur;
        }
    }

    SUBCASE("mg_solve reaches the tolerance") {
        const Vector b = oracle::random_vector(127, 7);
        const SolveResult res = mg_solve(h, b, 1e-7, 100);
        CHECK(res.report.converged);
        CHECK(res.report.final_relres < 1e-7);
        CHECK(res.report.history.size() == res.report.iterations + 1);
        CHECK_THROWS_AS(mg_solve(h, b, 0.0, 10), DomainError);
    }
}

TEST_CASE("cycle contraction is independent of the grid size") {
    auto contraction = [](std::size_t M) {
        const SteadyLine s(1.5, 2.0, 0.01, M);
        const Hierarchy h = build_hierarchy(s.op, GridShape::line(M), CycleConfig{}, Coarsening::Geometric, s.factory);
        Vector e = oracle::random_vector(M, 9);
        const Vector zero(M, 0.0);
        double rate = 0.0;
        for (int k = 0; k < 40; ++k) {
            const double before = norm2(e);
            v_cycle(h, e, zero);
            rate = norm2(e) / before;
            const double n = norm2(e);
            for (double& x : e) x /= n;
        }
        return rate;
    };
    const double r32 = contraction(32), r512 = contraction(512);
    CHECK(r32 < 1.0);
    CHECK(r512 < 1.0);
    CHECK(std::abs(r32 - r512) <= 0.1);
}

TEST_CASE("standalone multigrid iteration counts") {
    CHECK(std::abs(mg_iterations(1, sized(128, 1.5, 2.0), 1, 1, 0.7) - 5.0) <= 1.0);
    CHECK(std::abs(mg_iterations(1, sized(256, 1.8, 10.0), 1, 1, 0.7) - 7.0) <= 1.0);
    CHECK(std::abs(mg_iterations(2, sized(512, 1.4), 1, 1, 0.8) - 9.0) <= 1.0);
    const double ws19 = auto_omega(example(2, sized(1024, 1.9)));
    CHECK(std::abs(mg_iterations(2, sized(1024, 1.9), 1, 1, ws19) - 11.0) <= 1.0);
    const double ws17 = auto_omega(example(2, sized(512, 1.7)));
    CHECK(std::abs(mg_iterations(2, sized(512, 1.7), 1, 1, ws17) - 10.0) <= 1.0);
}

TEST_CASE("Galerkin and geometric coarsening agree") {
    for (double alpha : {1.4, 1.9}) {
        const double ws = auto_omega(example(2, sized(256, alpha)));
        const double geo = mg_iterations(2, sized(256, alpha), 1, 1, ws, Coarsening::Geometric);
        const double gal = mg_iterations(2, sized(256, alpha), 1, 1, ws, Coarsening::Galerkin);
        CHECK(std::abs(geo - gal) <= 2.0);
    }
}
