#include "tfde/cli.hpp"

#include "tfde/errors.hpp"
#include "tfde/symbol.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace tfde {

std::string format_number(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

void bind(CLI::App& app, RunConfig& c) {
    app.add_option("--problem", c.problem, "Example id 1..5");
    app.add_option("--alpha", c.alpha, "Fractional order in x");
    app.add_option("--beta", c.beta, "Fractional order in y");
    app.add_option("--lambda", c.lambda, "Tempering (both directions unless --lambda2)");
    app.add_option("--lambda2", c.lambda2, "Tempering in y");
    app.add_option("--gamma3", c.gamma3, "Shift weight");
    app.add_option("--T", c.T, "Final time");
    app.add_option("--a", c.a, "Left end of the domain");
    app.add_option("--b", c.b, "Right end of the domain");
    app.add_option("--spacing", c.h, "Grid spacing");
    app.add_option("--M", c.M, "Interior points per dimension");
    app.add_option("--N", c.N, "Time steps");
    app.add_option("--K", c.K, "Stencil length (weights)");
    app.add_option("--solver", c.solver, "cg | gmres | mg");
    app.add_option("--precond", c.precond, "none | mg:nu1,nu2 | circulant | laplacian | laplacian-inner:nu");
    app.add_option("--omega", c.omega, "Jacobi weight or auto");
    app.add_option("--coarsening", c.coarsening, "geometric | galerkin");
    app.add_option("--min-size", c.min_size, "Coarsest level size");
    app.add_option("--nu1", c.nu1, "Pre-smoothing sweeps");
    app.add_option("--nu2", c.nu2, "Post-smoothing sweeps");
    app.add_option("--tol", c.tol, "Relative residual tolerance");
    app.add_option("--maxit", c.maxit, "Iteration cap");
    app.add_option("--reference", c.reference, "initial | rhs");
    app.add_option("--forcing", c.forcing, "discrete | analytic");
    app.add_option("--table", c.table, "Table 1..5");
    app.add_option("--sizes", c.sizes, "Sizes")->delimiter(',');
    app.add_option("--lambdas", c.lambdas, "Tempering values")->delimiter(',');
    app.add_option("--alphas", c.alphas, "Orders")->delimiter(',');
    app.add_option("--threads", c.threads, "Worker threads (experiment)");
    app.add_option("--points", c.points, "Symbol scan points");
    app.add_option("--repetitions", c.repetitions, "Timing repetitions");
    app.add_option("--p", c.p, "Monomial power (consistency)");
    app.add_option("--side", c.side, "left | right");
    app.add_option("--format", c.format, "csv | pretty");
    app.add_option("--output", c.output, "Output file");
}

template <class T>
void put(std::ostream& os, const char* key, const std::optional<T>& v) {
    if (!v) return;
    os << key << '=';
    if constexpr (std::is_same_v<T, std::string>) {
        os << '"' << *v << '"';
    } else if constexpr (std::is_floating_point_v<T>) {
        os << format_number(*v);
    } else {
        os << *v;
    }
    os << '\n';
}

template <class T>
void put_list(std::ostream& os, const char* key, const std::vector<T>& v) {
    if (v.empty()) return;
    os << key << "=[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        if constexpr (std::is_floating_point_v<T>) {
            os << format_number(v[i]);
        } else {
            os << v[i];
        }
    }
    os << "]\n";
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + '"';
}

std::vector<std::string> row_cells(const ResultRow& r) {
    return {format_number(r.lambda),
            format_number(r.alpha),
            opt(r.beta),
            std::to_string(r.M),
            std::to_string(r.N),
            opt(r.omega),
            r.solver,
            r.precond,
            opt(r.avg_iters),
            format_number(r.cpu_seconds),
            opt(r.final_relres),
            opt(r.error_inf),
            opt(r.error_l2)};
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cells.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cells.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.emplace_back();
        } else {
            cells.back() += ch;
        }
    }
    return cells;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw DomainError("malformed number '" + s + "'");
    return v;
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

SolverKind parse_solver(const std::string& s) {
    if (s == "cg") return SolverKind::CG;
    if (s == "gmres") return SolverKind::GMRES;
    if (s == "mg") return SolverKind::MG;
    throw DomainError("unknown solver '" + s + "'");
}

Coarsening parse_coarsening(const std::string& s) {
    if (s == "geometric") return Coarsening::Geometric;
    if (s == "galerkin") return Coarsening::Galerkin;
    throw DomainError("unknown coarsening '" + s + "'");
}

ResidualReference parse_reference(const std::string& s) {
    if (s == "initial") return ResidualReference::InitialResidual;
    if (s == "rhs") return ResidualReference::RightHandSide;
    throw DomainError("unknown residual reference '" + s + "'");
}

TableFormat parse_format(const std::optional<std::string>& s) {
    if (!s || *s == "csv") return TableFormat::Csv;
    if (*s == "pretty") return TableFormat::Pretty;
    throw DomainError("unknown format '" + *s + "'");
}

Overrides overrides_of(const RunConfig& c) {
    Overrides o;
    o.alpha = c.alpha;
    o.beta = c.beta;
    o.lambda1 = c.lambda;
    o.lambda2 = c.lambda2;
    o.gamma3 = c.gamma3;
    o.T = c.T;
    o.a = c.a;
    o.b = c.b;
    o.M = c.M;
    o.N = c.N;
    if (c.forcing) {
        if (*c.forcing == "discrete") {
            o.forcing = ForcingMode::DiscreteManufactured;
        } else if (*c.forcing == "analytic") {
            o.forcing = ForcingMode::AnalyticSeries;
        } else {
            throw DomainError("unknown forcing '" + *c.forcing + "'");
        }
    }
    return o;
}

// Writes to --output when given, else to `out`.
template <class F>
void with_output(const RunConfig& c, std::ostream& out, F&& body) {
    if (c.output) {
        std::ofstream f(*c.output);
        if (!f) throw std::runtime_error("cannot open " + *c.output);
        body(f);
    } else {
        body(out);
    }
}

int cmd_weights(const RunConfig& c, std::ostream& out) {
    const FractionalParams p = make_params(c.alpha.value_or(1.5), c.gamma3.value_or(0.0), c.lambda.value_or(0.0));
    const double h = c.h.value_or(0.1);
    const TemperedStencil s = tempered_stencil(p, h, std::max<std::size_t>(2, c.K.value_or(10)));
    with_output(c, out, [&](std::ostream& os) {
        os << "# alpha=" << format_number(p.alpha) << " gamma1=" << format_number(p.gamma1)
           << " gamma2=" << format_number(p.gamma2) << " gamma3=" << format_number(p.gamma3)
           << " lambda=" << format_number(p.lambda) << " h=" << format_number(h) << " phi=" << format_number(s.phi)
           << (p.valid ? "" : " (gamma3 outside the sign-pattern interval)") << '\n';
        os << "k omega g\n";
        for (std::size_t k = 0; k < s.g.size(); ++k) {
            os << k << ' ' << format_number(s.omega[k]) << ' ' << format_number(s.g[k]) << '\n';
        }
    });
    return 0;
}

int cmd_symbol(const RunConfig& c, std::ostream& out) {
    SymbolSpec spec;
    spec.alpha = c.alpha.value_or(1.5);
    spec.gamma3 = c.gamma3.value_or(0.0);
    spec.beta = c.beta;
    const int dims = c.beta ? 2 : 1;
    const SmoothingBound sb = smoothing_bound(spec, dims);
    std::ostringstream rounded;
    rounded << std::fixed << std::setprecision(dims == 2 ? 4 : 2) << sb.omega_star;
    out << "alpha=" << format_number(spec.alpha);
    if (spec.beta) out << " beta=" << format_number(*spec.beta);
    out << " gamma3=" << format_number(spec.gamma3) << " xi=" << format_number(sb.xi)
        << " omega_star=" << format_number(sb.omega_star) << " omega_star_rounded=" << rounded.str() << '\n';
    if (c.M) {
        const FractionalParams p = make_params(spec.alpha, spec.gamma3, c.lambda.value_or(0.0));
        const double h = c.h.value_or(1.0 / static_cast<double>(*c.M + 1));
        with_output(c, out, [&](std::ostream& os) {
            os << "# x f_M f\n";
            write_symbol_scan(os, p, h, *c.M, c.points.value_or(2048));
        });
    }
    return 0;
}

SolverConfig solver_config(const RunConfig& c, const ProblemSpec& p, std::optional<double>& omega_used) {
    SolverConfig s;
    s.solver = parse_solver(c.solver.value_or("mg"));
    s.options.tol = c.tol.value_or(1e-7);
    s.options.maxit = c.maxit.value_or(1000);
    if (!(s.options.tol > 0.0)) throw DomainError("tol must be positive");
    if (c.reference) s.options.reference = parse_reference(*c.reference);
    const std::string w = c.omega.value_or("auto");
    const double omega = w == "auto" ? auto_omega(p) : parse_double(w);
    const Coarsening coarsening = parse_coarsening(c.coarsening.value_or("geometric"));
    CycleConfig cycle;
    cycle.nu1 = c.nu1.value_or(1);
    cycle.nu2 = c.nu2.value_or(1);
    cycle.omega = omega;
    cycle.min_size = c.min_size.value_or(16);
    s.cycle = cycle;
    s.coarsening = coarsening;
    if (s.solver != SolverKind::MG) {
        s.precond = PreconditionerSpec::parse(c.precond.value_or("none"));
        s.precond.coarsening = coarsening;
        s.precond.cycle.omega = omega;
        s.precond.cycle.min_size = cycle.min_size;
        if (s.precond.kind == PreconditionerSpec::Kind::Multigrid) omega_used = omega;
    } else {
        omega_used = omega;
    }
    return s;
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    spec.problem = c.problem.value_or(1);
    spec.overrides = overrides_of(c);
    const ProblemSpec p = example(spec.problem, spec.overrides);
    // outside the interval the sign pattern of g_k is not guaranteed; the run still proceeds
    if (!gamma3_interval(p.alpha).contains(p.gamma3) ||
        (p.dims == 2 && !gamma3_interval(p.beta).contains(p.gamma3))) {
        err << "warning: gamma3=" << p.gamma3 << " outside the sign-pattern interval\n";
    }
    spec.config = solver_config(c, p, spec.omega);
    const ResultRow row = run_one(spec, c.repetitions.value_or(1));
    with_output(c, out, [&](std::ostream& os) { os << emit_table({row}, parse_format(c.format)); });
    if (!row.ok()) throw std::runtime_error(row.error);
    return 0;
}

int cmd_experiment(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (!c.table) throw DomainError("experiment needs --table");
    TablePlanOptions opts;
    opts.sizes = c.sizes;
    opts.lambdas = c.lambdas;
    opts.alphas = c.alphas;
    if (c.reference) opts.reference = parse_reference(*c.reference);
    if (c.maxit) opts.maxit = *c.maxit;
    opts.coarsening = parse_coarsening(c.coarsening.value_or("geometric"));
    ExperimentPlan plan = table_plan(*c.table, opts);
    plan.repetitions = c.repetitions.value_or(1);
    const auto rows = run_experiment(plan, c.threads.value_or(0));
    with_output(c, out, [&](std::ostream& os) { os << emit_table(rows, parse_format(c.format)); });
    int failures = 0;
    for (const auto& r : rows) {
        if (!r.ok()) {
            err << "run failed (" << r.solver << ' ' << r.precond << " M=" << r.M << "): " << r.error << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_consistency(const RunConfig& c, std::ostream& out) {
    const FractionalParams p = make_params(c.alpha.value_or(1.5), c.gamma3.value_or(0.01), c.lambda.value_or(2.0));
    const Side side = c.side.value_or("left") == "right" ? Side::Right : Side::Left;
    const std::vector<std::size_t> sizes = c.sizes.empty() ? std::vector<std::size_t>{31, 63, 127, 255, 511} : c.sizes;
    const ConsistencyResult res = consistency_order(p, side, c.p.value_or(4.0), sizes);
    with_output(c, out, [&](std::ostream& os) {
        os << "h error slope\n";
        for (std::size_t k = 0; k < res.h.size(); ++k) {
            os << format_number(res.h[k]) << ' ' << format_number(res.error[k]) << ' '
               << (k > 0 ? format_number(res.slopes[k - 1]) : std::string("-")) << '\n';
        }
        os << "order=" << format_number(res.order) << '\n';
    });
    return 0;
}

}  // namespace

std::string to_config_text(const RunConfig& c) {
    std::ostringstream os;
    put(os, "problem", c.problem);
    put(os, "alpha", c.alpha);
    put(os, "beta", c.beta);
    put(os, "lambda", c.lambda);
    put(os, "lambda2", c.lambda2);
    put(os, "gamma3", c.gamma3);
    put(os, "T", c.T);
    put(os, "a", c.a);
    put(os, "b", c.b);
    put(os, "spacing", c.h);
    put(os, "M", c.M);
    put(os, "N", c.N);
    put(os, "K", c.K);
    put(os, "solver", c.solver);
    put(os, "precond", c.precond);
    put(os, "omega", c.omega);
    put(os, "coarsening", c.coarsening);
    put(os, "min-size", c.min_size);
    put(os, "nu1", c.nu1);
    put(os, "nu2", c.nu2);
    put(os, "tol", c.tol);
    put(os, "maxit", c.maxit);
    put(os, "reference", c.reference);
    put(os, "forcing", c.forcing);
    put(os, "table", c.table);
    put_list(os, "sizes", c.sizes);
    put_list(os, "lambdas", c.lambdas);
    put_list(os, "alphas", c.alphas);
    put(os, "threads", c.threads);
    put(os, "points", c.points);
    put(os, "repetitions", c.repetitions);
    put(os, "p", c.p);
    put(os, "side", c.side);
    put(os, "format", c.format);
    put(os, "output", c.output);
    return os.str();
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig c;
    CLI::App app;
    bind(app, c);
    app.allow_config_extras(CLI::config_extras_mode::error);
    std::istringstream is{std::string(text)};
    try {
        app.parse_from_stream(is);
    } catch (const CLI::Error& e) {
        throw DomainError(std::string("malformed config: ") + e.what());
    }
    return c;
}

std::string emit_table(const std::vector<ResultRow>& rows, TableFormat format) {
    std::ostringstream os;
    if (format == TableFormat::Csv) {
        os << kCsvHeader << '\n';
        for (const auto& r : rows) {
            const auto cells = row_cells(r);
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_field(cells[i]);
            os << '\n';
        }
        return os.str();
    }
    std::vector<std::vector<std::string>> table;
    table.push_back(split_csv_line(kCsvHeader));
    for (const auto& r : rows) {
        auto cells = row_cells(r);
        // shorter numbers for reading; the CSV keeps full precision
        auto shorten = [](std::string& s, int digits) {
            if (s.empty()) return;
            std::ostringstream t;
            t << std::setprecision(digits) << parse_double(s);
            s = t.str();
        };
        shorten(cells[8], 4);
        shorten(cells[9], 3);
        for (int k : {10, 11, 12}) shorten(cells[static_cast<std::size_t>(k)], 3);
        table.push_back(std::move(cells));
    }
    std::vector<std::size_t> width(table.front().size(), 0);
    for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    for (const auto& row : table) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << row[i];
        }
        os << '\n';
    }
    return os.str();
}

std::vector<ResultRow> parse_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw DomainError("CSV header mismatch");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 13) throw DomainError("CSV row has " + std::to_string(cells.size()) + " fields");
        ResultRow r;
        r.lambda = parse_double(cells[0]);
        r.alpha = parse_double(cells[1]);
        r.beta = parse_opt(cells[2]);
        r.M = static_cast<std::size_t>(parse_double(cells[3]));
        r.N = static_cast<std::size_t>(parse_double(cells[4]));
        r.omega = parse_opt(cells[5]);
        r.solver = cells[6];
        r.precond = cells[7];
        r.avg_iters = parse_opt(cells[8]);
        r.cpu_seconds = parse_double(cells[9]);
        r.final_relres = parse_opt(cells[10]);
        r.error_inf = parse_opt(cells[11]);
        r.error_l2 = parse_opt(cells[12]);
        rows.push_back(std::move(r));
    }
    return rows;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    static const char* usage =
        "usage: tfde_cli <weights|symbol|solve|experiment|consistency> [options] [--config FILE]\n";
    if (argc < 2) {
        err << usage;
        return 2;
    }
    const std::string cmd = argv[1];
    if (cmd == "-h" || cmd == "--help") {
        out << usage;
        return 0;
    }
    RunConfig c;
    CLI::App app("tempered fractional diffusion toolkit: " + cmd, "tfde_cli " + cmd);
    bind(app, c);
    app.set_config("--config", "", "key=value configuration file; flags take precedence");
    try {
        app.parse(argc - 1, argv + 1);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    try {
        if (cmd == "weights") return cmd_weights(c, out);
        if (cmd == "symbol") return cmd_symbol(c, out);
        if (cmd == "solve") return cmd_solve(c, out, err);
        if (cmd == "experiment") return cmd_experiment(c, out, err);
        if (cmd == "consistency") return cmd_consistency(c, out);
        err << "unknown subcommand '" << cmd << "'\n" << usage;
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tfde
