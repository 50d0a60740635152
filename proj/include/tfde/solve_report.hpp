#pragma once

#include "tfde/linear_operator.hpp"

#include <cstddef>

namespace tfde {

struct SolveReport {
    std::size_t iterations = 0;
    /// Relative residual after each iteration, starting with iteration 0.
    Vector history;
    double seconds = 0.0;
    bool converged = false;
    /// ||b - A x|| / ||b - A x0|| at exit (||b|| if x0 gives a zero residual base).
    double final_relres = 0.0;
};

struct SolveResult {
    Vector x;
    SolveReport report;
};

}  // namespace tfde
