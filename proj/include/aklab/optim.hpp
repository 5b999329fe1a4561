#pragma once

#include <functional>
#include <vector>

namespace aklab {

struct LbfgsOptions {
    int max_iters = 500;
    int history = 10;
    double grad_tol = 1e-10;     // on the max-norm of the gradient
    double rel_f_tol = 1e-14;    // relative objective decrease
    double armijo_c = 1e-4;
    double step_shrink = 0.5;
    int max_line_search = 50;
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Limited-memory BFGS with two-loop recursion and Armijo backtracking.
/// `fg` evaluates the objective and writes the gradient.
LbfgsResult lbfgs_minimize(
    std::vector<double> x0,
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
    const LbfgsOptions& opts = {});

}  // namespace aklab
