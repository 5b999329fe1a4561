#include "aklab/optim.hpp"

#include <cmath>
#include <deque>

namespace aklab {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

LbfgsResult lbfgs_minimize(
    std::vector<double> x0,
    const std::function<double(const std::vector<double>&, std::vector<double>&)>& fg,
    const LbfgsOptions& opts) {
    const std::size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);

    std::vector<double> g(n), x_new(n), g_new(n), d(n);
    double f = fg(res.x, g);

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int it = 0; it < opts.max_iters; ++it) {
        if (max_abs(g) < opts.grad_tol) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        d = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], d);
            for (std::size_t j = 0; j < n; ++j) d[j] -= alpha[i] * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            const double gamma = dot(s_hist.back(), y_hist.back()) /
                                 dot(y_hist.back(), y_hist.back());
            for (double& v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dot(y_hist[i], d);
            for (std::size_t j = 0; j < n; ++j)
                d[j] += (alpha[i] - beta) * s_hist[i][j];
        }
        for (double& v : d) v = -v;

        double gd = dot(g, d);
        if (gd >= 0.0) {  // not a descent direction; fall back to steepest descent
            for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
            gd = dot(g, d);
        }

        // Armijo backtracking.
        double step = 1.0;
        double f_new = f;
        bool accepted = false;
        for (int ls = 0; ls < opts.max_line_search; ++ls) {
            for (std::size_t j = 0; j < n; ++j) x_new[j] = res.x[j] + step * d[j];
            f_new = fg(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + opts.armijo_c * step * gd) {
                accepted = true;
                break;
            }
            step *= opts.step_shrink;
        }
        if (!accepted) {
            res.converged = max_abs(g) < 1e3 * opts.grad_tol;
            break;
        }

        std::vector<double> s_vec(n), y_vec(n);
        for (std::size_t j = 0; j < n; ++j) {
            s_vec[j] = x_new[j] - res.x[j];
            y_vec[j] = g_new[j] - g[j];
        }
        const double sy = dot(s_vec, y_vec);
        if (sy > 1e-14 * std::sqrt(dot(s_vec, s_vec)) * std::sqrt(dot(y_vec, y_vec))) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        const double f_prev = f;
        res.x = x_new;
        g = g_new;
        f = f_new;
        ++res.iterations;

        if (std::fabs(f_prev - f) <=
            opts.rel_f_tol * std::max({1.0, std::fabs(f_prev), std::fabs(f)})) {
            res.converged = true;
            break;
        }
    }
    res.f = f;
    if (max_abs(g) < opts.grad_tol) res.converged = true;
    return res;
}

}  // namespace aklab
