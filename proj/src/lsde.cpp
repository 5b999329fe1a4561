#include "aklab/lsde.hpp"

#include <cmath>
#include <stdexcept>

#include "aklab/stats.hpp"

namespace aklab {

namespace {

struct CurveTables {
    std::vector<double> stoch;   // cumulative left sums of sigma_eff dW
    std::vector<double> quad;    // cumulative trapezoid of sigma_eff^2
    std::vector<double> cross;   // cumulative trapezoid of gamma_eff * sigma_eff
    double i_gamma = 0.0;        // int_0^1 gamma_eff dW
    bool const_coeffs = false;
};

CurveTables build_tables(const ModelSpec& model, const BrownianPath& path) {
    const DetFn se = model.sigma_eff();
    const DetFn ge = model.gamma_eff();
    CurveTables t;
    t.stoch = cum_stoch_integral(path, se);
    t.quad = cumtrapz_product(path.grid, se, se);
    t.cross = cumtrapz_product(path.grid, ge, se);
    t.i_gamma = wiener_integral(ge, path);
    t.const_coeffs = model.sigma.is_constant() && model.gamma.is_constant();
    return t;
}

// Trapezoid over s-nodes [0..k] of h(i_gamma - (G_k - G_s)), for all k.
// With constant coefficients G is arithmetic, so the integrand depends only on
// k - s and prefix sums give the whole curve in O(n).
template <typename H>
std::vector<double> drift_curve(const Grid& grid, const std::vector<double>& G,
                                double i_gamma, bool const_coeffs, H&& h) {
    const std::size_t nn = grid.num_nodes();
    std::vector<double> out(nn, 0.0);
    const double dt = grid.dt();
    if (const_coeffs) {
        std::vector<double> hv(nn), prefix(nn);
        for (std::size_t m = 0; m < nn; ++m) {
            hv[m] = h(i_gamma - G[m]);
            prefix[m] = (m == 0 ? 0.0 : prefix[m - 1]) + hv[m];
        }
        for (std::size_t k = 1; k < nn; ++k)
            out[k] = dt * (prefix[k] - 0.5 * hv[k] - 0.5 * hv[0]);
        return out;
    }
    for (std::size_t k = 1; k < nn; ++k) {
        double acc = 0.5 * h(i_gamma - (G[k] - G[0])) + 0.5 * h(i_gamma);
        for (std::size_t s = 1; s < k; ++s) acc += h(i_gamma - (G[k] - G[s]));
        out[k] = dt * acc;
    }
    return out;
}

double drift_at(const Grid& grid, const std::vector<double>& G, double i_gamma,
                const DetFn& f, std::size_t k) {
    if (k == 0) return 0.0;
    double acc = 0.5 * f(i_gamma - (G[k] - G[0])) + 0.5 * f(i_gamma);
    for (std::size_t s = 1; s < k; ++s) acc += f(i_gamma - (G[k] - G[s]));
    return grid.dt() * acc;
}

}  // namespace

std::vector<double> closed_form_log_curve(const ModelSpec& model,
                                          const BrownianPath& path) {
    model.validate();
    const CurveTables t = build_tables(model, path);
    const DetFn& f = model.f;
    auto drift = drift_curve(path.grid, t.cross, t.i_gamma, t.const_coeffs,
                             [&f](double x) { return f(x); });
    std::vector<double> out(path.values.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = t.stoch[k] - 0.5 * t.quad[k] + drift[k];
    return out;
}

double closed_form_log_at(const ModelSpec& model, const BrownianPath& path,
                          std::size_t t_node) {
    model.validate();
    const CurveTables t = build_tables(model, path);
    return t.stoch[t_node] - 0.5 * t.quad[t_node] +
           drift_at(path.grid, t.cross, t.i_gamma, model.f, t_node);
}

double closed_form_Z(const ModelSpec& model, const BrownianPath& path, double t) {
    if (model.xi.is_functional())
        throw std::invalid_argument(
            "closed_form_Z: requires an initial condition independent of W");
    const std::size_t k = path.grid.index_of(t);
    const double xi = model.xi_realized(path.seed, path.path_index);
    return xi * std::exp(closed_form_log_at(model, path, k));
}

double skorokhod_base_step(double xi_value_on_shifted_path,
                           const BrownianPath& path, const DetFn& sigma,
                           double u, double v) {
    if (u > v) throw std::invalid_argument("skorokhod_base_step: requires u <= v");
    return xi_value_on_shifted_path * stochastic_exponential(path, sigma, u, v);
}

BraidTrace braid_solve(const ModelSpec& model, const BrownianPath& path,
                       double t, int stride) {
    model.validate();
    if (stride < 1) throw std::invalid_argument("braid_solve: stride must be >= 1");
    const std::size_t t_node = path.grid.index_of(t);
    if (t_node == 0) throw std::invalid_argument("braid_solve: t must be positive");
    if (t_node % static_cast<std::size_t>(stride) != 0)
        throw std::invalid_argument(
            "braid_solve: braiding partition must be nested in the path grid");

    const CurveTables tab = build_tables(model, path);
    const DetFn& f = model.f;

    // Initial-condition bookkeeping under the accumulated shift A_0^{t_k}.
    const bool functional = model.xi.is_functional();
    double xi_plain = 0.0;
    std::vector<double> xi_cross;  // cumulative trapezoid of kernel * sigma_eff
    double xi_base = 0.0;          // int_0^1 kernel dW on the unshifted path
    if (functional) {
        xi_cross = cumtrapz_product(path.grid, model.xi.kernel, model.sigma_eff());
        xi_base = wiener_integral(model.xi.kernel, path);
    } else {
        xi_plain = model.xi_realized(path.seed, path.path_index);
    }

    BraidTrace trace;
    trace.subintervals = static_cast<int>(t_node / static_cast<std::size_t>(stride));
    trace.records.reserve(trace.subintervals);

    std::vector<double> factor_arg;  // drift factors' shifted arguments
    std::vector<double> factor_dt;
    factor_arg.reserve(trace.subintervals);
    factor_dt.reserve(trace.subintervals);

    double log_exponential = 0.0;
    double xi_shift = 0.0;
    double last_x = 0.0;

    for (std::size_t b = stride; b <= t_node; b += stride) {
        const std::size_t a = b - stride;

        // Diffusion step: compose the accumulated state with A_a^b and
        // multiply by E_a^b.
        const double dG = tab.cross[b] - tab.cross[a];
        for (double& arg : factor_arg) arg -= dG;
        if (functional) xi_shift += xi_cross[b] - xi_cross[a];
        log_exponential +=
            (tab.stoch[b] - tab.stoch[a]) - 0.5 * (tab.quad[b] - tab.quad[a]);

        const double xi_cur =
            functional ? model.xi.map(xi_base - xi_shift) : xi_plain;
        double drift_log = 0.0;
        for (std::size_t i = 0; i < factor_arg.size(); ++i)
            drift_log += f(factor_arg[i]) * factor_dt[i];
        const double y_end = xi_cur * std::exp(log_exponential + drift_log);

        // Drift step: a new factor g over [t_a, t_b] born with argument I_g.
        factor_arg.push_back(tab.i_gamma);
        factor_dt.push_back(path.grid.node(b) - path.grid.node(a));
        drift_log += f(tab.i_gamma) * factor_dt.back();
        const double x_end = xi_cur * std::exp(log_exponential + drift_log);

        // Product formula, evaluated from scratch.
        double pf_drift = 0.0;
        for (std::size_t i = stride; i <= b; i += stride)
            pf_drift += f(tab.i_gamma - (tab.cross[b] - tab.cross[i])) *
                        (path.grid.node(i) - path.grid.node(i - stride));
        const double xi_pf =
            functional ? model.xi.map(xi_base - (xi_cross[b] - xi_cross[0]))
                       : xi_plain;
        const double pf =
            xi_pf * std::exp(tab.stoch[b] - 0.5 * tab.quad[b] + pf_drift);

        const double denom = std::max(std::fabs(pf), 1e-300);
        BraidRecord rec;
        rec.node = b;
        rec.t = path.grid.node(b);
        rec.diffusion_endpoint = y_end;
        rec.drift_endpoint = x_end;
        rec.product_formula = pf;
        rec.rel_identity_dev = std::fabs(x_end - pf) / denom;
        trace.max_rel_identity_dev =
            std::max(trace.max_rel_identity_dev, rec.rel_identity_dev);
        trace.records.push_back(rec);
        last_x = x_end;
    }
    trace.final_value = last_x;
    return trace;
}

SquaredSdeReport squared_sde_residual(const ModelSpec& model,
                                      const std::vector<int>& levels,
                                      std::size_t n_paths, std::uint64_t seed) {
    model.validate();
    if (levels.size() < 2)
        throw std::invalid_argument("squared_sde_residual: need at least 2 dt levels");
    if (model.xi.is_functional())
        throw std::invalid_argument(
            "squared_sde_residual: requires closed-form trajectories, so xi "
            "must be independent of W");

    SquaredSdeReport rep;
    rep.levels = levels;
    rep.n_paths = n_paths;

    const DetFn se = model.sigma_eff();
    const DetFn ge = model.gamma_eff();
    const DetFn& f = model.f;

    std::vector<double> log_dt, log_absmean;
    for (int n : levels) {
        const Grid grid(n, 1.0);
        RunningStat path_means;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const BrownianPath path = sample_brownian(grid, seed, p);
            const CurveTables tab = build_tables(model, path);
            auto logz = [&] {
                auto drift = drift_curve(grid, tab.cross, tab.i_gamma,
                                         tab.const_coeffs,
                                         [&f](double x) { return f(x); });
                std::vector<double> out(path.values.size());
                for (std::size_t k = 0; k < out.size(); ++k)
                    out[k] = tab.stoch[k] - 0.5 * tab.quad[k] + drift[k];
                return out;
            }();
            const auto dcurve = drift_curve(grid, tab.cross, tab.i_gamma,
                                            tab.const_coeffs,
                                            [&f](double x) { return f.deriv(x); });
            const double xi = model.xi_realized(seed, p);
            const double f_ig = f(tab.i_gamma);

            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
                const double tj = grid.node(j);
                const double v0 = xi * xi * std::exp(2.0 * logz[j]);
                const double v1 = xi * xi * std::exp(2.0 * logz[j + 1]);
                const double s = se(tj);
                const double g = ge(tj);
                const double drift =
                    (s * s + f_ig + 2.0 * g * s * dcurve[j]) * v0;
                const double r = v1 - v0 - drift * grid.dt() -
                                 2.0 * s * v0 * path.increment(j);
                acc += r;
            }
            path_means.add(acc / static_cast<double>(n));
        }
        rep.mean_residual.push_back(path_means.mean());
        rep.se.push_back(path_means.std_error());
        rep.abs_mean.push_back(std::fabs(path_means.mean()));
        log_dt.push_back(std::log(1.0 / static_cast<double>(n)));
        log_absmean.push_back(std::log(std::max(rep.abs_mean.back(), 1e-300)));
    }
    rep.observed_order = ls_slope(log_dt, log_absmean);
    return rep;
}

}  // namespace aklab
