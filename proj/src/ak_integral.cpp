#include "aklab/ak_integral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aklab/stats.hpp"

namespace aklab {

double ak_integral(const IntegrandSpec& spec, const IntegrandContext& ctx,
                   std::size_t t_node) {
    const auto& path = ctx.path();
    double acc = 0.0;
    for (const auto& term : spec.terms) {
        double s = 0.0;
        for (std::size_t j = 1; j <= t_node; ++j)
            s += ctx.eval(term.adapted, j - 1) * ctx.eval(term.instant, j) *
                 path.increment(j - 1);
        acc += s;
    }
    return acc;
}

double ak_integral(const IntegrandSpec& spec, const BrownianPath& path,
                   double t_end) {
    spec.validate();
    const std::size_t t_node = path.grid.index_of(t_end);
    IntegrandContext ctx(spec, path);
    return ak_integral(spec, ctx, t_node);
}

RefinementReport refinement_study(const IntegrandSpec& spec, std::uint64_t seed,
                                  const std::vector<int>& levels,
                                  std::size_t n_paths, double t_int,
                                  const PathReference& reference) {
    spec.validate();
    if (levels.size() < 3)
        throw std::invalid_argument("refinement_study: need at least 3 levels");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw std::invalid_argument("refinement_study: levels must be increasing");

    RefinementReport rep;
    rep.levels = levels;
    rep.n_paths = n_paths;
    rep.values.assign(levels.size(), std::vector<double>(n_paths, 0.0));
    std::vector<std::vector<double>> errs(
        levels.size(), std::vector<double>(reference ? n_paths : 0, 0.0));

    for (std::size_t p = 0; p < n_paths; ++p) {
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const Grid g(levels[l], 1.0);
            const std::size_t t_node = g.index_of(t_int);
            const BrownianPath path = sample_brownian(g, seed, p);
            IntegrandContext ctx(spec, path);
            rep.values[l][p] = ak_integral(spec, ctx, t_node);
            if (reference)
                errs[l][p] = std::fabs(rep.values[l][p] - reference(path, t_node));
        }
    }

    std::vector<double> log_mesh, log_diff;
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        std::vector<double> d(n_paths);
        for (std::size_t p = 0; p < n_paths; ++p)
            d[p] = std::fabs(rep.values[l + 1][p] - rep.values[l][p]);
        const double med = median(d);
        rep.median_abs_diff.push_back(med);
        if (med > 0.0) {
            log_mesh.push_back(std::log2(1.0 / levels[l]));
            log_diff.push_back(std::log2(med));
        }
    }
    rep.observed_order = log_mesh.size() >= 2 ? ls_slope(log_mesh, log_diff) : 0.0;

    if (reference) {
        for (std::size_t l = 0; l < levels.size(); ++l)
            rep.median_abs_error.push_back(median(errs[l]));
        rep.errors_decreasing = true;
        for (std::size_t l = 0; l + 1 < rep.median_abs_error.size(); ++l)
            if (!(rep.median_abs_error[l + 1] < rep.median_abs_error[l]))
                rep.errors_decreasing = false;
    }
    return rep;
}

}  // namespace aklab
