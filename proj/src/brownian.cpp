#include "aklab/brownian.hpp"

#include <cmath>
#include <stdexcept>

#include "aklab/rng.hpp"

namespace aklab {

BrownianPath sample_brownian(const Grid& grid, std::uint64_t seed,
                             std::uint64_t path_index) {
    const int n = grid.intervals();
    int c = n, L = 0;
    while (c % 2 == 0) {
        c /= 2;
        ++L;
    }

    BrownianPath path{grid, std::vector<double>(grid.num_nodes(), 0.0), seed,
                      path_index};
    auto& w = path.values;

    // Level 0: sequential increments over the odd root grid.
    const std::size_t root_stride = static_cast<std::size_t>(1) << L;
    const double dt0 = grid.t_end() / static_cast<double>(c);
    const double s0 = std::sqrt(dt0);
    for (int j = 0; j < c; ++j) {
        const std::size_t a = static_cast<std::size_t>(j) * root_stride;
        w[a + root_stride] =
            w[a] + s0 * normal(seed, path_index, 0, static_cast<std::uint32_t>(j));
    }

    // Dyadic levels: conditioned midpoints, keyed by (level, midpoint rank) so
    // shared nodes of refined grids reproduce exactly.
    for (int l = 1; l <= L; ++l) {
        const std::size_t s = static_cast<std::size_t>(1) << (L - l);
        const double parent_dt =
            grid.t_end() /
            (static_cast<double>(c) * static_cast<double>(1ull << (l - 1)));
        const double sd = std::sqrt(parent_dt / 4.0);
        std::uint32_t k = 0;
        for (std::size_t m = s; m + s <= static_cast<std::size_t>(n); m += 2 * s) {
            w[m] = 0.5 * (w[m - s] + w[m + s]) +
                   sd * normal(seed, path_index, static_cast<std::uint32_t>(l), k);
            ++k;
        }
    }
    return path;
}

std::vector<double> cumtrapz(const Grid& grid, const DetFn& fn) {
    std::vector<double> out(grid.num_nodes(), 0.0);
    double prev = fn(grid.node(0));
    for (std::size_t j = 1; j < out.size(); ++j) {
        const double cur = fn(grid.node(j));
        out[j] = out[j - 1] + 0.5 * (prev + cur) * grid.dt();
        prev = cur;
    }
    return out;
}

std::vector<double> cumtrapz_product(const Grid& grid, const DetFn& f1,
                                     const DetFn& f2) {
    std::vector<double> out(grid.num_nodes(), 0.0);
    double prev = f1(grid.node(0)) * f2(grid.node(0));
    for (std::size_t j = 1; j < out.size(); ++j) {
        const double cur = f1(grid.node(j)) * f2(grid.node(j));
        out[j] = out[j - 1] + 0.5 * (prev + cur) * grid.dt();
        prev = cur;
    }
    return out;
}

std::vector<double> cum_stoch_integral(const BrownianPath& path, const DetFn& g) {
    std::vector<double> out(path.values.size(), 0.0);
    for (std::size_t j = 1; j < out.size(); ++j)
        out[j] = out[j - 1] + g(path.grid.node(j - 1)) * path.increment(j - 1);
    return out;
}

double wiener_integral(const DetFn& g, const BrownianPath& path) {
    return wiener_integral(g, path, 0, path.values.size() - 1);
}

double wiener_integral(const DetFn& g, const BrownianPath& path, std::size_t j0,
                       std::size_t j1) {
    double acc = 0.0;
    for (std::size_t j = j0; j < j1; ++j)
        acc += g(path.grid.node(j)) * path.increment(j);
    return acc;
}

BrownianPath shift_path(const BrownianPath& path, const DetFn& sigma, double u,
                        double v) {
    if (u > v) throw std::invalid_argument("shift_path: requires u <= v");
    const std::size_t ju = path.grid.index_of(u);
    const std::size_t jv = path.grid.index_of(v);
    const auto S = cumtrapz(path.grid, sigma);

    BrownianPath out = path;
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        const std::size_t jc = std::min(std::max(j, ju), jv);
        out.values[j] -= S[jc] - S[ju];
    }
    return out;
}

double stochastic_exponential(const BrownianPath& path, const DetFn& sigma,
                              double u, double v) {
    if (u > v) throw std::invalid_argument("stochastic_exponential: requires u <= v");
    const std::size_t ju = path.grid.index_of(u);
    const std::size_t jv = path.grid.index_of(v);

    double stoch = 0.0;
    for (std::size_t j = ju; j < jv; ++j)
        stoch += sigma(path.grid.node(j)) * path.increment(j);

    double quad = 0.0;
    double prev = sigma(path.grid.node(ju)) * sigma(path.grid.node(ju));
    for (std::size_t j = ju + 1; j <= jv; ++j) {
        const double s = sigma(path.grid.node(j));
        quad += 0.5 * (prev + s * s) * path.grid.dt();
        prev = s * s;
    }
    return std::exp(stoch - 0.5 * quad);
}

}  // namespace aklab
