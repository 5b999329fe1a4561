#pragma once

#include <cstdint>
#include <vector>

#include "aklab/det_fn.hpp"
#include "aklab/grid.hpp"

namespace aklab {

/// One sampled Brownian trajectory on a Grid. Values are immutable after
/// construction; paths derived by shifting keep the originating (seed,
/// path_index) for bookkeeping.
struct BrownianPath {
    Grid grid;
    std::vector<double> values;  // aligned with grid nodes, values[0] == 0
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;

    double increment(std::size_t j) const { return values[j + 1] - values[j]; }
    double terminal() const { return values.back(); }
};

/// Sample W on the grid with a Brownian-bridge level construction:
/// the odd part of n is filled by sequential increments (level 0), then each
/// dyadic level inserts conditioned midpoints. Grids n and 2n with the same
/// (seed, path_index) therefore agree bit-identically on shared nodes.
BrownianPath sample_brownian(const Grid& grid, std::uint64_t seed,
                             std::uint64_t path_index);

/// Cumulative composite trapezoid of fn over grid nodes: out[j] = int_0^{t_j}.
std::vector<double> cumtrapz(const Grid& grid, const DetFn& fn);

/// Cumulative trapezoid of the product f1(t) * f2(t).
std::vector<double> cumtrapz_product(const Grid& grid, const DetFn& f1,
                                     const DetFn& f2);

/// Cumulative left-endpoint stochastic sums: out[k] = sum_{j<=k} g(t_{j-1}) dW_j.
std::vector<double> cum_stoch_integral(const BrownianPath& path, const DetFn& g);

/// Left-endpoint Riemann-Stieltjes sum of g against dW over the whole grid.
double wiener_integral(const DetFn& g, const BrownianPath& path);

/// Same, restricted to nodes [j0, j1].
double wiener_integral(const DetFn& g, const BrownianPath& path, std::size_t j0,
                       std::size_t j1);

/// Cameron-Martin translation: value at node s becomes
/// w_s - int_u^{(s ^ v) v u} sigma, with the deterministic integral taken by
/// the module-wide trapezoid rule. u and v must be grid nodes, u <= v.
BrownianPath shift_path(const BrownianPath& path, const DetFn& sigma, double u,
                        double v);

/// exp[ int_u^v sigma dW - 1/2 int_u^v sigma^2 ds ] with left-endpoint
/// stochastic sums and trapezoid for sigma^2. u <= v, both grid nodes.
double stochastic_exponential(const BrownianPath& path, const DetFn& sigma,
                              double u, double v);

}  // namespace aklab
