#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "aklab/integrand.hpp"

namespace aklab {

/// Anticipating stochastic integral over [0, t_end]:
/// adapted factors at left endpoints, instantly independent factors at right
/// endpoints,
///   sum_terms sum_j A(t_{j-1}) * Phi(t_j) * (W_{t_j} - W_{t_{j-1}}).
/// t_end must be a node of the path's grid.
double ak_integral(const IntegrandSpec& spec, const BrownianPath& path,
                   double t_end);

/// Same with a prebuilt context and node index (hot loops).
double ak_integral(const IntegrandSpec& spec, const IntegrandContext& ctx,
                   std::size_t t_node);

struct RefinementReport {
    std::vector<int> levels;                     // grid sizes n (on [0, 1])
    std::vector<std::vector<double>> values;     // [level][path]
    std::vector<double> median_abs_diff;         // between consecutive levels
    double observed_order = 0.0;                 // slope of log2 median diff vs log2 mesh
    std::vector<double> median_abs_error;        // vs reference, when given
    bool errors_decreasing = false;
    std::size_t n_paths = 0;
};

/// Pathwise closed form used as a refinement oracle; receives the path and the
/// node index of the integration endpoint.
using PathReference = std::function<double(const BrownianPath&, std::size_t)>;

/// Evaluate the integral on bridge-consistent refinements of the same
/// trajectories (grids always span [0, 1]; `t_int` is the integration
/// endpoint, a node of every level) and report successive differences plus an
/// empirical convergence order (median over paths). Requires >= 3 increasing
/// levels.
RefinementReport refinement_study(const IntegrandSpec& spec, std::uint64_t seed,
                                  const std::vector<int>& levels,
                                  std::size_t n_paths = 100, double t_int = 1.0,
                                  const PathReference& reference = nullptr);

}  // namespace aklab
