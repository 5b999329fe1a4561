#pragma once

#include <cstdint>
#include <vector>

#include "aklab/model.hpp"

namespace aklab {

/// log of the solution's multiplicative factor at every node:
///   L_k = int_0^{t_k} s dW - 1/2 int s^2 + int_0^{t_k} f( I_g - int_s^{t_k} g s du ) ds
/// in the effective (noise-scaled) coefficients, so Z_{t_k} = xi * exp(L_k).
/// O(n) when sigma and gamma are constant, O(n^2) otherwise.
std::vector<double> closed_form_log_curve(const ModelSpec& model,
                                          const BrownianPath& path);

/// Single-time evaluation, O(n).
double closed_form_log_at(const ModelSpec& model, const BrownianPath& path,
                          std::size_t t_node);

/// Exact solution of the anticipating linear SDE at a grid node t.
/// Requires a non-functional initial condition.
double closed_form_Z(const ModelSpec& model, const BrownianPath& path, double t);

/// Diffusion-only building block on [u, v]: the value of the initial-condition
/// functional evaluated on the shifted path, times the stochastic exponential
/// E_u^v of the same path.
double skorokhod_base_step(double xi_value_on_shifted_path,
                           const BrownianPath& path, const DetFn& sigma,
                           double u, double v);

struct BraidRecord {
    std::size_t node = 0;       // grid node index of the subinterval's right end
    double t = 0.0;
    double diffusion_endpoint = 0.0;  // Y after the diffusion step
    double drift_endpoint = 0.0;      // X after the drift step
    double product_formula = 0.0;     // independent product-formula evaluation
    double rel_identity_dev = 0.0;
};

struct BraidTrace {
    std::vector<BraidRecord> records;
    double final_value = 0.0;
    double max_rel_identity_dev = 0.0;
    int subintervals = 0;
};

/// Solve by braiding: alternate a diffusion step (Cameron-Martin shift of the
/// accumulated state times the interval's stochastic exponential) with a drift
/// ODE step, tracking how every accumulated drift factor's argument is moved
/// by later shifts. Each record also carries the independently evaluated
/// product formula
///   (xi o A_0^{t_k}) E_0^{t_k} prod_i exp[f(I_g - int_{t_i}^{t_k} g s) dt_i],
/// whose agreement with the recursion endpoint is reported as rel_identity_dev.
///
/// `stride` selects the braiding partition as every stride-th grid node; the
/// node of t must be a multiple of stride.
BraidTrace braid_solve(const ModelSpec& model, const BrownianPath& path,
                       double t, int stride = 1);

struct SquaredSdeReport {
    std::vector<int> levels;            // grid sizes (dt = 1/n)
    std::vector<double> mean_residual;  // ensemble/step mean one-step residual
    std::vector<double> se;             // standard error over paths
    std::vector<double> abs_mean;
    double observed_order = 0.0;        // slope of log |mean| vs log dt
    std::size_t n_paths = 0;
};

/// Discrete residual of the squared-process dynamics
///   dV = [s^2 + f(I_g) + 2 g s int_0^t f'(...) ds] V dt + 2 s V dW,  V = Z^2,
/// evaluated on closed-form trajectories across dt levels. The ensemble-mean
/// one-step residual must shrink at order >= 1 in dt.
SquaredSdeReport squared_sde_residual(const ModelSpec& model,
                                      const std::vector<int>& levels,
                                      std::size_t n_paths, std::uint64_t seed);

}  // namespace aklab
