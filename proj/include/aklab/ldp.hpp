#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aklab/model.hpp"

namespace aklab {

/// Candidate Cameron-Martin path: piecewise linear between grid nodes,
/// h(0) = 0.
struct CMPath {
    Grid grid;
    std::vector<double> values;

    CMPath(Grid g, std::vector<double> v);
    static CMPath zero(const Grid& g);
};

/// Schilder energy of a piecewise-linear path: 1/2 int |h'|^2, exactly
/// sum (dh_j)^2 / (2 dt_j).
double schilder_rate(const CMPath& h);

/// The contraction map theta(x)(t) = kappa exp[ int_0^t sigma dx
///   - eps/2 int_0^t sigma^2 + int_0^t f( int_0^1 gamma dx - eps int_s^t
///   gamma sigma du ) ds ],
/// with int sigma dx as the left-endpoint sum over the path's grid and all
/// deterministic integrals by trapezoid. kappa is the model's constant initial
/// value; eps defaults to the model's epsilon.
double theta_map(const CMPath& x, const ModelSpec& model, double t);
double theta_map(const CMPath& x, const ModelSpec& model, double t, double eps);

/// The whole theta curve (every node), used for sup-norm constraints.
std::vector<double> theta_curve(const CMPath& x, const ModelSpec& model,
                                double eps);

struct RateConstraint {
    enum class Kind { Endpoint, SupBallEscape };
    Kind kind = Kind::Endpoint;
    double y = 2.0;        // endpoint target theta(h)(1) = y
    double radius = 0.1;   // escape distance for the sup-norm event
    // reference curve for the sup event; defaults to the deterministic
    // skeleton theta(0).
    std::optional<std::vector<double>> reference;
};

struct RateProblem {
    ModelSpec model;     // supplies kappa (constant xi), sigma, gamma, f
    RateConstraint constraint;
    Grid grid{64, 1.0};
    double theta_eps = 0.0;  // rate computed at the Laplace-limit skeleton
    // optimizer settings
    double penalty0 = 10.0;
    double penalty_factor = 10.0;
    int penalty_stages = 6;
    int max_iters = 600;
    double grad_tol = 1e-10;

    void validate() const;
};

struct RateResult {
    double J = 0.0;
    CMPath argmin{Grid(1, 1.0), {0.0, 0.0}};
    double constraint_violation = 0.0;
    double gradient_check_rel = 0.0;  // max over random probe points
    int iterations = 0;
    bool converged = false;
};

RateResult rate_endpoint(const RateProblem& problem);

/// Max relative error between the analytic gradient of the penalized
/// objective and central finite differences at `n_points` random feasible
/// points (coordinates perturbed around the constrained initializer).
double rate_gradient_check(const RateProblem& problem, int n_points,
                           std::uint64_t seed);

struct McEvent {
    enum class Kind { EndpointGeq, SupDistGeq };
    Kind kind = Kind::EndpointGeq;
    double y = 2.0;      // endpoint threshold
    double delta = 0.1;  // sup-distance threshold from the reference
};

struct McRow {
    double eps = 0.0;
    std::size_t n_paths = 0;
    double hits = 0.0;     // count (plain MC) or weighted sum (tilted)
    double p_hat = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double eps_log_p = 0.0;   // uses the rule-of-three bound when zero hits
    bool zero_hits = false;
    double bound3 = 0.0;      // 3/n upper bound, meaningful when zero_hits
};

struct McTable {
    std::vector<McRow> rows;
    bool tilted = false;
};

/// Rare-event sweep: simulate Z^eps by the closed form with the noise scaled
/// per eps and tabulate empirical probabilities with Wilson intervals and
/// eps log p. Plain Monte Carlo by default; `tilt` applies an exponential
/// Girsanov tilt along the supplied Cameron-Martin path (the rate optimizer's
/// argmin), the documented accelerator for deep tails.
McTable mc_tail(const ModelSpec& model, const McEvent& event,
                const std::vector<double>& eps_list, std::size_t n_paths,
                const Grid& grid, std::uint64_t seed,
                const std::optional<CMPath>& tilt = std::nullopt);

struct EeRow {
    double eps = 0.0;
    double seq_exact = 0.0;      // eps log E[(xi^eps - kappa)^2], exact eta moment
    double seq_empirical = 0.0;  // same with the sampled eta second moment
    std::size_t exceed_count = 0;
    double p_bound = 0.0;        // rule-of-three when no exceedance
    double eps_log_p = 0.0;      // of the estimate or of the bound
    bool zero_hits = true;
};

struct EeReport {
    std::vector<EeRow> rows;
    bool sequence_strictly_decreasing = false;  // empirical, eps descending
    double delta = 0.0;
};

/// Exponential-equivalence check: paired trajectories Z^eps_xi and Z^eps_kappa
/// on common noise; reports eps log P{sup |difference| > delta} (or certified
/// rule-of-three bounds) together with the analytic moment sequence
/// eps log E[(xi^eps - kappa)^2], computed in the log domain.
EeReport exp_equiv_check(const ModelSpec& model, double delta,
                         const std::vector<double>& eps_list,
                         std::size_t n_paths, const Grid& grid,
                         std::uint64_t seed);

}  // namespace aklab
