#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aklab/model.hpp"

namespace aklab {

/// An ensemble of a derived process N on a grid, regenerable from
/// (seed, path index): evaluating path p fills the Brownian values W and the
/// process values N at every node. Operations stream paths, so ensembles of
/// 10^5+ paths never materialize.
struct Ensemble {
    Grid grid;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::string label;
    std::function<void(std::size_t p, std::vector<double>& w,
                       std::vector<double>& n)>
        eval;

    void path(std::size_t p, std::vector<double>& w, std::vector<double>& n) const {
        eval(p, w, n);
    }
};

/// Shipped process fixtures.
enum class FixtureKind {
    ItoQuadratic,       // int_0^t W dW            = (W_t^2 - t)/2
    AkTailClosed,       // int_0^t (W_1 - W_s) dW  = W_1 W_t - (W_t^2 + t)/2
    AkTailDiscrete,     // same, by the anticipating Riemann sums themselves
    DeterministicDrift, // N_t = t  (negative control)
    StochExponential,   // N_t = xi * E_0^t(sigma)
    Constant,           // N_t = c
};

FixtureKind fixture_kind_from_string(const std::string& s);
std::string fixture_kind_name(FixtureKind k);

/// Build a fixture ensemble. `sigma` and `xi` only matter for the stochastic
/// exponential; `c` only for the constant fixture.
Ensemble make_fixture_ensemble(FixtureKind kind, const Grid& grid,
                               std::size_t n_paths, std::uint64_t seed,
                               const DetFn& sigma = DetFn::one(),
                               const XiSpec& xi = XiSpec::constant(1.0),
                               double c = 1.0);

/// Adapted weight processes for the transform.
enum class WeightKind {
    One,
    Sign,     // 1 if W_{t} >= 0 else -1   (bounded, adapted)
    CosW,     // cos(W_t)
    Constant, // c
};

/// Discrete near-martingale transform Y_k = sum_{i<=k} A_{i-1} (X_i - X_{i-1}),
/// predictable convention, Y_0 = 0.
Ensemble nm_transform(WeightKind weight, double weight_c, const Ensemble& base);

/// Freeze values after the realized stopping time: X^tau.
struct StoppingSpec {
    enum class Kind { Deterministic, Hitting };
    Kind kind = Kind::Deterministic;
    double time = 1.0;   // deterministic node time
    double level = 1.0;  // |W| threshold for hitting
    double cap = 1.0;    // bound, a grid node

    nlohmann::json to_json() const;
    static StoppingSpec from_json(const nlohmann::json& j);
};

/// First grid node where the hitting condition holds, else the cap
/// (deterministic kind returns its fixed node). Returns the node index.
std::size_t realize_stopping_time(const StoppingSpec& spec, const Grid& grid,
                                  const std::vector<double>& w);

Ensemble stop_ensemble(const Ensemble& base, const StoppingSpec& tau);

/// Report of the least-squares conditional-mean test: regression of
/// N_t - N_s on adapted features of the path up to s; passes when every
/// coefficient lies within 3 robust standard errors of zero.
struct CmtReport {
    std::vector<std::string> features;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<bool> feature_pass;
    bool pass = false;
    std::size_t n_paths = 0;
    double s = 0.0, t = 0.0;
};

struct CmtBasis {
    bool constant = true;
    bool w = true;
    bool w2 = true;
    std::optional<DetFn> gamma;  // adds int_0^s gamma dW when present
};

/// s and t are node times, s < t; ensemble size must be >= 10^4.
CmtReport conditional_mean_test(const Ensemble& ens, double s, double t,
                                const CmtBasis& basis = {});

/// Optional-stopping check. In mean mode (no sigma_st) it estimates
/// E[N_tau] - E[N_0]; with sigma_st it regresses N_tau - N_sigma on features
/// of the path at sigma. `submartingale` switches to the one-sided band.
struct OsReport {
    double mean_start = 0.0;   // E[N_0] or E[N_sigma]
    double mean_stopped = 0.0; // E[N_tau]
    double diff = 0.0;
    double se = 0.0;
    bool pass = false;
    bool submartingale = false;
    std::size_t n_paths = 0;
    // conditional mode
    std::vector<double> coefficients;
    std::vector<double> std_errors;
};

OsReport optional_stopping_check(const Ensemble& ens, const StoppingSpec& tau,
                                 const std::optional<StoppingSpec>& sigma_st,
                                 bool submartingale = false,
                                 bool require_nonnegative = true);

/// Dyadic discretization f_n(x) = (floor(2^n x) + 1) / 2^n, capped at T.
/// Satisfies f_n(x) >= x and f_n(x) decreases to x.
double dyadic_ceil(double x, int n, double cap);

}  // namespace aklab
