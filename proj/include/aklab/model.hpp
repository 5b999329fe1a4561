#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "aklab/brownian.hpp"
#include "aklab/det_fn.hpp"

namespace aklab {

/// Initial-condition descriptor. Random kinds draw from a dedicated RNG
/// stream keyed by (seed, path_index), so xi is independent of the Brownian
/// driver by construction. `WienerFunctional` is the representable
/// path-dependent case xi = map(int_0^1 kernel dW), admissible only where the
/// Skorokhod-sense solver is used.
struct XiSpec {
    enum class Kind {
        Constant,
        Uniform,           // params: lo, hi
        Lognormal,         // params: mu, sigma
        EpsFamily,         // kappa + exp(-1/eps^2) * eta
        SqrtEpsFamily,     // kappa + sqrt(eps) * eta   (negative control)
        WienerFunctional,  // map(int_0^1 kernel dW)
    };

    Kind kind = Kind::Constant;
    double a = 1.0;  // value / lo / mu / kappa
    double b = 0.0;  // hi / sigma
    DetFn map;       // WienerFunctional
    DetFn kernel;    // WienerFunctional

    static XiSpec constant(double v);
    static XiSpec uniform(double lo, double hi);
    static XiSpec lognormal(double mu, double sigma);
    static XiSpec eps_family(double kappa);
    static XiSpec sqrt_eps_family(double kappa);
    static XiSpec wiener_functional(DetFn map, DetFn kernel);

    bool is_functional() const { return kind == Kind::WienerFunctional; }
    bool is_constant() const { return kind == Kind::Constant; }

    /// Realized value for non-functional kinds; uses the xi stream of
    /// (seed, path_index). eps only matters for the eps families.
    double realize(std::uint64_t seed, std::uint64_t path_index, double eps) const;

    /// The deterministic center kappa (exact for constant and the eps
    /// families, the mean otherwise).
    double center() const;

    nlohmann::json to_json() const;
    static XiSpec from_json(const nlohmann::json& j);
};

/// Problem data for the anticipating linear SDE
///   dZ_t = sqrt(eps) sigma_t Z_t dW_t + f( sqrt(eps) int_0^1 gamma dW
///                                           ) Z_t dt,  Z_0 = xi,
/// written with a global noise scale eps (eps = 1 recovers the unscaled
/// equation). sigma and gamma are deterministic of bounded variation, f is
/// bounded Lipschitz with analytic derivative.
struct ModelSpec {
    DetFn sigma = DetFn::one();
    DetFn gamma = DetFn::zero();
    DetFn f = DetFn::zero();
    XiSpec xi = XiSpec::constant(1.0);
    double epsilon = 1.0;

    void validate() const;

    DetFn sigma_eff() const;  // sqrt(eps) * sigma
    DetFn gamma_eff() const;  // sqrt(eps) * gamma

    /// Realized initial condition for one path; throws for functional xi.
    double xi_realized(std::uint64_t seed, std::uint64_t path_index) const;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

}  // namespace aklab
