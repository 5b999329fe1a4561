#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "aklab/brownian.hpp"
#include "aklab/det_fn.hpp"

namespace aklab {

/// Closed primitive vocabulary for integrand factors. Adaptedness and instant
/// independence are enforced structurally: `Bm` (the running value W_t) is
/// admitted only in adapted position, `BmTail` (W_1 - W_t) and `WienerTail`
/// (int_t^1 g dW) only in instantly independent position. Deterministic
/// factors, compositions with a DetFn, and products are allowed on both sides.
enum class FactorKind {
    Const,       // c
    Det,         // g(t)
    Bm,          // W_t                     (adapted only)
    BmTail,      // W_1 - W_t               (instant only)
    WienerTail,  // int_t^1 g dW            (instant only)
    Compose,     // f(inner)
    Product,     // prod factors
};

enum class FactorRole { Adapted, Instant };

struct Factor {
    FactorKind kind = FactorKind::Const;
    double value = 1.0;                     // Const
    DetFn fn;                               // Det / WienerTail kernel / Compose map
    std::vector<Factor> children;           // Compose (1) / Product (>= 1)

    static Factor constant(double c);
    static Factor one() { return constant(1.0); }
    static Factor det(DetFn g);
    static Factor bm();
    static Factor bm_tail();
    static Factor wiener_tail(DetFn g);
    static Factor compose(DetFn f, Factor inner);
    static Factor product(std::vector<Factor> fs);

    void validate(FactorRole role) const;

    nlohmann::json to_json() const;
    static Factor from_json(const nlohmann::json& j);
};

/// A sum of adapted * instantly-independent terms, the step-2 form of the
/// anticipating integral's definition.
struct IntegrandSpec {
    struct Term {
        Factor adapted;
        Factor instant;
    };
    std::vector<Term> terms;

    void validate() const;

    nlohmann::json to_json() const;
    static IntegrandSpec from_json(const nlohmann::json& j);
};

/// Per-path evaluation context with the suffix stochastic sums each
/// WienerTail factor needs. Built once per (spec, path).
class IntegrandContext {
public:
    IntegrandContext(const IntegrandSpec& spec, const BrownianPath& path);

    double eval(const Factor& f, std::size_t node) const;

    const BrownianPath& path() const { return path_; }

private:
    void collect_tails(const Factor& f);

    const BrownianPath& path_;
    std::vector<const Factor*> tail_factors_;
    std::vector<std::vector<double>> tail_sums_;  // [factor][node]
};

}  // namespace aklab
