#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace aklab {

enum class FnKind {
    Constant,         // coeffs: [c]
    PiecewiseLinear,  // coeffs: [x0, y0, x1, y1, ...], x strictly increasing;
                      // clamped to the end values outside [x0, xk]
    Polynomial,       // coeffs: [a0, a1, ...] -> a0 + a1 x + ...
    Trig,             // coeffs: [a, w, p, d]  -> a * sin(w x + p) + d
    Sigmoid,          // coeffs: [a, b, c, d]  -> a * tanh(b x + c) + d
};

/// Deterministic scalar function used for coefficients sigma(t), gamma(t) on
/// [0, 1] and for the drift nonlinearity f(x) on the reals. Every kind has an
/// analytic derivative.
class DetFn {
public:
    DetFn() : kind_(FnKind::Constant), coeffs_{0.0} {}
    DetFn(FnKind kind, std::vector<double> coeffs);

    static DetFn constant(double c) { return DetFn(FnKind::Constant, {c}); }
    static DetFn zero() { return constant(0.0); }
    static DetFn one() { return constant(1.0); }
    static DetFn polynomial(std::vector<double> a) {
        return DetFn(FnKind::Polynomial, std::move(a));
    }
    static DetFn piecewise_linear(std::vector<double> knots) {
        return DetFn(FnKind::PiecewiseLinear, std::move(knots));
    }
    static DetFn sine(double a, double w, double p, double d) {
        return DetFn(FnKind::Trig, {a, w, p, d});
    }
    static DetFn tanh_fn(double a = 1.0, double b = 1.0, double c = 0.0,
                         double d = 0.0) {
        return DetFn(FnKind::Sigmoid, {a, b, c, d});
    }

    double operator()(double x) const;
    double deriv(double x) const;

    FnKind kind() const { return kind_; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    bool is_constant() const { return kind_ == FnKind::Constant; }
    double constant_value() const;

    /// True when the function is bounded on the whole real line.
    bool bounded_on_reals() const;

    /// Lipschitz constant: sup |f'| over the reals for bounded kinds,
    /// over [0, 1] for polynomial/time-restricted use.
    double lipschitz() const;

    /// Scale the output by s (s * f(x)), exact for every kind.
    DetFn scaled(double s) const;

    nlohmann::json to_json() const;
    static DetFn from_json(const nlohmann::json& j);

private:
    FnKind kind_;
    std::vector<double> coeffs_;
};

std::string fn_kind_name(FnKind k);

}  // namespace aklab
