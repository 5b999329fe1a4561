#include "aklab/det_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aklab {

DetFn::DetFn(FnKind kind, std::vector<double> coeffs)
    : kind_(kind), coeffs_(std::move(coeffs)) {
    switch (kind_) {
        case FnKind::Constant:
            if (coeffs_.size() != 1)
                throw std::invalid_argument("DetFn constant: expected 1 coefficient");
            break;
        case FnKind::PiecewiseLinear: {
            if (coeffs_.size() < 4 || coeffs_.size() % 2 != 0)
                throw std::invalid_argument(
                    "DetFn piecewise_linear: expected [x0,y0,x1,y1,...] with >= 2 knots");
            for (std::size_t i = 2; i < coeffs_.size(); i += 2)
                if (!(coeffs_[i] > coeffs_[i - 2]))
                    throw std::invalid_argument(
                        "DetFn piecewise_linear: knot abscissae must increase");
            break;
        }
        case FnKind::Polynomial:
            if (coeffs_.empty())
                throw std::invalid_argument("DetFn polynomial: empty coefficients");
            break;
        case FnKind::Trig:
        case FnKind::Sigmoid:
            if (coeffs_.size() != 4)
                throw std::invalid_argument("DetFn: expected 4 coefficients [a,b,c,d]");
            break;
    }
}

double DetFn::operator()(double x) const {
    switch (kind_) {
        case FnKind::Constant:
            return coeffs_[0];
        case FnKind::PiecewiseLinear: {
            const std::size_t m = coeffs_.size() / 2;
            if (x <= coeffs_[0]) return coeffs_[1];
            if (x >= coeffs_[2 * (m - 1)]) return coeffs_[2 * m - 1];
            std::size_t lo = 0;
            for (std::size_t i = 1; i < m; ++i) {
                if (coeffs_[2 * i] >= x) {
                    lo = i - 1;
                    break;
                }
            }
            const double x0 = coeffs_[2 * lo], y0 = coeffs_[2 * lo + 1];
            const double x1 = coeffs_[2 * lo + 2], y1 = coeffs_[2 * lo + 3];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
        case FnKind::Polynomial: {
            double v = 0.0;
            for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * x + coeffs_[i];
            return v;
        }
        case FnKind::Trig:
            return coeffs_[0] * std::sin(coeffs_[1] * x + coeffs_[2]) + coeffs_[3];
        case FnKind::Sigmoid:
            return coeffs_[0] * std::tanh(coeffs_[1] * x + coeffs_[2]) + coeffs_[3];
    }
    return 0.0;
}

double DetFn::deriv(double x) const {
    switch (kind_) {
        case FnKind::Constant:
            return 0.0;
        case FnKind::PiecewiseLinear: {
            const std::size_t m = coeffs_.size() / 2;
            if (x <= coeffs_[0] || x >= coeffs_[2 * (m - 1)]) return 0.0;
            std::size_t lo = 0;
            for (std::size_t i = 1; i < m; ++i) {
                if (coeffs_[2 * i] >= x) {
                    lo = i - 1;
                    break;
                }
            }
            return (coeffs_[2 * lo + 3] - coeffs_[2 * lo + 1]) /
                   (coeffs_[2 * lo + 2] - coeffs_[2 * lo]);
        }
        case FnKind::Polynomial: {
            double v = 0.0;
            for (std::size_t i = coeffs_.size(); i-- > 1;)
                v = v * x + coeffs_[i] * static_cast<double>(i);
            return v;
        }
        case FnKind::Trig:
            return coeffs_[0] * coeffs_[1] * std::cos(coeffs_[1] * x + coeffs_[2]);
        case FnKind::Sigmoid: {
            const double t = std::tanh(coeffs_[1] * x + coeffs_[2]);
            return coeffs_[0] * coeffs_[1] * (1.0 - t * t);
        }
    }
    return 0.0;
}

double DetFn::constant_value() const {
    if (!is_constant()) throw std::logic_error("DetFn: not a constant");
    return coeffs_[0];
}

bool DetFn::bounded_on_reals() const {
    switch (kind_) {
        case FnKind::Constant:
        case FnKind::PiecewiseLinear:  // clamped outside the knot range
        case FnKind::Trig:
        case FnKind::Sigmoid:
            return true;
        case FnKind::Polynomial:
            return coeffs_.size() == 1 ||
                   std::all_of(coeffs_.begin() + 1, coeffs_.end(),
                               [](double a) { return a == 0.0; });
    }
    return false;
}

double DetFn::lipschitz() const {
    switch (kind_) {
        case FnKind::Constant:
            return 0.0;
        case FnKind::PiecewiseLinear: {
            double L = 0.0;
            for (std::size_t i = 2; i < coeffs_.size(); i += 2)
                L = std::max(L, std::fabs((coeffs_[i + 1] - coeffs_[i - 1]) /
                                          (coeffs_[i] - coeffs_[i - 2])));
            return L;
        }
        case FnKind::Polynomial: {
            // sup |p'| on [0, 1], sampled densely; exact for low degrees in
            // practice and only used for reporting/validation.
            double L = 0.0;
            for (int i = 0; i <= 256; ++i)
                L = std::max(L, std::fabs(deriv(static_cast<double>(i) / 256.0)));
            return L;
        }
        case FnKind::Trig:
            return std::fabs(coeffs_[0] * coeffs_[1]);
        case FnKind::Sigmoid:
            return std::fabs(coeffs_[0] * coeffs_[1]);
    }
    return 0.0;
}

DetFn DetFn::scaled(double s) const {
    std::vector<double> c = coeffs_;
    switch (kind_) {
        case FnKind::Constant:
            c[0] *= s;
            break;
        case FnKind::PiecewiseLinear:
            for (std::size_t i = 1; i < c.size(); i += 2) c[i] *= s;
            break;
        case FnKind::Polynomial:
            for (double& a : c) a *= s;
            break;
        case FnKind::Trig:
        case FnKind::Sigmoid:
            c[0] *= s;
            c[3] *= s;
            break;
    }
    return DetFn(kind_, std::move(c));
}

std::string fn_kind_name(FnKind k) {
    switch (k) {
        case FnKind::Constant: return "constant";
        case FnKind::PiecewiseLinear: return "piecewise_linear";
        case FnKind::Polynomial: return "polynomial";
        case FnKind::Trig: return "trig";
        case FnKind::Sigmoid: return "tanh";
    }
    return "?";
}

nlohmann::json DetFn::to_json() const {
    return {{"kind", fn_kind_name(kind_)}, {"coeffs", coeffs_}};
}

DetFn DetFn::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("coeffs"))
        throw std::invalid_argument("DetFn: expected {\"kind\", \"coeffs\"}");
    const std::string k = j.at("kind").get<std::string>();
    std::vector<double> c = j.at("coeffs").get<std::vector<double>>();
    if (k == "constant") return DetFn(FnKind::Constant, std::move(c));
    if (k == "piecewise_linear") return DetFn(FnKind::PiecewiseLinear, std::move(c));
    if (k == "polynomial") return DetFn(FnKind::Polynomial, std::move(c));
    if (k == "trig") return DetFn(FnKind::Trig, std::move(c));
    if (k == "tanh") return DetFn(FnKind::Sigmoid, std::move(c));
    throw std::invalid_argument("DetFn: unknown kind '" + k + "'");
}

}  // namespace aklab
