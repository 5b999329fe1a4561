#include "aklab/model.hpp"

#include <cmath>
#include <stdexcept>

#include "aklab/rng.hpp"

namespace aklab {

XiSpec XiSpec::constant(double v) {
    XiSpec s;
    s.kind = Kind::Constant;
    s.a = v;
    return s;
}

XiSpec XiSpec::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("xi uniform: requires lo < hi");
    XiSpec s;
    s.kind = Kind::Uniform;
    s.a = lo;
    s.b = hi;
    return s;
}

XiSpec XiSpec::lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("xi lognormal: requires sigma > 0");
    XiSpec s;
    s.kind = Kind::Lognormal;
    s.a = mu;
    s.b = sigma;
    return s;
}

XiSpec XiSpec::eps_family(double kappa) {
    XiSpec s;
    s.kind = Kind::EpsFamily;
    s.a = kappa;
    return s;
}

XiSpec XiSpec::sqrt_eps_family(double kappa) {
    XiSpec s;
    s.kind = Kind::SqrtEpsFamily;
    s.a = kappa;
    return s;
}

XiSpec XiSpec::wiener_functional(DetFn map, DetFn kernel) {
    XiSpec s;
    s.kind = Kind::WienerFunctional;
    s.map = std::move(map);
    s.kernel = std::move(kernel);
    return s;
}

double XiSpec::realize(std::uint64_t seed, std::uint64_t path_index,
                       double eps) const {
    switch (kind) {
        case Kind::Constant:
            return a;
        case Kind::Uniform:
            return a + (b - a) * uniform01(seed, path_index, kLevelXi, 0);
        case Kind::Lognormal:
            return std::exp(a + b * normal(seed, path_index, kLevelXi, 0));
        case Kind::EpsFamily: {
            if (!(eps > 0.0)) return a;
            const double w = std::exp(-1.0 / (eps * eps));
            return a + w * normal(seed, path_index, kLevelXi, 0);
        }
        case Kind::SqrtEpsFamily:
            return a + std::sqrt(std::max(0.0, eps)) *
                           normal(seed, path_index, kLevelXi, 0);
        case Kind::WienerFunctional:
            throw std::logic_error("xi: functional initial condition has no "
                                   "path-free realization");
    }
    return a;
}

double XiSpec::center() const {
    switch (kind) {
        case Kind::Constant:
        case Kind::EpsFamily:
        case Kind::SqrtEpsFamily:
            return a;
        case Kind::Uniform:
            return 0.5 * (a + b);
        case Kind::Lognormal:
            return std::exp(a + 0.5 * b * b);
        case Kind::WienerFunctional:
            throw std::logic_error("xi: functional initial condition has no center");
    }
    return a;
}

nlohmann::json XiSpec::to_json() const {
    switch (kind) {
        case Kind::Constant:
            return {{"kind", "constant"}, {"value", a}};
        case Kind::Uniform:
            return {{"kind", "uniform"}, {"lo", a}, {"hi", b}};
        case Kind::Lognormal:
            return {{"kind", "lognormal"}, {"mu", a}, {"sigma", b}};
        case Kind::EpsFamily:
            return {{"kind", "eps_family"}, {"kappa", a}};
        case Kind::SqrtEpsFamily:
            return {{"kind", "sqrt_eps_family"}, {"kappa", a}};
        case Kind::WienerFunctional:
            return {{"kind", "wiener_functional"},
                    {"map", map.to_json()},
                    {"kernel", kernel.to_json()}};
    }
    return {};
}

XiSpec XiSpec::from_json(const nlohmann::json& j) {
    if (j.is_number()) return constant(j.get<double>());
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("xi: expected number or object with 'kind'");
    const std::string k = j.at("kind").get<std::string>();
    if (k == "constant") return constant(j.at("value").get<double>());
    if (k == "uniform")
        return uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (k == "lognormal")
        return lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    if (k == "eps_family") return eps_family(j.at("kappa").get<double>());
    if (k == "sqrt_eps_family") return sqrt_eps_family(j.at("kappa").get<double>());
    if (k == "wiener_functional")
        return wiener_functional(DetFn::from_json(j.at("map")),
                                 DetFn::from_json(j.at("kernel")));
    throw std::invalid_argument("xi: unknown kind '" + k + "'");
}

void ModelSpec::validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("model: epsilon must be >= 0");
    if (!f.bounded_on_reals())
        throw std::invalid_argument(
            "model: drift nonlinearity f must be bounded on the reals "
            "(got kind '" + fn_kind_name(f.kind()) + "' with nonzero growth)");
    if (!std::isfinite(f.lipschitz()))
        throw std::invalid_argument("model: f must be Lipschitz");
}

DetFn ModelSpec::sigma_eff() const { return sigma.scaled(std::sqrt(epsilon)); }

DetFn ModelSpec::gamma_eff() const { return gamma.scaled(std::sqrt(epsilon)); }

double ModelSpec::xi_realized(std::uint64_t seed, std::uint64_t path_index) const {
    return xi.realize(seed, path_index, epsilon);
}

nlohmann::json ModelSpec::to_json() const {
    return {{"sigma", sigma.to_json()},
            {"gamma", gamma.to_json()},
            {"f", f.to_json()},
            {"xi", xi.to_json()},
            {"epsilon", epsilon}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec m;
    if (j.contains("sigma")) m.sigma = DetFn::from_json(j.at("sigma"));
    if (j.contains("gamma")) m.gamma = DetFn::from_json(j.at("gamma"));
    if (j.contains("f")) m.f = DetFn::from_json(j.at("f"));
    if (j.contains("xi")) m.xi = XiSpec::from_json(j.at("xi"));
    if (j.contains("epsilon")) m.epsilon = j.at("epsilon").get<double>();
    m.validate();
    return m;
}

}  // namespace aklab
