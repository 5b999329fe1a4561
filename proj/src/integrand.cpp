#include "aklab/integrand.hpp"

#include <stdexcept>

namespace aklab {

Factor Factor::constant(double c) {
    Factor f;
    f.kind = FactorKind::Const;
    f.value = c;
    return f;
}

Factor Factor::det(DetFn g) {
    Factor f;
    f.kind = FactorKind::Det;
    f.fn = std::move(g);
    return f;
}

Factor Factor::bm() {
    Factor f;
    f.kind = FactorKind::Bm;
    return f;
}

Factor Factor::bm_tail() {
    Factor f;
    f.kind = FactorKind::BmTail;
    return f;
}

Factor Factor::wiener_tail(DetFn g) {
    Factor f;
    f.kind = FactorKind::WienerTail;
    f.fn = std::move(g);
    return f;
}

Factor Factor::compose(DetFn fmap, Factor inner) {
    Factor f;
    f.kind = FactorKind::Compose;
    f.fn = std::move(fmap);
    f.children.push_back(std::move(inner));
    return f;
}

Factor Factor::product(std::vector<Factor> fs) {
    if (fs.empty()) throw std::invalid_argument("Factor::product: empty list");
    Factor f;
    f.kind = FactorKind::Product;
    f.children = std::move(fs);
    return f;
}

void Factor::validate(FactorRole role) const {
    switch (kind) {
        case FactorKind::Const:
        case FactorKind::Det:
            return;
        case FactorKind::Bm:
            if (role != FactorRole::Adapted)
                throw std::invalid_argument(
                    "integrand: W_t is admissible only as an adapted factor");
            return;
        case FactorKind::BmTail:
            if (role != FactorRole::Instant)
                throw std::invalid_argument(
                    "integrand: W_1 - W_t is admissible only as an instantly "
                    "independent factor");
            return;
        case FactorKind::WienerTail:
            if (role != FactorRole::Instant)
                throw std::invalid_argument(
                    "integrand: tail Wiener integrals are admissible only as "
                    "instantly independent factors");
            return;
        case FactorKind::Compose:
            if (children.size() != 1)
                throw std::invalid_argument("integrand: compose expects one child");
            children[0].validate(role);
            return;
        case FactorKind::Product:
            if (children.empty())
                throw std::invalid_argument("integrand: product expects children");
            for (const auto& ch : children) ch.validate(role);
            return;
    }
}

void IntegrandSpec::validate() const {
    if (terms.empty()) throw std::invalid_argument("integrand: no terms");
    for (const auto& t : terms) {
        t.adapted.validate(FactorRole::Adapted);
        t.instant.validate(FactorRole::Instant);
    }
}

IntegrandContext::IntegrandContext(const IntegrandSpec& spec,
                                   const BrownianPath& path)
    : path_(path) {
    for (const auto& t : spec.terms) {
        collect_tails(t.adapted);
        collect_tails(t.instant);
    }
    for (const Factor* f : tail_factors_) {
        const std::size_t nn = path.values.size();
        std::vector<double> suffix(nn, 0.0);
        for (std::size_t j = nn - 1; j-- > 0;)
            suffix[j] = suffix[j + 1] + f->fn(path.grid.node(j)) * path.increment(j);
        tail_sums_.push_back(std::move(suffix));
    }
}

void IntegrandContext::collect_tails(const Factor& f) {
    if (f.kind == FactorKind::WienerTail) {
        tail_factors_.push_back(&f);
        return;
    }
    for (const auto& ch : f.children) collect_tails(ch);
}

double IntegrandContext::eval(const Factor& f, std::size_t node) const {
    switch (f.kind) {
        case FactorKind::Const:
            return f.value;
        case FactorKind::Det:
            return f.fn(path_.grid.node(node));
        case FactorKind::Bm:
            return path_.values[node];
        case FactorKind::BmTail:
            return path_.values.back() - path_.values[node];
        case FactorKind::WienerTail: {
            for (std::size_t i = 0; i < tail_factors_.size(); ++i)
                if (tail_factors_[i] == &f) return tail_sums_[i][node];
            // Context built for a different spec instance: compute directly.
            double acc = 0.0;
            for (std::size_t j = node; j + 1 < path_.values.size(); ++j)
                acc += f.fn(path_.grid.node(j)) * path_.increment(j);
            return acc;
        }
        case FactorKind::Compose:
            return f.fn(eval(f.children[0], node));
        case FactorKind::Product: {
            double acc = 1.0;
            for (const auto& ch : f.children) acc *= eval(ch, node);
            return acc;
        }
    }
    return 0.0;
}

namespace {

nlohmann::json factor_to_json(const Factor& f) {
    nlohmann::json j;
    switch (f.kind) {
        case FactorKind::Const:
            j["kind"] = "const";
            j["value"] = f.value;
            break;
        case FactorKind::Det:
            j["kind"] = "det";
            j["fn"] = f.fn.to_json();
            break;
        case FactorKind::Bm:
            j["kind"] = "bm";
            break;
        case FactorKind::BmTail:
            j["kind"] = "bm_tail";
            break;
        case FactorKind::WienerTail:
            j["kind"] = "wiener_tail";
            j["fn"] = f.fn.to_json();
            break;
        case FactorKind::Compose:
            j["kind"] = "compose";
            j["fn"] = f.fn.to_json();
            j["inner"] = factor_to_json(f.children[0]);
            break;
        case FactorKind::Product: {
            j["kind"] = "product";
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& ch : f.children) arr.push_back(factor_to_json(ch));
            j["factors"] = arr;
            break;
        }
    }
    return j;
}

}  // namespace

nlohmann::json Factor::to_json() const { return factor_to_json(*this); }

Factor Factor::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("integrand factor: expected object with 'kind'");
    const std::string k = j.at("kind").get<std::string>();
    if (k == "const") return constant(j.at("value").get<double>());
    if (k == "one") return one();
    if (k == "det") return det(DetFn::from_json(j.at("fn")));
    if (k == "bm") return bm();
    if (k == "bm_tail") return bm_tail();
    if (k == "wiener_tail") return wiener_tail(DetFn::from_json(j.at("fn")));
    if (k == "compose")
        return compose(DetFn::from_json(j.at("fn")), from_json(j.at("inner")));
    if (k == "product") {
        std::vector<Factor> fs;
        for (const auto& e : j.at("factors")) fs.push_back(from_json(e));
        return product(std::move(fs));
    }
    throw std::invalid_argument("integrand factor: unknown kind '" + k + "'");
}

nlohmann::json IntegrandSpec::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : terms)
        arr.push_back({{"adapted", t.adapted.to_json()},
                       {"instant", t.instant.to_json()}});
    return {{"terms", arr}};
}

IntegrandSpec IntegrandSpec::from_json(const nlohmann::json& j) {
    IntegrandSpec spec;
    if (!j.is_object() || !j.contains("terms"))
        throw std::invalid_argument("integrand: expected {\"terms\": [...]}");
    for (const auto& e : j.at("terms"))
        spec.terms.push_back(
            {Factor::from_json(e.at("adapted")), Factor::from_json(e.at("instant"))});
    spec.validate();
    return spec;
}

}  // namespace aklab
