#include "aklab/nearmart.hpp"

#include <cmath>
#include <stdexcept>

#include "aklab/stats.hpp"

namespace aklab {

FixtureKind fixture_kind_from_string(const std::string& s) {
    if (s == "ito_quadratic") return FixtureKind::ItoQuadratic;
    if (s == "ak_tail_closed") return FixtureKind::AkTailClosed;
    if (s == "ak_tail_discrete") return FixtureKind::AkTailDiscrete;
    if (s == "deterministic_drift") return FixtureKind::DeterministicDrift;
    if (s == "stoch_exponential") return FixtureKind::StochExponential;
    if (s == "constant") return FixtureKind::Constant;
    throw std::invalid_argument("unknown fixture '" + s + "'");
}

std::string fixture_kind_name(FixtureKind k) {
    switch (k) {
        case FixtureKind::ItoQuadratic: return "ito_quadratic";
        case FixtureKind::AkTailClosed: return "ak_tail_closed";
        case FixtureKind::AkTailDiscrete: return "ak_tail_discrete";
        case FixtureKind::DeterministicDrift: return "deterministic_drift";
        case FixtureKind::StochExponential: return "stoch_exponential";
        case FixtureKind::Constant: return "constant";
    }
    return "?";
}

Ensemble make_fixture_ensemble(FixtureKind kind, const Grid& grid,
                               std::size_t n_paths, std::uint64_t seed,
                               const DetFn& sigma, const XiSpec& xi, double c) {
    Ensemble ens;
    ens.grid = grid;
    ens.seed = seed;
    ens.n_paths = n_paths;
    ens.label = fixture_kind_name(kind);

    ens.eval = [kind, grid, seed, sigma, xi, c](std::size_t p,
                                                std::vector<double>& w,
                                                std::vector<double>& n) {
        const BrownianPath path = sample_brownian(grid, seed, p);
        w = path.values;
        n.assign(w.size(), 0.0);
        switch (kind) {
            case FixtureKind::ItoQuadratic:
                for (std::size_t j = 0; j < w.size(); ++j)
                    n[j] = 0.5 * (w[j] * w[j] - grid.node(j));
                break;
            case FixtureKind::AkTailClosed: {
                const double w1 = w.back();
                for (std::size_t j = 0; j < w.size(); ++j)
                    n[j] = w1 * w[j] - 0.5 * (w[j] * w[j] + grid.node(j));
                break;
            }
            case FixtureKind::AkTailDiscrete: {
                const double w1 = w.back();
                double acc = 0.0;
                n[0] = 0.0;
                for (std::size_t j = 1; j < w.size(); ++j) {
                    acc += (w1 - w[j]) * (w[j] - w[j - 1]);
                    n[j] = acc;
                }
                break;
            }
            case FixtureKind::DeterministicDrift:
                for (std::size_t j = 0; j < w.size(); ++j) n[j] = grid.node(j);
                break;
            case FixtureKind::StochExponential: {
                const double xv = xi.realize(seed, p, 1.0);
                double stoch = 0.0;
                double quad = 0.0;
                double prev = sigma(grid.node(0)) * sigma(grid.node(0));
                n[0] = xv;
                for (std::size_t j = 1; j < w.size(); ++j) {
                    stoch += sigma(grid.node(j - 1)) * (w[j] - w[j - 1]);
                    const double s2 = sigma(grid.node(j)) * sigma(grid.node(j));
                    quad += 0.5 * (prev + s2) * grid.dt();
                    prev = s2;
                    n[j] = xv * std::exp(stoch - 0.5 * quad);
                }
                break;
            }
            case FixtureKind::Constant:
                for (std::size_t j = 0; j < w.size(); ++j) n[j] = c;
                break;
        }
    };
    return ens;
}

Ensemble nm_transform(WeightKind weight, double weight_c, const Ensemble& base) {
    Ensemble out = base;
    out.label = base.label + "+transform";
    auto inner = base.eval;
    out.eval = [weight, weight_c, inner](std::size_t p, std::vector<double>& w,
                                         std::vector<double>& n) {
        inner(p, w, n);
        std::vector<double> y(n.size(), 0.0);
        for (std::size_t i = 1; i < n.size(); ++i) {
            double a = 1.0;
            switch (weight) {
                case WeightKind::One: a = 1.0; break;
                case WeightKind::Sign: a = w[i - 1] >= 0.0 ? 1.0 : -1.0; break;
                case WeightKind::CosW: a = std::cos(w[i - 1]); break;
                case WeightKind::Constant: a = weight_c; break;
            }
            y[i] = y[i - 1] + a * (n[i] - n[i - 1]);
        }
        n = std::move(y);
    };
    return out;
}

nlohmann::json StoppingSpec::to_json() const {
    if (kind == Kind::Deterministic)
        return {{"kind", "deterministic"}, {"time", time}};
    return {{"kind", "hitting"}, {"level", level}, {"cap", cap}};
}

StoppingSpec StoppingSpec::from_json(const nlohmann::json& j) {
    StoppingSpec s;
    const std::string k = j.at("kind").get<std::string>();
    if (k == "deterministic") {
        s.kind = Kind::Deterministic;
        s.time = j.at("time").get<double>();
    } else if (k == "hitting") {
        s.kind = Kind::Hitting;
        s.level = j.at("level").get<double>();
        s.cap = j.value("cap", 1.0);
    } else {
        throw std::invalid_argument("stopping time: unknown kind '" + k + "'");
    }
    return s;
}

std::size_t realize_stopping_time(const StoppingSpec& spec, const Grid& grid,
                                  const std::vector<double>& w) {
    if (spec.kind == StoppingSpec::Kind::Deterministic)
        return grid.index_of(spec.time);
    const std::size_t cap_node = grid.index_of(spec.cap);
    for (std::size_t j = 0; j <= cap_node; ++j)
        if (std::fabs(w[j]) >= spec.level) return j;
    return cap_node;
}

Ensemble stop_ensemble(const Ensemble& base, const StoppingSpec& tau) {
    Ensemble out = base;
    out.label = base.label + "+stopped";
    auto inner = base.eval;
    const Grid grid = base.grid;
    out.eval = [inner, tau, grid](std::size_t p, std::vector<double>& w,
                                  std::vector<double>& n) {
        inner(p, w, n);
        const std::size_t jt = realize_stopping_time(tau, grid, w);
        for (std::size_t j = jt + 1; j < n.size(); ++j) n[j] = n[jt];
    };
    return out;
}

CmtReport conditional_mean_test(const Ensemble& ens, double s, double t,
                                const CmtBasis& basis) {
    if (!(s < t)) throw std::invalid_argument("conditional_mean_test: requires s < t");
    if (ens.n_paths < 10000)
        throw std::invalid_argument(
            "conditional_mean_test: ensemble size must be >= 10^4");
    const std::size_t js = ens.grid.index_of(s);
    const std::size_t jt = ens.grid.index_of(t);

    CmtReport rep;
    rep.s = s;
    rep.t = t;
    rep.n_paths = ens.n_paths;
    if (basis.constant) rep.features.push_back("1");
    if (basis.w) rep.features.push_back("W_s");
    if (basis.w2) rep.features.push_back("W_s^2");
    if (basis.gamma) rep.features.push_back("int_gamma_dW");
    if (rep.features.empty())
        throw std::invalid_argument("conditional_mean_test: empty basis");

    const std::size_t k = rep.features.size();
    OlsAccumulator ols(k);
    std::vector<double> w, n, row(k);

    auto fill_row = [&](const std::vector<double>& wv) {
        std::size_t i = 0;
        if (basis.constant) row[i++] = 1.0;
        if (basis.w) row[i++] = wv[js];
        if (basis.w2) row[i++] = wv[js] * wv[js];
        if (basis.gamma) {
            double acc = 0.0;
            for (std::size_t j = 0; j < js; ++j)
                acc += (*basis.gamma)(ens.grid.node(j)) * (wv[j + 1] - wv[j]);
            row[i++] = acc;
        }
    };

    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        ens.path(p, w, n);
        fill_row(w);
        ols.add(row.data(), n[jt] - n[js]);
    }
    ols.solve();
    for (std::size_t p = 0; p < ens.n_paths; ++p) {
        ens.path(p, w, n);
        fill_row(w);
        ols.add_residual_pass(row.data(), n[jt] - n[js]);
    }
    ols.finalize_robust();

    rep.coefficients = ols.coefficients();
    rep.std_errors = ols.std_errors();
    rep.pass = true;
    for (std::size_t i = 0; i < k; ++i) {
        const bool ok = std::fabs(rep.coefficients[i]) < 3.0 * rep.std_errors[i];
        rep.feature_pass.push_back(ok);
        rep.pass = rep.pass && ok;
    }
    return rep;
}

OsReport optional_stopping_check(const Ensemble& ens, const StoppingSpec& tau,
                                 const std::optional<StoppingSpec>& sigma_st,
                                 bool submartingale, bool require_nonnegative) {
    OsReport rep;
    rep.submartingale = submartingale;
    rep.n_paths = ens.n_paths;

    std::vector<double> w, n;
    if (!sigma_st) {
        RunningStat start, stopped, diff;
        for (std::size_t p = 0; p < ens.n_paths; ++p) {
            ens.path(p, w, n);
            if (require_nonnegative)
                for (double v : n)
                    if (v < 0.0)
                        throw std::invalid_argument(
                            "optional_stopping_check: negativity detected in "
                            "non-negative mode");
            const std::size_t jt = realize_stopping_time(tau, ens.grid, w);
            start.add(n[0]);
            stopped.add(n[jt]);
            diff.add(n[jt] - n[0]);
        }
        rep.mean_start = start.mean();
        rep.mean_stopped = stopped.mean();
        rep.diff = diff.mean();
        rep.se = diff.std_error();
    } else {
        // Conditional version: regress N_tau - N_sigma on features at sigma.
        OlsAccumulator ols(3);
        RunningStat start, stopped, diff;
        std::vector<double> row(3);
        auto fill = [&](std::size_t p) {
            ens.path(p, w, n);
            const std::size_t jt = realize_stopping_time(tau, ens.grid, w);
            const std::size_t jsig = realize_stopping_time(*sigma_st, ens.grid, w);
            if (jsig > jt)
                throw std::invalid_argument(
                    "optional_stopping_check: requires sigma <= tau pathwise");
            row[0] = 1.0;
            row[1] = w[jsig];
            row[2] = w[jsig] * w[jsig];
            return std::pair<std::size_t, std::size_t>(jsig, jt);
        };
        for (std::size_t p = 0; p < ens.n_paths; ++p) {
            auto [jsig, jt] = fill(p);
            if (require_nonnegative)
                for (double v : n)
                    if (v < 0.0)
                        throw std::invalid_argument(
                            "optional_stopping_check: negativity detected in "
                            "non-negative mode");
            ols.add(row.data(), n[jt] - n[jsig]);
            start.add(n[jsig]);
            stopped.add(n[jt]);
            diff.add(n[jt] - n[jsig]);
        }
        ols.solve();
        for (std::size_t p = 0; p < ens.n_paths; ++p) {
            auto [jsig, jt] = fill(p);
            ols.add_residual_pass(row.data(), n[jt] - n[jsig]);
        }
        ols.finalize_robust();
        rep.coefficients = ols.coefficients();
        rep.std_errors = ols.std_errors();
        rep.mean_start = start.mean();
        rep.mean_stopped = stopped.mean();
        rep.diff = diff.mean();
        rep.se = diff.std_error();
    }

    if (submartingale)
        rep.pass = rep.diff >= -3.0 * rep.se;
    else
        rep.pass = std::fabs(rep.diff) < 3.0 * rep.se || rep.diff == 0.0;
    return rep;
}

double dyadic_ceil(double x, int n, double cap) {
    const double p = std::pow(2.0, n);
    return std::min((std::floor(p * x) + 1.0) / p, cap);
}

}  // namespace aklab
