#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "aklab/ak_integral.hpp"
#include "aklab/config.hpp"
#include "aklab/ldp.hpp"
#include "aklab/lsde.hpp"
#include "aklab/nearmart.hpp"
#include "aklab/parallel.hpp"
#include "aklab/report.hpp"
#include "aklab/stats.hpp"
#include "aklab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace aklab {

const char* const kExperimentKinds[7] = {
    "integral-refinement", "solve",   "nearmart", "optional-stopping",
    "ldp-rate",            "ldp-mc",  "exp-equiv"};

namespace {

class SchemaErrors {
public:
    void add(const std::string& field, const std::string& what) {
        msg_ += (msg_.empty() ? "" : "; ") + field + ": " + what;
    }
    void raise_if_any() const {
        if (!msg_.empty())
            throw std::invalid_argument("invalid config: " + msg_);
    }
    bool any() const { return !msg_.empty(); }

private:
    std::string msg_;
};

double req_number(const json& j, const std::string& field, SchemaErrors& err) {
    if (!j.contains(field)) {
        err.add(field, "missing required field");
        return 0.0;
    }
    if (!j.at(field).is_number()) {
        err.add(field, "expected a number");
        return 0.0;
    }
    return j.at(field).get<double>();
}

double opt_number(const json& j, const std::string& field, double dflt,
                  SchemaErrors& err) {
    if (!j.contains(field)) return dflt;
    if (!j.at(field).is_number()) {
        err.add(field, "expected a number");
        return dflt;
    }
    return j.at(field).get<double>();
}

std::int64_t opt_int(const json& j, const std::string& field, std::int64_t dflt,
                     SchemaErrors& err) {
    if (!j.contains(field)) return dflt;
    if (!j.at(field).is_number_integer()) {
        err.add(field, "expected an integer");
        return dflt;
    }
    return j.at(field).get<std::int64_t>();
}

std::string opt_string(const json& j, const std::string& field,
                       const std::string& dflt, SchemaErrors& err) {
    if (!j.contains(field)) return dflt;
    if (!j.at(field).is_string()) {
        err.add(field, "expected a string");
        return dflt;
    }
    return j.at(field).get<std::string>();
}

json parse_model(const json& j, const std::string& field, SchemaErrors& err,
                 const json& dflt = json::object()) {
    json m = dflt;
    if (j.contains(field)) m = j.at(field);
    try {
        return ModelSpec::from_json(m).to_json();
    } catch (const std::exception& e) {
        err.add(field, e.what());
        return ModelSpec().to_json();
    }
}

json parse_detfn(const json& j, const std::string& field, const DetFn& dflt,
                 SchemaErrors& err) {
    if (!j.contains(field)) return dflt.to_json();
    try {
        return DetFn::from_json(j.at(field)).to_json();
    } catch (const std::exception& e) {
        err.add(field, e.what());
        return dflt.to_json();
    }
}

std::vector<double> number_list(const json& j, const std::string& field,
                                SchemaErrors& err) {
    std::vector<double> out;
    if (!j.contains(field) || !j.at(field).is_array()) {
        err.add(field, "expected an array of numbers");
        return out;
    }
    for (const auto& e : j.at(field)) {
        if (!e.is_number()) {
            err.add(field, "expected an array of numbers");
            return {};
        }
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<int> int_list(const json& j, const std::string& field,
                          SchemaErrors& err) {
    std::vector<int> out;
    for (double v : number_list(j, field, err)) out.push_back(static_cast<int>(v));
    return out;
}

// ---------------------------------------------------------------------------
// Per-kind config resolution.

json resolve_integral_refinement(const json& j, SchemaErrors& err) {
    json out;
    if (!j.contains("integrand")) {
        err.add("integrand", "missing required field");
    } else {
        try {
            out["integrand"] = IntegrandSpec::from_json(j.at("integrand")).to_json();
        } catch (const std::exception& e) {
            err.add("integrand", e.what());
        }
    }
    auto levels = int_list(j, "levels", err);
    if (!err.any()) {
        if (levels.size() < 3) err.add("levels", "need at least 3 grid sizes");
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
            if (levels[i + 1] <= levels[i]) err.add("levels", "must be increasing");
    }
    out["levels"] = levels;
    out["n_paths"] = opt_int(j, "n_paths", 100, err);
    out["t_end"] = opt_number(j, "t_end", 1.0, err);
    const std::string ref = opt_string(j, "reference", "none", err);
    if (ref != "none" && ref != "w1_squared_minus_1" && ref != "ito_quadratic" &&
        ref != "ak_tail_closed")
        err.add("reference", "unknown reference oracle '" + ref + "'");
    out["reference"] = ref;
    if (j.contains("max_median_error"))
        out["max_median_error"] = req_number(j, "max_median_error", err);
    return out;
}

json resolve_solve(const json& j, SchemaErrors& err) {
    json out;
    out["model"] = parse_model(j, "model", err);
    out["grid_n"] = opt_int(j, "grid_n", 64, err);
    out["n_paths"] = opt_int(j, "n_paths", 10, err);
    out["braid_stride"] = opt_int(j, "braid_stride", 1, err);
    out["identity_tol"] = opt_number(j, "identity_tol", 1e-10, err);
    if (j.contains("agreement_tol"))
        out["agreement_tol"] = req_number(j, "agreement_tol", err);
    return out;
}

json resolve_nearmart(const json& j, SchemaErrors& err) {
    json out;
    const std::string fixture = opt_string(j, "fixture", "", err);
    if (fixture.empty()) {
        err.add("fixture", "missing required field");
    } else {
        try {
            fixture_kind_from_string(fixture);
        } catch (const std::exception& e) {
            err.add("fixture", e.what());
        }
    }
    out["fixture"] = fixture;
    out["grid_n"] = opt_int(j, "grid_n", 16, err);
    out["n_paths"] = opt_int(j, "n_paths", 100000, err);
    if (out["n_paths"].get<std::int64_t>() < 10000)
        err.add("n_paths", "conditional-mean tests need >= 10^4 paths");
    out["s"] = opt_number(j, "s", 0.25, err);
    out["t"] = opt_number(j, "t", 0.75, err);
    out["sigma"] = parse_detfn(j, "sigma", DetFn::one(), err);
    if (j.contains("xi")) {
        try {
            out["xi"] = XiSpec::from_json(j.at("xi")).to_json();
        } catch (const std::exception& e) {
            err.add("xi", e.what());
        }
    } else {
        out["xi"] = XiSpec::constant(1.0).to_json();
    }
    out["c"] = opt_number(j, "c", 1.0, err);
    if (j.contains("basis_gamma"))
        out["basis_gamma"] = parse_detfn(j, "basis_gamma", DetFn::one(), err);
    if (j.contains("transform")) {
        const json& tr = j.at("transform");
        json rt;
        const std::string w = opt_string(tr, "weight", "one", err);
        if (w != "one" && w != "sign" && w != "cos" && w != "constant")
            err.add("transform.weight", "unknown weight '" + w + "'");
        rt["weight"] = w;
        rt["c"] = opt_number(tr, "c", 1.0, err);
        out["transform"] = rt;
    }
    if (j.contains("stopped")) {
        try {
            out["stopped"] = StoppingSpec::from_json(j.at("stopped")).to_json();
        } catch (const std::exception& e) {
            err.add("stopped", e.what());
        }
    }
    return out;
}

json resolve_optional_stopping(const json& j, SchemaErrors& err) {
    json out;
    const std::string fixture = opt_string(j, "fixture", "stoch_exponential", err);
    try {
        fixture_kind_from_string(fixture);
    } catch (const std::exception& e) {
        err.add("fixture", e.what());
    }
    out["fixture"] = fixture;
    out["grid_n"] = opt_int(j, "grid_n", 256, err);
    out["n_paths"] = opt_int(j, "n_paths", 100000, err);
    out["sigma"] = parse_detfn(j, "sigma", DetFn::one(), err);
    if (j.contains("xi")) {
        try {
            out["xi"] = XiSpec::from_json(j.at("xi")).to_json();
        } catch (const std::exception& e) {
            err.add("xi", e.what());
        }
    } else {
        out["xi"] = XiSpec::uniform(0.5, 1.5).to_json();
    }
    out["c"] = opt_number(j, "c", 1.0, err);
    if (!j.contains("tau")) {
        err.add("tau", "missing required field");
    } else {
        try {
            out["tau"] = StoppingSpec::from_json(j.at("tau")).to_json();
        } catch (const std::exception& e) {
            err.add("tau", e.what());
        }
    }
    if (j.contains("sigma_st")) {
        try {
            out["sigma_st"] = StoppingSpec::from_json(j.at("sigma_st")).to_json();
        } catch (const std::exception& e) {
            err.add("sigma_st", e.what());
        }
    }
    out["submartingale"] = j.value("submartingale", false);
    out["require_nonnegative"] = j.value("require_nonnegative", true);
    return out;
}

json resolve_ldp_rate(const json& j, SchemaErrors& err) {
    json out;
    out["model"] = parse_model(j, "model", err);
    out["grid_n"] = opt_int(j, "grid_n", 512, err);
    out["theta_eps"] = opt_number(j, "theta_eps", 0.0, err);
    if (!j.contains("constraint")) {
        err.add("constraint", "missing required field");
    } else {
        const json& c = j.at("constraint");
        json rc;
        const std::string kind = opt_string(c, "kind", "endpoint", err);
        rc["kind"] = kind;
        if (kind == "endpoint") {
            rc["y"] = req_number(c, "y", err);
        } else if (kind == "sup_ball") {
            rc["radius"] = req_number(c, "radius", err);
        } else {
            err.add("constraint.kind", "expected 'endpoint' or 'sup_ball'");
        }
        out["constraint"] = rc;
    }
    out["penalty0"] = opt_number(j, "penalty0", 10.0, err);
    out["penalty_factor"] = opt_number(j, "penalty_factor", 10.0, err);
    out["penalty_stages"] = opt_int(j, "penalty_stages", 6, err);
    out["max_iters"] = opt_int(j, "max_iters", 600, err);
    out["grad_check_points"] = opt_int(j, "grad_check_points", 10, err);
    out["grad_check_tol"] = opt_number(j, "grad_check_tol", 1e-5, err);
    out["violation_tol"] = opt_number(j, "violation_tol", 1e-6, err);
    if (j.contains("expected_J")) {
        out["expected_J"] = req_number(j, "expected_J", err);
        out["expected_J_tol"] = opt_number(j, "expected_J_tol", 1e-4, err);
    }
    return out;
}

json resolve_ldp_mc(const json& j, SchemaErrors& err) {
    json out;
    out["model"] = parse_model(j, "model", err);
    out["grid_n"] = opt_int(j, "grid_n", 16, err);
    if (!j.contains("event")) {
        err.add("event", "missing required field");
    } else {
        const json& e = j.at("event");
        json re;
        const std::string kind = opt_string(e, "kind", "endpoint_geq", err);
        re["kind"] = kind;
        if (kind == "endpoint_geq") {
            re["y"] = req_number(e, "y", err);
        } else if (kind == "sup_dist_geq") {
            re["delta"] = req_number(e, "delta", err);
        } else {
            err.add("event.kind", "expected 'endpoint_geq' or 'sup_dist_geq'");
        }
        out["event"] = re;
    }
    auto eps = number_list(j, "eps_list", err);
    for (double e : eps)
        if (!(e > 0.0) || e > 1.0) err.add("eps_list", "eps values must be in (0,1]");
    out["eps_list"] = eps;
    out["n_paths"] = opt_int(j, "n_paths", 100000, err);
    if (out["n_paths"].get<std::int64_t>() < 10000)
        err.add("n_paths", "must be >= 10^4");
    out["tilt"] = j.value("tilt", false);
    if (j.contains("rate_J")) out["rate_J"] = req_number(j, "rate_J", err);
    if (j.contains("check")) {
        const json& c = j.at("check");
        json rc;
        rc["eps"] = req_number(c, "eps", err);
        rc["rel_tol"] = opt_number(c, "rel_tol", 0.2, err);
        out["check"] = rc;
        if (!j.contains("rate_J"))
            err.add("check", "requires rate_J for the comparison");
    }
    return out;
}

json resolve_exp_equiv(const json& j, SchemaErrors& err) {
    json out;
    json model_default = {{"xi", {{"kind", "eps_family"}, {"kappa", 1.0}}}};
    out["model"] = parse_model(j, "model", err, model_default);
    out["grid_n"] = opt_int(j, "grid_n", 64, err);
    out["delta"] = opt_number(j, "delta", 0.1, err);
    auto eps = number_list(j, "eps_list", err);
    for (double e : eps)
        if (!(e > 0.0) || e > 1.0) err.add("eps_list", "eps values must be in (0,1]");
    out["eps_list"] = eps;
    out["n_paths"] = opt_int(j, "n_paths", 10000, err);
    out["require_zero_exceedances"] = j.value("require_zero_exceedances", false);
    out["require_strictly_decreasing"] = j.value("require_strictly_decreasing", false);
    if (j.contains("seq_bound")) {
        const json& c = j.at("seq_bound");
        json rc;
        rc["eps"] = req_number(c, "eps", err);
        rc["below"] = req_number(c, "below", err);
        out["seq_bound"] = rc;
    }
    return out;
}

}  // namespace

namespace {

void check_known_keys(const json& raw, const std::string& kind,
                      SchemaErrors& err) {
    static const std::vector<std::string> common = {
        "experiment", "seed", "name", "out", "threads", "artifact_version"};
    static const std::map<std::string, std::vector<std::string>> per_kind = {
        {"integral-refinement",
         {"integrand", "levels", "n_paths", "t_end", "reference",
          "max_median_error"}},
        {"solve",
         {"model", "grid_n", "n_paths", "braid_stride", "identity_tol",
          "agreement_tol"}},
        {"nearmart",
         {"fixture", "grid_n", "n_paths", "s", "t", "sigma", "xi", "c",
          "basis_gamma", "transform", "stopped"}},
        {"optional-stopping",
         {"fixture", "grid_n", "n_paths", "sigma", "xi", "c", "tau", "sigma_st",
          "submartingale", "require_nonnegative"}},
        {"ldp-rate",
         {"model", "grid_n", "theta_eps", "constraint", "penalty0",
          "penalty_factor", "penalty_stages", "max_iters", "grad_check_points",
          "grad_check_tol", "violation_tol", "expected_J", "expected_J_tol"}},
        {"ldp-mc",
         {"model", "grid_n", "event", "eps_list", "n_paths", "tilt", "rate_J",
          "check"}},
        {"exp-equiv",
         {"model", "grid_n", "delta", "eps_list", "n_paths",
          "require_zero_exceedances", "require_strictly_decreasing",
          "seq_bound"}},
    };
    const auto& allowed = per_kind.at(kind);
    for (auto it = raw.begin(); it != raw.end(); ++it) {
        const std::string& key = it.key();
        const bool ok =
            std::find(common.begin(), common.end(), key) != common.end() ||
            std::find(allowed.begin(), allowed.end(), key) != allowed.end();
        if (!ok) err.add(key, "unknown field for experiment '" + kind + "'");
    }
}

}  // namespace

json resolve_config(const json& raw) {
    SchemaErrors err;
    if (!raw.is_object()) {
        err.add("$", "config must be a JSON object");
        err.raise_if_any();
    }
    json out;
    const std::string kind = opt_string(raw, "experiment", "", err);
    bool known = false;
    for (const char* k : kExperimentKinds) known = known || kind == k;
    if (!known)
        err.add("experiment",
                kind.empty() ? "missing required field"
                             : "unknown experiment '" + kind + "'");
    err.raise_if_any();
    check_known_keys(raw, kind, err);

    out["experiment"] = kind;
    const std::int64_t seed = opt_int(raw, "seed", 42, err);
    if (seed < 0) err.add("seed", "must be non-negative");
    out["seed"] = seed;
    if (raw.contains("name")) out["name"] = opt_string(raw, "name", "", err);

    json payload;
    if (kind == "integral-refinement") payload = resolve_integral_refinement(raw, err);
    else if (kind == "solve") payload = resolve_solve(raw, err);
    else if (kind == "nearmart") payload = resolve_nearmart(raw, err);
    else if (kind == "optional-stopping") payload = resolve_optional_stopping(raw, err);
    else if (kind == "ldp-rate") payload = resolve_ldp_rate(raw, err);
    else if (kind == "ldp-mc") payload = resolve_ldp_mc(raw, err);
    else payload = resolve_exp_equiv(raw, err);
    err.raise_if_any();

    for (auto it = payload.begin(); it != payload.end(); ++it)
        out[it.key()] = it.value();
    return out;
}

// ---------------------------------------------------------------------------
// Runners.

namespace {

struct RunContext {
    std::uint64_t seed = 42;
    fs::path out_dir;
    int threads = 1;
};

void write_summary(const RunContext& ctx, const std::vector<std::string>& lines) {
    std::string body;
    for (const auto& l : lines) body += l + "\n";
    write_text_file(ctx.out_dir / "summary.txt", body);
}

PathReference reference_fn(const std::string& name) {
    if (name == "w1_squared_minus_1")  // integrand W_1: closed form W_1 W_t - t
        return [](const BrownianPath& p, std::size_t k) {
            return p.terminal() * p.values[k] - p.grid.node(k);
        };
    if (name == "ito_quadratic")
        return [](const BrownianPath& p, std::size_t k) {
            return 0.5 * (p.values[k] * p.values[k] - p.grid.node(k));
        };
    if (name == "ak_tail_closed")
        return [](const BrownianPath& p, std::size_t k) {
            const double wt = p.values[k];
            return p.terminal() * wt - 0.5 * (wt * wt + p.grid.node(k));
        };
    return nullptr;
}

int run_integral_refinement(const json& cfg, const RunContext& ctx) {
    const IntegrandSpec spec = IntegrandSpec::from_json(cfg.at("integrand"));
    const auto levels = cfg.at("levels").get<std::vector<int>>();
    const auto n_paths = cfg.at("n_paths").get<std::size_t>();
    const double t_int = cfg.at("t_end").get<double>();
    const std::string ref_name = cfg.at("reference").get<std::string>();

    const auto rep = refinement_study(spec, ctx.seed, levels, n_paths, t_int,
                                      reference_fn(ref_name));

    CsvWriter values({"path_index", "n", "value"});
    for (std::size_t l = 0; l < rep.levels.size(); ++l)
        for (std::size_t p = 0; p < n_paths; ++p)
            values.add_row({csv_cell(static_cast<double>(p)),
                            csv_cell(static_cast<double>(rep.levels[l])),
                            csv_cell(rep.values[l][p])});
    values.write(ctx.out_dir / "refinement_values.csv");

    CsvWriter lev({"n", "median_abs_diff_to_next", "median_abs_error"});
    for (std::size_t l = 0; l < rep.levels.size(); ++l) {
        const double d =
            l + 1 < rep.levels.size() ? rep.median_abs_diff[l] : std::nan("");
        const double e =
            rep.median_abs_error.empty() ? std::nan("") : rep.median_abs_error[l];
        lev.add_row({csv_cell(static_cast<double>(rep.levels[l])), csv_cell(d),
                     csv_cell(e)});
    }
    lev.write(ctx.out_dir / "refinement_levels.csv");

    bool pass = true;
    std::vector<std::string> lines;
    lines.push_back("experiment: integral-refinement");
    lines.push_back("observed_order: " + format_double(rep.observed_order));
    if (!rep.median_abs_error.empty()) {
        lines.push_back(std::string("errors_decreasing: ") +
                        (rep.errors_decreasing ? "yes" : "no"));
        pass = pass && rep.errors_decreasing;
        if (cfg.contains("max_median_error")) {
            const double bound = cfg.at("max_median_error").get<double>();
            const bool ok = rep.median_abs_error.back() < bound;
            lines.push_back("terminal_median_error: " +
                            format_double(rep.median_abs_error.back()) +
                            (ok ? " < " : " >= ") + format_double(bound));
            pass = pass && ok;
        }
    }
    lines.push_back(std::string("pass: ") + (pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return pass ? 0 : 1;
}

int run_solve(const json& cfg, const RunContext& ctx) {
    const ModelSpec model = ModelSpec::from_json(cfg.at("model"));
    const int grid_n = cfg.at("grid_n").get<int>();
    const auto n_paths = cfg.at("n_paths").get<std::size_t>();
    const int stride = cfg.at("braid_stride").get<int>();
    const double identity_tol = cfg.at("identity_tol").get<double>();
    const Grid grid(grid_n, 1.0);

    struct Block {
        std::string rows;
        double max_identity = 0.0;
        double max_agreement = 0.0;
    };
    auto result = parallel_blocks<Block>(
        n_paths, 8, ctx.threads, Block{},
        [&](std::size_t lo, std::size_t hi) {
            Block b;
            const DetFn se = model.sigma_eff();
            const DetFn ge = model.gamma_eff();
            for (std::size_t p = lo; p < hi; ++p) {
                const BrownianPath path = sample_brownian(grid, ctx.seed, p);
                const double xi = model.xi_realized(ctx.seed, p);
                const auto logz = closed_form_log_curve(model, path);
                const auto trace = braid_solve(model, path, 1.0, stride);
                b.max_identity = std::max(b.max_identity, trace.max_rel_identity_dev);

                // One-step residual of the squared-process dynamics.
                const auto cross = cumtrapz_product(grid, ge, se);
                const double i_gamma = wiener_integral(ge, path);
                const double f_ig = model.f(i_gamma);

                std::vector<double> braid_at(grid.num_nodes(),
                                             std::nan(""));
                braid_at[0] = xi;
                for (const auto& rec : trace.records)
                    braid_at[rec.node] = rec.drift_endpoint;

                for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
                    const double z = xi * std::exp(logz[k]);
                    if (!std::isnan(braid_at[k])) {
                        const double rel =
                            std::fabs(braid_at[k] - z) /
                            std::max(std::fabs(z), 1e-300);
                        b.max_agreement = std::max(b.max_agreement, rel);
                    }
                    double residual = 0.0;
                    if (k + 1 < grid.num_nodes()) {
                        const double tk = grid.node(k);
                        double dsum = 0.0;
                        if (k > 0) {
                            double acc =
                                0.5 * model.f.deriv(i_gamma - (cross[k] - cross[0])) +
                                0.5 * model.f.deriv(i_gamma);
                            for (std::size_t s = 1; s < k; ++s)
                                acc += model.f.deriv(i_gamma - (cross[k] - cross[s]));
                            dsum = grid.dt() * acc;
                        }
                        const double v0 = xi * xi * std::exp(2.0 * logz[k]);
                        const double v1 = xi * xi * std::exp(2.0 * logz[k + 1]);
                        const double s = se(tk), g = ge(tk);
                        residual = v1 - v0 -
                                   (s * s + f_ig + 2.0 * g * s * dsum) * v0 *
                                       grid.dt() -
                                   2.0 * s * v0 * path.increment(k);
                    }
                    const double v = xi * xi * std::exp(2.0 * logz[k]);
                    b.rows += csv_cell(static_cast<double>(p)) + "," +
                              csv_cell(grid.node(k)) + "," + csv_cell(z) + "," +
                              (std::isnan(braid_at[k]) ? "nan"
                                                       : csv_cell(braid_at[k])) +
                              "," + csv_cell(v) + "," + csv_cell(residual) +
                              "\r\n";
                }
            }
            return b;
        },
        [](Block& acc, Block&& b) {
            acc.rows += b.rows;
            acc.max_identity = std::max(acc.max_identity, b.max_identity);
            acc.max_agreement = std::max(acc.max_agreement, b.max_agreement);
        });

    write_text_file(ctx.out_dir / "trajectories.csv",
                    "path_index,t,Z_closed,Z_braid,V,residual\r\n" + result.rows);

    bool pass = result.max_identity <= identity_tol;
    std::vector<std::string> lines;
    lines.push_back("experiment: solve");
    lines.push_back("max_braid_identity_rel_dev: " +
                    format_double(result.max_identity));
    lines.push_back("max_solver_rel_discrepancy: " +
                    format_double(result.max_agreement));
    if (cfg.contains("agreement_tol")) {
        const double tol = cfg.at("agreement_tol").get<double>();
        pass = pass && result.max_agreement <= tol;
        lines.push_back("agreement_tol: " + format_double(tol));
    }
    lines.push_back(std::string("pass: ") + (pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return pass ? 0 : 1;
}

Ensemble ensemble_from_config(const json& cfg, const RunContext& ctx) {
    const FixtureKind kind =
        fixture_kind_from_string(cfg.at("fixture").get<std::string>());
    const Grid grid(cfg.at("grid_n").get<int>(), 1.0);
    const auto n_paths = cfg.at("n_paths").get<std::size_t>();
    const DetFn sigma = DetFn::from_json(cfg.at("sigma"));
    const XiSpec xi = XiSpec::from_json(cfg.at("xi"));
    const double c = cfg.value("c", 1.0);
    Ensemble ens =
        make_fixture_ensemble(kind, grid, n_paths, ctx.seed, sigma, xi, c);
    if (cfg.contains("transform")) {
        const std::string w = cfg.at("transform").at("weight").get<std::string>();
        WeightKind wk = WeightKind::One;
        if (w == "sign") wk = WeightKind::Sign;
        else if (w == "cos") wk = WeightKind::CosW;
        else if (w == "constant") wk = WeightKind::Constant;
        ens = nm_transform(wk, cfg.at("transform").at("c").get<double>(), ens);
    }
    if (cfg.contains("stopped"))
        ens = stop_ensemble(ens, StoppingSpec::from_json(cfg.at("stopped")));
    return ens;
}

int run_nearmart(const json& cfg, const RunContext& ctx) {
    Ensemble ens = ensemble_from_config(cfg, ctx);
    CmtBasis basis;
    if (cfg.contains("basis_gamma"))
        basis.gamma = DetFn::from_json(cfg.at("basis_gamma"));
    const auto rep = conditional_mean_test(ens, cfg.at("s").get<double>(),
                                           cfg.at("t").get<double>(), basis);

    CsvWriter csv({"feature", "coefficient", "std_error", "pass"});
    for (std::size_t i = 0; i < rep.features.size(); ++i)
        csv.add_row({csv_cell(rep.features[i]), csv_cell(rep.coefficients[i]),
                     csv_cell(rep.std_errors[i]),
                     rep.feature_pass[i] ? "1" : "0"});
    csv.write(ctx.out_dir / "report.csv");

    std::vector<std::string> lines;
    lines.push_back("experiment: nearmart");
    lines.push_back("fixture: " + ens.label);
    lines.push_back("n_paths: " + std::to_string(rep.n_paths));
    lines.push_back("window: s=" + format_double(rep.s) +
                    " t=" + format_double(rep.t));
    for (std::size_t i = 0; i < rep.features.size(); ++i)
        lines.push_back("  " + rep.features[i] + ": coef=" +
                        format_double(rep.coefficients[i]) +
                        " se=" + format_double(rep.std_errors[i]) +
                        (rep.feature_pass[i] ? " (within 3 SE)" : " (OUTSIDE 3 SE)"));
    lines.push_back(std::string("pass: ") + (rep.pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return rep.pass ? 0 : 1;
}

int run_optional_stopping(const json& cfg, const RunContext& ctx) {
    Ensemble ens = ensemble_from_config(cfg, ctx);
    const StoppingSpec tau = StoppingSpec::from_json(cfg.at("tau"));
    std::optional<StoppingSpec> sig;
    if (cfg.contains("sigma_st"))
        sig = StoppingSpec::from_json(cfg.at("sigma_st"));
    const auto rep = optional_stopping_check(
        ens, tau, sig, cfg.at("submartingale").get<bool>(),
        cfg.at("require_nonnegative").get<bool>());

    CsvWriter csv({"quantity", "value"});
    csv.add_row({"mean_start", csv_cell(rep.mean_start)});
    csv.add_row({"mean_stopped", csv_cell(rep.mean_stopped)});
    csv.add_row({"diff", csv_cell(rep.diff)});
    csv.add_row({"std_error", csv_cell(rep.se)});
    csv.add_row({"pass", rep.pass ? "1" : "0"});
    csv.write(ctx.out_dir / "report.csv");

    std::vector<std::string> lines;
    lines.push_back("experiment: optional-stopping");
    lines.push_back("fixture: " + ens.label);
    lines.push_back("E[N_start] = " + format_double(rep.mean_start));
    lines.push_back("E[N_stopped] = " + format_double(rep.mean_stopped));
    lines.push_back("difference = " + format_double(rep.diff) + " (SE " +
                    format_double(rep.se) + ")");
    lines.push_back(std::string("pass: ") + (rep.pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return rep.pass ? 0 : 1;
}

int run_ldp_rate(const json& cfg, const RunContext& ctx) {
    RateProblem problem;
    problem.model = ModelSpec::from_json(cfg.at("model"));
    problem.grid = Grid(cfg.at("grid_n").get<int>(), 1.0);
    problem.theta_eps = cfg.at("theta_eps").get<double>();
    const json& c = cfg.at("constraint");
    if (c.at("kind").get<std::string>() == "endpoint") {
        problem.constraint.kind = RateConstraint::Kind::Endpoint;
        problem.constraint.y = c.at("y").get<double>();
    } else {
        problem.constraint.kind = RateConstraint::Kind::SupBallEscape;
        problem.constraint.radius = c.at("radius").get<double>();
    }
    problem.penalty0 = cfg.at("penalty0").get<double>();
    problem.penalty_factor = cfg.at("penalty_factor").get<double>();
    problem.penalty_stages = cfg.at("penalty_stages").get<int>();
    problem.max_iters = cfg.at("max_iters").get<int>();

    RateResult res = rate_endpoint(problem);
    const double grad_rel = rate_gradient_check(
        problem, cfg.at("grad_check_points").get<int>(), ctx.seed);

    CsvWriter csv({"quantity", "value"});
    csv.add_row({"J", csv_cell(res.J)});
    csv.add_row({"constraint_violation", csv_cell(res.constraint_violation)});
    csv.add_row({"gradient_check_rel", csv_cell(grad_rel)});
    csv.add_row({"iterations", csv_cell(static_cast<double>(res.iterations))});
    csv.add_row({"converged", res.converged ? "1" : "0"});
    csv.write(ctx.out_dir / "rate.csv");

    CsvWriter argmin({"t", "h"});
    for (std::size_t j = 0; j < res.argmin.values.size(); ++j)
        argmin.add_row({csv_cell(res.argmin.grid.node(j)),
                        csv_cell(res.argmin.values[j])});
    argmin.write(ctx.out_dir / "argmin.csv");

    bool pass = res.converged;
    const double vtol = cfg.at("violation_tol").get<double>();
    pass = pass && res.constraint_violation <=
                       vtol * std::max(1.0, std::fabs(problem.constraint.y));
    pass = pass && grad_rel < cfg.at("grad_check_tol").get<double>();
    std::vector<std::string> lines;
    lines.push_back("experiment: ldp-rate");
    lines.push_back("J = " + format_double(res.J));
    lines.push_back("constraint_violation = " +
                    format_double(res.constraint_violation));
    lines.push_back("gradient_check_rel = " + format_double(grad_rel));
    if (cfg.contains("expected_J")) {
        const double ej = cfg.at("expected_J").get<double>();
        const double tol = cfg.at("expected_J_tol").get<double>();
        const bool ok = std::fabs(res.J - ej) <= tol;
        lines.push_back("expected_J = " + format_double(ej) + " |diff| = " +
                        format_double(std::fabs(res.J - ej)) +
                        (ok ? " within " : " OUTSIDE ") + format_double(tol));
        pass = pass && ok;
    }
    lines.push_back(std::string("pass: ") + (pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return pass ? 0 : 1;
}

int run_ldp_mc(const json& cfg, const RunContext& ctx) {
    const ModelSpec model = ModelSpec::from_json(cfg.at("model"));
    const Grid grid(cfg.at("grid_n").get<int>(), 1.0);
    const auto eps_list = cfg.at("eps_list").get<std::vector<double>>();
    const auto n_paths = cfg.at("n_paths").get<std::size_t>();

    McEvent event;
    if (cfg.at("event").at("kind").get<std::string>() == "endpoint_geq") {
        event.kind = McEvent::Kind::EndpointGeq;
        event.y = cfg.at("event").at("y").get<double>();
    } else {
        event.kind = McEvent::Kind::SupDistGeq;
        event.delta = cfg.at("event").at("delta").get<double>();
    }

    std::optional<CMPath> tilt;
    if (cfg.at("tilt").get<bool>()) {
        RateProblem rp;
        rp.model = model;
        rp.model.epsilon = 0.0;
        rp.grid = grid;
        if (event.kind == McEvent::Kind::EndpointGeq) {
            rp.constraint.kind = RateConstraint::Kind::Endpoint;
            rp.constraint.y = event.y;
        } else {
            rp.constraint.kind = RateConstraint::Kind::SupBallEscape;
            rp.constraint.radius = event.delta;
        }
        tilt = rate_endpoint(rp).argmin;
    }

    const McTable table = mc_tail(model, event, eps_list, n_paths, grid,
                                  ctx.seed, tilt);

    CsvWriter csv({"eps", "n_paths", "hits", "p_hat", "wilson_lo", "wilson_hi",
                   "eps_log_p", "is_bound"});
    SvgSeries series;
    for (const auto& r : table.rows) {
        csv.add_row({csv_cell(r.eps), csv_cell(static_cast<double>(r.n_paths)),
                     csv_cell(r.hits), csv_cell(r.p_hat), csv_cell(r.wilson_lo),
                     csv_cell(r.wilson_hi), csv_cell(r.eps_log_p),
                     r.zero_hits ? "1" : "0"});
        series.x.push_back(r.eps);
        series.y.push_back(r.eps_log_p);
    }
    csv.write(ctx.out_dir / "mc.csv");

    SvgPlot plot;
    plot.title = "rare-event sweep";
    plot.x_label = "eps";
    plot.y_label = "eps * log p";
    plot.series.push_back(series);
    if (cfg.contains("rate_J"))
        plot.hlines.push_back({-cfg.at("rate_J").get<double>(), "#d62728"});
    plot.write(ctx.out_dir / "plot.svg");

    bool pass = true;
    std::vector<std::string> lines;
    lines.push_back("experiment: ldp-mc");
    for (const auto& r : table.rows)
        lines.push_back("eps=" + format_double(r.eps) + " p_hat=" +
                        format_double(r.p_hat) + " eps*log(p)=" +
                        format_double(r.eps_log_p) +
                        (r.zero_hits ? " (rule-of-three bound)" : ""));
    if (cfg.contains("check")) {
        const double ce = cfg.at("check").at("eps").get<double>();
        const double tol = cfg.at("check").at("rel_tol").get<double>();
        const double J = cfg.at("rate_J").get<double>();
        bool found = false;
        for (const auto& r : table.rows) {
            if (r.eps == ce) {
                found = true;
                const double rel = std::fabs(r.eps_log_p - (-J)) / std::fabs(J);
                const bool ok = rel <= tol;
                lines.push_back("check at eps=" + format_double(ce) +
                                ": |eps log p + J|/J = " + format_double(rel) +
                                (ok ? " within " : " OUTSIDE ") +
                                format_double(tol));
                pass = pass && ok;
            }
        }
        if (!found) {
            lines.push_back("check eps not in eps_list");
            pass = false;
        }
    }
    lines.push_back(std::string("pass: ") + (pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return pass ? 0 : 1;
}

int run_exp_equiv(const json& cfg, const RunContext& ctx) {
    const ModelSpec model = ModelSpec::from_json(cfg.at("model"));
    const Grid grid(cfg.at("grid_n").get<int>(), 1.0);
    const auto rep = exp_equiv_check(
        model, cfg.at("delta").get<double>(),
        cfg.at("eps_list").get<std::vector<double>>(),
        cfg.at("n_paths").get<std::size_t>(), grid, ctx.seed);

    CsvWriter csv({"eps", "seq_exact", "seq_empirical", "exceed_count",
                   "p_bound", "eps_log_p", "is_bound"});
    for (const auto& r : rep.rows)
        csv.add_row({csv_cell(r.eps), csv_cell(r.seq_exact),
                     csv_cell(r.seq_empirical),
                     csv_cell(static_cast<double>(r.exceed_count)),
                     csv_cell(r.p_bound), csv_cell(r.eps_log_p),
                     r.zero_hits ? "1" : "0"});
    csv.write(ctx.out_dir / "ee.csv");

    bool pass = true;
    std::vector<std::string> lines;
    lines.push_back("experiment: exp-equiv");
    lines.push_back("delta = " + format_double(rep.delta));
    for (const auto& r : rep.rows)
        lines.push_back("eps=" + format_double(r.eps) + " seq=" +
                        format_double(r.seq_empirical) + " exceed=" +
                        std::to_string(r.exceed_count));
    if (cfg.at("require_zero_exceedances").get<bool>()) {
        for (const auto& r : rep.rows) pass = pass && r.exceed_count == 0;
        lines.push_back(std::string("zero_exceedances: ") +
                        (pass ? "yes" : "no"));
    }
    if (cfg.at("require_strictly_decreasing").get<bool>()) {
        pass = pass && rep.sequence_strictly_decreasing;
        lines.push_back(std::string("sequence_strictly_decreasing: ") +
                        (rep.sequence_strictly_decreasing ? "yes" : "no"));
    }
    if (cfg.contains("seq_bound")) {
        const double ce = cfg.at("seq_bound").at("eps").get<double>();
        const double below = cfg.at("seq_bound").at("below").get<double>();
        for (const auto& r : rep.rows)
            if (r.eps == ce) {
                const bool ok = r.seq_empirical < below;
                lines.push_back("seq(" + format_double(ce) + ") = " +
                                format_double(r.seq_empirical) +
                                (ok ? " < " : " >= ") + format_double(below));
                pass = pass && ok;
            }
    }
    lines.push_back(std::string("pass: ") + (pass ? "yes" : "no"));
    write_summary(ctx, lines);
    return pass ? 0 : 1;
}

}  // namespace

int run_experiment(const json& raw_config, const RunOptions& opts) {
    json cfg = resolve_config(raw_config);
    if (opts.seed_override) cfg["seed"] = *opts.seed_override;
    if (opts.check_only) return 0;

    RunContext ctx;
    ctx.seed = cfg.at("seed").get<std::uint64_t>();
    int threads = 1;
    if (raw_config.contains("threads") &&
        raw_config.at("threads").is_number_integer())
        threads = raw_config.at("threads").get<int>();
    ctx.threads = opts.threads_override.value_or(threads);

    std::string out = opts.out_override.value_or("");
    if (out.empty()) {
        if (raw_config.contains("out") && raw_config.at("out").is_string())
            out = raw_config.at("out").get<std::string>();
    }
    if (out.empty()) {
        if (const char* env = std::getenv("AKLAB_OUT")) out = env;
    }
    if (out.empty()) out = "out";
    ctx.out_dir = fs::path(out);
    if (cfg.contains("name"))
        ctx.out_dir /= cfg.at("name").get<std::string>();
    fs::create_directories(ctx.out_dir);

    json manifest = cfg;
    manifest["artifact_version"] = AKLAB_VERSION;
    write_manifest(ctx.out_dir, manifest);

    const std::string kind = cfg.at("experiment").get<std::string>();
    if (kind == "integral-refinement") return run_integral_refinement(cfg, ctx);
    if (kind == "solve") return run_solve(cfg, ctx);
    if (kind == "nearmart") return run_nearmart(cfg, ctx);
    if (kind == "optional-stopping") return run_optional_stopping(cfg, ctx);
    if (kind == "ldp-rate") return run_ldp_rate(cfg, ctx);
    if (kind == "ldp-mc") return run_ldp_mc(cfg, ctx);
    if (kind == "exp-equiv") return run_exp_equiv(cfg, ctx);
    throw std::logic_error("unreachable experiment kind");
}

}  // namespace aklab
