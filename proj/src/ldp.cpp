#include "aklab/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aklab/lsde.hpp"
#include "aklab/optim.hpp"
#include "aklab/rng.hpp"
#include "aklab/stats.hpp"

namespace aklab {

CMPath::CMPath(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.num_nodes())
        throw std::invalid_argument("CMPath: values misaligned with grid");
    if (values[0] != 0.0)
        throw std::invalid_argument("CMPath: must start at h(0) = 0");
}

CMPath CMPath::zero(const Grid& g) {
    return CMPath(g, std::vector<double>(g.num_nodes(), 0.0));
}

double schilder_rate(const CMPath& h) {
    double acc = 0.0;
    for (std::size_t j = 1; j < h.values.size(); ++j) {
        const double dh = h.values[j] - h.values[j - 1];
        acc += dh * dh / (2.0 * h.grid.dt());
    }
    return acc;
}

namespace {

double require_kappa(const ModelSpec& model) {
    if (!model.xi.is_constant())
        throw std::invalid_argument(
            "theta: the contraction map is defined for a constant initial "
            "value kappa");
    return model.xi.center();
}

struct ThetaTables {
    std::vector<double> quad;   // cumtrapz sigma^2
    std::vector<double> cross;  // cumtrapz gamma * sigma
    double i_gamma = 0.0;       // int_0^1 gamma dx (left sums)
    std::vector<double> a_cum;  // cumulative left sums of sigma dx
};

ThetaTables theta_tables(const CMPath& x, const ModelSpec& model) {
    ThetaTables t;
    t.quad = cumtrapz_product(x.grid, model.sigma, model.sigma);
    t.cross = cumtrapz_product(x.grid, model.gamma, model.sigma);
    t.a_cum.assign(x.values.size(), 0.0);
    double ig = 0.0;
    for (std::size_t j = 1; j < x.values.size(); ++j) {
        const double dx = x.values[j] - x.values[j - 1];
        t.a_cum[j] = t.a_cum[j - 1] + model.sigma(x.grid.node(j - 1)) * dx;
        ig += model.gamma(x.grid.node(j - 1)) * dx;
    }
    t.i_gamma = ig;
    return t;
}

double theta_log_at(const ThetaTables& t, const ModelSpec& model,
                    const Grid& grid, std::size_t k, double eps) {
    const DetFn& f = model.f;
    double drift;
    if (eps == 0.0) {
        drift = f(t.i_gamma) * grid.node(k);
    } else if (k == 0) {
        drift = 0.0;
    } else {
        double acc = 0.5 * f(t.i_gamma - eps * (t.cross[k] - t.cross[0])) +
                     0.5 * f(t.i_gamma);
        for (std::size_t s = 1; s < k; ++s)
            acc += f(t.i_gamma - eps * (t.cross[k] - t.cross[s]));
        drift = grid.dt() * acc;
    }
    return t.a_cum[k] - 0.5 * eps * t.quad[k] + drift;
}

}  // namespace

double theta_map(const CMPath& x, const ModelSpec& model, double t) {
    return theta_map(x, model, t, model.epsilon);
}

double theta_map(const CMPath& x, const ModelSpec& model, double t, double eps) {
    const double kappa = require_kappa(model);
    const std::size_t k = x.grid.index_of(t);
    const ThetaTables tab = theta_tables(x, model);
    return kappa * std::exp(theta_log_at(tab, model, x.grid, k, eps));
}

std::vector<double> theta_curve(const CMPath& x, const ModelSpec& model,
                                double eps) {
    const double kappa = require_kappa(model);
    const ThetaTables tab = theta_tables(x, model);
    std::vector<double> out(x.values.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = kappa * std::exp(theta_log_at(tab, model, x.grid, k, eps));
    return out;
}

void RateProblem::validate() const {
    model.validate();
    const double kappa = require_kappa(model);
    if (constraint.kind == RateConstraint::Kind::Endpoint) {
        if (!(constraint.y / kappa > 0.0))
            throw std::invalid_argument(
                "rate problem: endpoint target must satisfy y / kappa > 0");
    } else {
        if (!(constraint.radius > 0.0))
            throw std::invalid_argument("rate problem: ball radius must be positive");
    }
    if (!(theta_eps >= 0.0))
        throw std::invalid_argument("rate problem: theta epsilon must be >= 0");
}

namespace {

// The optimizer works in scaled increments u_j = dh_j / sqrt(dt): the
// Schilder energy is then 1/2 |u|^2 and its Hessian the identity.
struct EndpointObjective {
    const ModelSpec* model;
    Grid grid;
    double eps;
    double kappa;
    std::size_t k_target;  // constraint node
    double y;
    double mu = 1.0;

    std::vector<double> a;     // sigma(t_{j-1}) sqrt(dt), j = 1..k_target
    std::vector<double> b;     // gamma(t_{j-1}) sqrt(dt), j = 1..n (full grid)
    std::vector<double> quad;  // cumtrapz sigma^2
    std::vector<double> cross; // cumtrapz gamma sigma

    EndpointObjective(const ModelSpec& m, const Grid& g, double eps_,
                      std::size_t k, double y_)
        : model(&m), grid(g), eps(eps_), kappa(require_kappa(m)), k_target(k),
          y(y_) {
        const std::size_t n = grid.num_nodes() - 1;
        const double sdt = std::sqrt(grid.dt());
        a.resize(n);
        b.resize(n);
        for (std::size_t j = 1; j <= n; ++j) {
            a[j - 1] = (j <= k_target ? m.sigma(grid.node(j - 1)) * sdt : 0.0);
            b[j - 1] = m.gamma(grid.node(j - 1)) * sdt;
        }
        quad = cumtrapz_product(grid, m.sigma, m.sigma);
        cross = cumtrapz_product(grid, m.gamma, m.sigma);
    }

    double theta_of(const std::vector<double>& u, double& df_scale) const {
        double A = 0.0, I = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            A += a[j] * u[j];
            I += b[j] * u[j];
        }
        const DetFn& f = model->f;
        double drift, dsum;
        if (eps == 0.0) {
            drift = f(I) * grid.node(k_target);
            dsum = f.deriv(I) * grid.node(k_target);
        } else if (k_target == 0) {
            drift = dsum = 0.0;
        } else {
            double acc = 0.5 * f(I - eps * (cross[k_target] - cross[0])) +
                         0.5 * f(I);
            double dacc = 0.5 * f.deriv(I - eps * (cross[k_target] - cross[0])) +
                          0.5 * f.deriv(I);
            for (std::size_t s = 1; s < k_target; ++s) {
                const double arg = I - eps * (cross[k_target] - cross[s]);
                acc += f(arg);
                dacc += f.deriv(arg);
            }
            drift = grid.dt() * acc;
            dsum = grid.dt() * dacc;
        }
        df_scale = dsum;
        return kappa *
               std::exp(A - 0.5 * eps * quad[k_target] + drift);
    }

    double operator()(const std::vector<double>& u, std::vector<double>& g) const {
        double df_scale = 0.0;
        const double th = theta_of(u, df_scale);
        double energy = 0.0;
        for (double v : u) energy += 0.5 * v * v;
        const double c = th - y;
        const double w = mu * c * th;
        for (std::size_t j = 0; j < u.size(); ++j)
            g[j] = u[j] + w * (a[j] + df_scale * b[j]);
        return energy + 0.5 * mu * c * c;
    }

    std::vector<double> feasible_init() const {
        // Linear path meeting the constraint in the f == 0 reduction.
        std::vector<double> u(a.size(), 0.0);
        double aa = 0.0;
        for (double v : a) aa += v * v;
        if (aa == 0.0) return u;
        const double c0 =
            std::log(y / kappa) + 0.5 * eps * quad[k_target];
        for (std::size_t j = 0; j < u.size(); ++j) u[j] = c0 * a[j] / aa;
        return u;
    }
};

RateResult solve_endpoint(const RateProblem& problem, std::size_t k_target,
                          double y) {
    EndpointObjective obj(problem.model, problem.grid, problem.theta_eps,
                          k_target, y);
    std::vector<double> u = obj.feasible_init();

    LbfgsOptions opts;
    opts.max_iters = problem.max_iters;
    opts.grad_tol = problem.grad_tol;

    RateResult res;
    double mu = problem.penalty0;
    for (int stage = 0; stage < problem.penalty_stages; ++stage) {
        obj.mu = mu;
        auto fg = [&obj](const std::vector<double>& x, std::vector<double>& g) {
            return obj(x, g);
        };
        LbfgsResult lr = lbfgs_minimize(u, fg, opts);
        u = lr.x;
        res.iterations += lr.iterations;
        res.converged = lr.converged;
        mu *= problem.penalty_factor;
    }

    double energy = 0.0;
    for (double v : u) energy += 0.5 * v * v;
    res.J = energy;

    double df_scale = 0.0;
    res.constraint_violation = std::fabs(obj.theta_of(u, df_scale) - y);

    std::vector<double> h(problem.grid.num_nodes(), 0.0);
    const double sdt = std::sqrt(problem.grid.dt());
    for (std::size_t j = 1; j < h.size(); ++j) h[j] = h[j - 1] + sdt * u[j - 1];
    res.argmin = CMPath(problem.grid, std::move(h));
    return res;
}

}  // namespace

RateResult rate_endpoint(const RateProblem& problem) {
    problem.validate();
    const std::size_t n = problem.grid.num_nodes() - 1;

    if (problem.constraint.kind == RateConstraint::Kind::Endpoint) {
        RateResult res = solve_endpoint(problem, n, problem.constraint.y);
        res.gradient_check_rel = rate_gradient_check(problem, 3, 0xA11CE5u);
        return res;
    }

    // Sup-ball escape: the event is a union over nodes and signs of endpoint
    // constraints theta(h)(t_k) = ref_k +- radius, so the rate is their
    // minimum. Nodes are decimated for the scan, with the terminal node
    // always included.
    const double kappa = require_kappa(problem.model);
    std::vector<double> ref;
    if (problem.constraint.reference) {
        ref = *problem.constraint.reference;
        if (ref.size() != problem.grid.num_nodes())
            throw std::invalid_argument("rate problem: reference curve misaligned");
    } else {
        ref = theta_curve(CMPath::zero(problem.grid), problem.model,
                          problem.theta_eps);
    }

    RateResult best;
    best.J = std::numeric_limits<double>::infinity();
    const std::size_t step = std::max<std::size_t>(1, n / 16);
    for (std::size_t k = step; k <= n; k += step) {
        const std::size_t kk = std::min(k, n);
        for (const double sgn : {1.0, -1.0}) {
            const double target = ref[kk] + sgn * problem.constraint.radius;
            if (!(target / kappa > 0.0)) continue;  // unreachable by theta
            RateResult cand = solve_endpoint(problem, kk, target);
            if (cand.J < best.J) best = cand;
        }
    }
    if (!std::isfinite(best.J))
        throw std::invalid_argument("rate problem: infeasible ball constraint");
    best.gradient_check_rel = rate_gradient_check(problem, 3, 0xA11CE5u);
    return best;
}

double rate_gradient_check(const RateProblem& problem, int n_points,
                           std::uint64_t seed) {
    problem.validate();
    const std::size_t n = problem.grid.num_nodes() - 1;
    const std::size_t k_target =
        problem.constraint.kind == RateConstraint::Kind::Endpoint
            ? n
            : n;  // probe the terminal-node objective in both modes
    const double y = problem.constraint.kind == RateConstraint::Kind::Endpoint
                         ? problem.constraint.y
                         : require_kappa(problem.model) + problem.constraint.radius;

    EndpointObjective obj(problem.model, problem.grid, problem.theta_eps,
                          k_target, y);
    obj.mu = problem.penalty0 * std::pow(problem.penalty_factor,
                                         problem.penalty_stages / 2);

    const std::vector<double> base = obj.feasible_init();
    double worst = 0.0;
    std::vector<double> g(n), gp(n), gm(n), u(n), up(n), um(n);
    for (int pt = 0; pt < n_points; ++pt) {
        for (std::size_t j = 0; j < n; ++j)
            u[j] = base[j] +
                   0.3 * normal(seed, static_cast<std::uint64_t>(pt), kLevelAux,
                                static_cast<std::uint32_t>(j));
        obj(u, g);
        double max_diff = 0.0, max_scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = 1e-6 * std::max(1.0, std::fabs(u[j]));
            up = u;
            um = u;
            up[j] += h;
            um[j] -= h;
            const double fp = obj(up, gp);
            const double fm = obj(um, gm);
            const double fd = (fp - fm) / (2.0 * h);
            max_diff = std::max(max_diff, std::fabs(fd - g[j]));
            max_scale = std::max(max_scale, std::fabs(g[j]));
        }
        worst = std::max(worst, max_diff / std::max(max_scale, 1e-12));
    }
    return worst;
}

McTable mc_tail(const ModelSpec& model, const McEvent& event,
                const std::vector<double>& eps_list, std::size_t n_paths,
                const Grid& grid, std::uint64_t seed,
                const std::optional<CMPath>& tilt) {
    model.validate();
    if (n_paths < 10000)
        throw std::invalid_argument("mc_tail: n_paths must be >= 10^4");
    for (double e : eps_list)
        if (!(e > 0.0) || e > 1.0)
            throw std::invalid_argument("mc_tail: eps values must lie in (0, 1]");
    if (tilt && tilt->grid.num_nodes() != grid.num_nodes())
        throw std::invalid_argument("mc_tail: tilt path misaligned with grid");

    // Reference curve for sup-distance events: the noise-free skeleton.
    std::vector<double> ref;
    if (event.kind == McEvent::Kind::SupDistGeq) {
        ModelSpec m0 = model;
        m0.epsilon = 0.0;
        CMPath zero = CMPath::zero(grid);
        ref = theta_curve(zero, m0, 0.0);
    }

    McTable table;
    table.tilted = tilt.has_value();
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        const double eps = eps_list[ei];
        ModelSpec m = model;
        m.epsilon = eps;

        RunningStat west;  // tilted-estimator weights
        std::size_t hits = 0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const std::uint64_t stream = p + ei * n_paths;
            BrownianPath path = sample_brownian(grid, seed, stream);
            double weight = 1.0;
            if (tilt) {
                const double inv_se = 1.0 / std::sqrt(eps);
                double lw = 0.0;
                for (std::size_t j = 0; j + 1 < path.values.size(); ++j) {
                    const double dh =
                        (tilt->values[j + 1] - tilt->values[j]) * inv_se;
                    const double db = path.increment(j);
                    lw -= (dh / grid.dt()) * db + 0.5 * dh * dh / grid.dt();
                }
                weight = std::exp(lw);
                for (std::size_t j = 1; j < path.values.size(); ++j)
                    path.values[j] += tilt->values[j] * inv_se;
            }

            bool in_event = false;
            const double xi = m.xi_realized(seed, stream);
            if (event.kind == McEvent::Kind::EndpointGeq) {
                const double z =
                    xi * std::exp(closed_form_log_at(m, path,
                                                     path.values.size() - 1));
                in_event = z >= event.y;
            } else {
                const auto curve = closed_form_log_curve(m, path);
                for (std::size_t k = 0; k < curve.size(); ++k) {
                    if (std::fabs(xi * std::exp(curve[k]) - ref[k]) >=
                        event.delta) {
                        in_event = true;
                        break;
                    }
                }
            }
            if (in_event) ++hits;
            west.add(in_event ? weight : 0.0);
        }

        McRow row;
        row.eps = eps;
        row.n_paths = n_paths;
        row.hits = tilt ? west.mean() * static_cast<double>(n_paths)
                        : static_cast<double>(hits);
        row.p_hat = tilt ? west.mean()
                         : static_cast<double>(hits) / static_cast<double>(n_paths);
        if (tilt) {
            row.wilson_lo = std::max(0.0, west.mean() - 3.0 * west.std_error());
            row.wilson_hi = west.mean() + 3.0 * west.std_error();
        } else {
            const auto wi = wilson_interval(hits, n_paths, 3.0);
            row.wilson_lo = wi.lo;
            row.wilson_hi = wi.hi;
        }
        row.zero_hits = row.p_hat <= 0.0;
        row.bound3 = 3.0 / static_cast<double>(n_paths);
        row.eps_log_p =
            row.zero_hits ? eps * std::log(row.bound3) : eps * std::log(row.p_hat);
        table.rows.push_back(row);
    }
    return table;
}

EeReport exp_equiv_check(const ModelSpec& model, double delta,
                         const std::vector<double>& eps_list,
                         std::size_t n_paths, const Grid& grid,
                         std::uint64_t seed) {
    model.validate();
    if (!(delta > 0.0))
        throw std::invalid_argument("exp_equiv_check: delta must be positive");
    const auto kind = model.xi.kind;
    if (kind != XiSpec::Kind::EpsFamily && kind != XiSpec::Kind::SqrtEpsFamily &&
        kind != XiSpec::Kind::Constant)
        throw std::invalid_argument(
            "exp_equiv_check: xi must be the eps family, the sqrt-eps family, "
            "or constant");

    EeReport rep;
    rep.delta = delta;
    for (double eps : eps_list) {
        ModelSpec m = model;
        m.epsilon = eps;

        // log |xi^eps - kappa| = log_weight + log |eta|.
        double log_weight;
        if (kind == XiSpec::Kind::EpsFamily)
            log_weight = -1.0 / (eps * eps);
        else if (kind == XiSpec::Kind::SqrtEpsFamily)
            log_weight = 0.5 * std::log(eps);
        else
            log_weight = -std::numeric_limits<double>::infinity();

        std::size_t exceed = 0;
        double sum_eta2 = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double eta =
                kind == XiSpec::Kind::Constant ? 0.0
                                               : normal(seed, p, kLevelXi, 0);
            sum_eta2 += eta * eta;
            const auto curve = closed_form_log_curve(m, sample_brownian(grid, seed, p));
            double max_log = -std::numeric_limits<double>::infinity();
            for (double v : curve) max_log = std::max(max_log, v);
            // sup_t |Z_xi - Z_kappa| = |xi - kappa| * max_t exp(L_t)
            const double lhs = log_weight +
                               std::log(std::max(std::fabs(eta), 0.0)) + max_log;
            if (std::isfinite(lhs) && lhs > std::log(delta)) ++exceed;
        }
        const double eta2_mean =
            n_paths ? sum_eta2 / static_cast<double>(n_paths) : 0.0;

        EeRow row;
        row.eps = eps;
        if (kind == XiSpec::Kind::EpsFamily) {
            row.seq_exact = -2.0 / eps;
            row.seq_empirical = -2.0 / eps + eps * std::log(eta2_mean);
        } else if (kind == XiSpec::Kind::SqrtEpsFamily) {
            row.seq_exact = eps * std::log(eps);
            row.seq_empirical = eps * std::log(eps) + eps * std::log(eta2_mean);
        } else {
            row.seq_exact = -std::numeric_limits<double>::infinity();
            row.seq_empirical = row.seq_exact;
        }
        row.exceed_count = exceed;
        row.zero_hits = exceed == 0;
        row.p_bound = 3.0 / static_cast<double>(n_paths);
        row.eps_log_p =
            row.zero_hits
                ? eps * std::log(row.p_bound)
                : eps * std::log(static_cast<double>(exceed) /
                                 static_cast<double>(n_paths));
        rep.rows.push_back(row);
    }

    // Empirical sequence strictly decreasing along decreasing eps.
    std::vector<EeRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const EeRow& a, const EeRow& b) { return a.eps > b.eps; });
    rep.sequence_strictly_decreasing = sorted.size() >= 2;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (!(sorted[i + 1].seq_empirical < sorted[i].seq_empirical))
            rep.sequence_strictly_decreasing = false;
    return rep;
}

}  // namespace aklab
