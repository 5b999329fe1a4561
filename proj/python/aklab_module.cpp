#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "aklab/ak_integral.hpp"
#include "aklab/config.hpp"
#include "aklab/ldp.hpp"
#include "aklab/lsde.hpp"
#include "aklab/nearmart.hpp"
#include "aklab/version.hpp"

namespace py = pybind11;
using namespace aklab;

namespace {

DetFn detfn_from_dict(const py::object& obj) {
    return DetFn::from_json(nlohmann::json::parse(
        py::cast<std::string>(py::module_::import("json").attr("dumps")(obj))));
}

ModelSpec model_from_dict(const py::object& obj) {
    return ModelSpec::from_json(nlohmann::json::parse(
        py::cast<std::string>(py::module_::import("json").attr("dumps")(obj))));
}

IntegrandSpec integrand_from_dict(const py::object& obj) {
    return IntegrandSpec::from_json(nlohmann::json::parse(
        py::cast<std::string>(py::module_::import("json").attr("dumps")(obj))));
}

}  // namespace

PYBIND11_MODULE(_aklab, m) {
    m.doc() = "anticipating stochastic calculus laboratory";
    m.attr("__version__") = AKLAB_VERSION;

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, double>(), py::arg("n"), py::arg("t_end") = 1.0)
        .def_property_readonly("n", &Grid::intervals)
        .def_property_readonly("t_end", &Grid::t_end)
        .def_property_readonly("mesh", &Grid::mesh)
        .def("nodes", &Grid::nodes)
        .def("refined", &Grid::refined)
        .def("index_of", &Grid::index_of);
    m.def("make_grid", &make_grid, py::arg("n"), py::arg("t_end") = 1.0);

    py::class_<BrownianPath>(m, "BrownianPath")
        .def_readonly("values", &BrownianPath::values)
        .def_readonly("seed", &BrownianPath::seed)
        .def_readonly("path_index", &BrownianPath::path_index)
        .def_property_readonly("grid",
                               [](const BrownianPath& p) { return p.grid; })
        .def("terminal", &BrownianPath::terminal);

    m.def("sample_brownian", &sample_brownian, py::arg("grid"), py::arg("seed"),
          py::arg("path_index"));
    m.def(
        "wiener_integral",
        [](const py::object& g, const BrownianPath& p) {
            return wiener_integral(detfn_from_dict(g), p);
        },
        py::arg("g"), py::arg("path"));
    m.def(
        "shift_path",
        [](const BrownianPath& p, const py::object& sigma, double u, double v) {
            return shift_path(p, detfn_from_dict(sigma), u, v);
        },
        py::arg("path"), py::arg("sigma"), py::arg("u"), py::arg("v"));
    m.def(
        "stochastic_exponential",
        [](const BrownianPath& p, const py::object& sigma, double u, double v) {
            return stochastic_exponential(p, detfn_from_dict(sigma), u, v);
        },
        py::arg("path"), py::arg("sigma"), py::arg("u"), py::arg("v"));

    m.def(
        "ak_integral",
        [](const py::object& spec, const BrownianPath& p, double t_end) {
            return ak_integral(integrand_from_dict(spec), p, t_end);
        },
        py::arg("integrand"), py::arg("path"), py::arg("t_end") = 1.0);

    py::class_<RefinementReport>(m, "RefinementReport")
        .def_readonly("levels", &RefinementReport::levels)
        .def_readonly("values", &RefinementReport::values)
        .def_readonly("median_abs_diff", &RefinementReport::median_abs_diff)
        .def_readonly("observed_order", &RefinementReport::observed_order)
        .def_readonly("median_abs_error", &RefinementReport::median_abs_error)
        .def_readonly("errors_decreasing", &RefinementReport::errors_decreasing);
    m.def(
        "refinement_study",
        [](const py::object& spec, std::uint64_t seed, std::vector<int> levels,
           std::size_t n_paths, double t_int) {
            return refinement_study(integrand_from_dict(spec), seed, levels,
                                    n_paths, t_int);
        },
        py::arg("integrand"), py::arg("seed"), py::arg("levels"),
        py::arg("n_paths") = 100, py::arg("t_int") = 1.0);

    m.def(
        "closed_form_Z",
        [](const py::object& model, const BrownianPath& p, double t) {
            return closed_form_Z(model_from_dict(model), p, t);
        },
        py::arg("model"), py::arg("path"), py::arg("t"));
    m.def(
        "closed_form_curve",
        [](const py::object& model, const BrownianPath& p) {
            const ModelSpec ms = model_from_dict(model);
            auto logs = closed_form_log_curve(ms, p);
            const double xi = ms.xi_realized(p.seed, p.path_index);
            std::vector<double> out(logs.size());
            for (std::size_t k = 0; k < logs.size(); ++k)
                out[k] = xi * std::exp(logs[k]);
            return out;
        },
        py::arg("model"), py::arg("path"));
    m.def("skorokhod_base_step",
          [](double xi_shifted, const BrownianPath& p, const py::object& sigma,
             double u, double v) {
              return skorokhod_base_step(xi_shifted, p, detfn_from_dict(sigma), u,
                                         v);
          });

    py::class_<BraidRecord>(m, "BraidRecord")
        .def_readonly("node", &BraidRecord::node)
        .def_readonly("t", &BraidRecord::t)
        .def_readonly("diffusion_endpoint", &BraidRecord::diffusion_endpoint)
        .def_readonly("drift_endpoint", &BraidRecord::drift_endpoint)
        .def_readonly("product_formula", &BraidRecord::product_formula)
        .def_readonly("rel_identity_dev", &BraidRecord::rel_identity_dev);
    py::class_<BraidTrace>(m, "BraidTrace")
        .def_readonly("records", &BraidTrace::records)
        .def_readonly("final_value", &BraidTrace::final_value)
        .def_readonly("max_rel_identity_dev", &BraidTrace::max_rel_identity_dev)
        .def_readonly("subintervals", &BraidTrace::subintervals);
    m.def(
        "braid_solve",
        [](const py::object& model, const BrownianPath& p, double t, int stride) {
            return braid_solve(model_from_dict(model), p, t, stride);
        },
        py::arg("model"), py::arg("path"), py::arg("t"), py::arg("stride") = 1);

    py::class_<SquaredSdeReport>(m, "SquaredSdeReport")
        .def_readonly("levels", &SquaredSdeReport::levels)
        .def_readonly("mean_residual", &SquaredSdeReport::mean_residual)
        .def_readonly("se", &SquaredSdeReport::se)
        .def_readonly("abs_mean", &SquaredSdeReport::abs_mean)
        .def_readonly("observed_order", &SquaredSdeReport::observed_order);
    m.def(
        "squared_sde_residual",
        [](const py::object& model, std::vector<int> levels, std::size_t n_paths,
           std::uint64_t seed) {
            return squared_sde_residual(model_from_dict(model), levels, n_paths,
                                        seed);
        },
        py::arg("model"), py::arg("levels"), py::arg("n_paths"), py::arg("seed"));

    py::class_<CMPath>(m, "CMPath")
        .def(py::init<Grid, std::vector<double>>())
        .def_readonly("values", &CMPath::values)
        .def_property_readonly("grid", [](const CMPath& h) { return h.grid; });
    m.def("schilder_rate", &schilder_rate);
    m.def(
        "theta_map",
        [](const CMPath& x, const py::object& model, double t, double eps) {
            return theta_map(x, model_from_dict(model), t, eps);
        },
        py::arg("x"), py::arg("model"), py::arg("t"), py::arg("eps") = 0.0);

    py::class_<RateResult>(m, "RateResult")
        .def_readonly("J", &RateResult::J)
        .def_readonly("argmin", &RateResult::argmin)
        .def_readonly("constraint_violation", &RateResult::constraint_violation)
        .def_readonly("iterations", &RateResult::iterations)
        .def_readonly("converged", &RateResult::converged);
    m.def(
        "rate_endpoint",
        [](const py::object& model, double y, int grid_n, double theta_eps) {
            RateProblem problem;
            problem.model = model_from_dict(model);
            problem.grid = Grid(grid_n, 1.0);
            problem.theta_eps = theta_eps;
            problem.constraint.kind = RateConstraint::Kind::Endpoint;
            problem.constraint.y = y;
            return rate_endpoint(problem);
        },
        py::arg("model"), py::arg("y"), py::arg("grid_n") = 512,
        py::arg("theta_eps") = 0.0);

    py::class_<McRow>(m, "McRow")
        .def_readonly("eps", &McRow::eps)
        .def_readonly("p_hat", &McRow::p_hat)
        .def_readonly("wilson_lo", &McRow::wilson_lo)
        .def_readonly("wilson_hi", &McRow::wilson_hi)
        .def_readonly("eps_log_p", &McRow::eps_log_p)
        .def_readonly("zero_hits", &McRow::zero_hits);
    py::class_<McTable>(m, "McTable").def_readonly("rows", &McTable::rows);
    m.def(
        "mc_tail",
        [](const py::object& model, double y, std::vector<double> eps_list,
           std::size_t n_paths, int grid_n, std::uint64_t seed) {
            McEvent ev;
            ev.kind = McEvent::Kind::EndpointGeq;
            ev.y = y;
            return mc_tail(model_from_dict(model), ev, eps_list, n_paths,
                           Grid(grid_n, 1.0), seed);
        },
        py::arg("model"), py::arg("y"), py::arg("eps_list"), py::arg("n_paths"),
        py::arg("grid_n") = 16, py::arg("seed") = 42);

    m.def(
        "run_config",
        [](const std::string& config_json, const std::string& out_dir) {
            RunOptions opts;
            if (!out_dir.empty()) opts.out_override = out_dir;
            return run_experiment(nlohmann::json::parse(config_json), opts);
        },
        py::arg("config_json"), py::arg("out_dir") = std::string());
}
