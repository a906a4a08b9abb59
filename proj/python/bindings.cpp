#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msparisi/finite_n.hpp"
#include "msparisi/measures.hpp"
#include "msparisi/model.hpp"
#include "msparisi/optimizer.hpp"
#include "msparisi/parisi.hpp"

namespace py = pybind11;
using namespace msparisi;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiscale Parisi functional: evaluation, optimization and finite-N simulation";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_ValueError);
    py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_RuntimeError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    py::class_<FieldLaw>(m, "FieldLaw")
        .def(py::init<>())
        .def(py::init([](std::vector<std::pair<double, double>> atoms) { return FieldLaw{std::move(atoms)}; }),
             py::arg("atoms"))
        .def_readwrite("atoms", &FieldLaw::atoms)
        .def_static("point_mass", &FieldLaw::point_mass)
        .def("second_moment", &FieldLaw::second_moment)
        .def("is_zero", &FieldLaw::is_zero);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](std::vector<double> zeta, std::vector<double> gamma, std::optional<FieldLaw> field) {
                 ModelParams p{std::move(zeta), std::move(gamma), field.value_or(FieldLaw{})};
                 require_valid(p);
                 return p;
             }),
             py::arg("zeta"), py::arg("gamma"), py::arg("field") = py::none())
        .def_readonly("zeta", &ModelParams::zeta)
        .def_readonly("gamma", &ModelParams::gamma)
        .def_readonly("field", &ModelParams::field)
        .def_property_readonly("r", &ModelParams::r)
        .def("beta", &ModelParams::beta)
        .def("annealed_value", &ModelParams::annealed_value);

    m.def("validate_model", [](const ModelParams& p) { return validate_model(p).violations; });
    m.def("lowtemp_lhs", &lowtemp_lhs);
    m.def("annealed_region", &annealed_region);

    py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
        .def(py::init(&DiscreteMeasure::from_atoms), py::arg("atoms"))
        .def_static("point_mass", &DiscreteMeasure::point_mass)
        .def_property_readonly("atoms", &DiscreteMeasure::atoms)
        .def_property_readonly("cdf", &DiscreteMeasure::cdf)
        .def("weighted_atoms", &DiscreteMeasure::weighted_atoms)
        .def("cdf_at", &DiscreteMeasure::cdf_at);

    py::class_<ParisiPair>(m, "ParisiPair")
        .def_readonly("xi", &ParisiPair::xi)
        .def_readonly("x", &ParisiPair::x)
        .def_readonly("gamma_tilde", &ParisiPair::gamma_tilde)
        .def_property_readonly("k", &ParisiPair::k);

    m.def("make_pair", &make_pair, py::arg("xi"), py::arg("x"), py::arg("params"));
    m.def("validate_pair", &validate_pair);
    m.def("quantile", &quantile);
    m.def("wasserstein1", &wasserstein1);
    m.def("measure_to_pair", &measure_to_pair);
    m.def("pair_to_measure", &pair_to_measure);
    m.def("conditional_moment", &conditional_moment, py::arg("mu"), py::arg("params"), py::arg("ell"), py::arg("power"));
    m.def("gap_delta", &gap_delta);

    py::enum_<QuadKind>(m, "QuadKind").value("trapezoid", QuadKind::trapezoid).value("gauss_hermite", QuadKind::gauss_hermite);

    py::class_<NumericsConfig>(m, "NumericsConfig")
        .def(py::init<>())
        .def_readwrite("quad_rule", &NumericsConfig::quad_rule)
        .def_readwrite("quad_nodes", &NumericsConfig::quad_nodes)
        .def_readwrite("grid_points", &NumericsConfig::grid_points)
        .def_readwrite("grid_half_width", &NumericsConfig::grid_half_width);

    m.def("evaluate", &evaluate, py::arg("pair"), py::arg("params"), py::arg("numerics") = NumericsConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("evaluate_oracle", py::overload_cast<const ParisiPair&, const ModelParams&, int>(&evaluate_oracle),
          py::arg("pair"), py::arg("params"), py::arg("quad_nodes") = 40);
    m.def("grad_x", &grad_x, py::arg("pair"), py::arg("params"), py::arg("numerics") = NumericsConfig{});
    m.def("stationarity_residual", &stationarity_residual, py::arg("pair"), py::arg("params"),
          py::arg("numerics") = NumericsConfig{});
    m.def("grad_gamma", &grad_gamma, py::arg("pair"), py::arg("params"), py::arg("numerics") = NumericsConfig{},
          py::arg("tol") = 1e-6);
    m.def("rs_profile", &rs_profile, py::arg("x_r"), py::arg("params"));

    py::class_<OptimizeOptions>(m, "OptimizeOptions")
        .def(py::init<>())
        .def_readwrite("tol", &OptimizeOptions::tol)
        .def_readwrite("damping", &OptimizeOptions::damping)
        .def_readwrite("max_iter", &OptimizeOptions::max_iter)
        .def_readwrite("multistart", &OptimizeOptions::multistart);

    py::class_<OptimReport>(m, "OptimReport")
        .def_readonly("pair", &OptimReport::pair)
        .def_readonly("value", &OptimReport::value)
        .def_readonly("residual", &OptimReport::residual)
        .def_readonly("iterations", &OptimReport::iterations)
        .def_readonly("converged", &OptimReport::converged)
        .def_readonly("refinement_history", &OptimReport::refinement_history)
        .def_readonly("start", &OptimReport::start);

    m.def(
        "optimize_x",
        [](const std::vector<double>& xi, const ModelParams& p, const NumericsConfig& n, py::object init,
           const OptimizeOptions& o) {
            InitSpec spec = InitKind::linear;
            if (py::isinstance<py::str>(init)) {
                const auto s = init.cast<std::string>();
                if (s == "zero")
                    spec = InitKind::zero;
                else if (s != "linear")
                    throw DomainError("init must be 'zero', 'linear' or a sequence");
            } else if (!init.is_none()) {
                spec = init.cast<std::vector<double>>();
            }
            py::gil_scoped_release release;
            return optimize_x(xi, p, n, spec, o);
        },
        py::arg("xi"), py::arg("params"), py::arg("numerics") = NumericsConfig{}, py::arg("init") = "linear",
        py::arg("options") = OptimizeOptions{});
    m.def("anchored_grid", &anchored_grid);
    m.def("refine_k", &refine_k, py::arg("params"), py::arg("numerics"), py::arg("schedule"),
          py::arg("options") = OptimizeOptions{}, py::call_guard<py::gil_scoped_release>());

    py::class_<PhaseLabel>(m, "PhaseLabel")
        .def_property_readonly("kind", [](const PhaseLabel& l) { return to_string(l.kind); })
        .def_readonly("distinct_support_points", &PhaseLabel::distinct_support_points)
        .def_readonly("gaps", &PhaseLabel::gaps)
        .def_readonly("conditional_moments", &PhaseLabel::conditional_moments);
    m.def("classify_phase", &classify_phase, py::arg("report"), py::arg("params"), py::arg("eps_support") = 1e-4);

    py::class_<PlateauCheck>(m, "PlateauCheck")
        .def_readonly("delta", &PlateauCheck::delta)
        .def_readonly("rhs", &PlateauCheck::rhs)
        .def_readonly("holds", &PlateauCheck::holds)
        .def_readonly("applicable", &PlateauCheck::applicable);
    m.def("plateau_bound_check", py::overload_cast<const OptimReport&, const ModelParams&, int>(&plateau_bound_check));
    m.def("annealed_curvature", &annealed_curvature);

    py::class_<SimOptions>(m, "SimOptions")
        .def(py::init<>())
        .def_readwrite("N", &SimOptions::N)
        .def_readwrite("n_outer", &SimOptions::n_outer)
        .def_readwrite("n_inner", &SimOptions::n_inner)
        .def_readwrite("seed", &SimOptions::seed)
        .def_readwrite("allow_deep", &SimOptions::allow_deep);
    py::class_<SimEstimate>(m, "SimEstimate")
        .def_readonly("mean", &SimEstimate::mean)
        .def_readonly("stderr", &SimEstimate::std_error)
        .def_readonly("n_outer", &SimEstimate::n_outer)
        .def_readonly("n_inner", &SimEstimate::n_inner)
        .def_readonly("seed", &SimEstimate::seed);
    m.def("nested_pressure", &nested_pressure, py::call_guard<py::gil_scoped_release>());
    m.def("overlap_moment_sim", &overlap_moment_sim, py::call_guard<py::gil_scoped_release>());
    m.def("single_spin_pressure", &single_spin_pressure);
}
