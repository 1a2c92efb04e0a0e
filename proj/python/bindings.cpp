#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wpdyn/errors.hpp"
#include "wpdyn/invariants.hpp"
#include "wpdyn/kernels.hpp"
#include "wpdyn/oracle.hpp"
#include "wpdyn/packet.hpp"
#include "wpdyn/scenario.hpp"
#include "wpdyn/wigner.hpp"

namespace py = pybind11;
using namespace wpdyn;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<double> grid_to_array(const PhaseSpaceGrid& g) {
    py::array_t<double> out({static_cast<py::ssize_t>(g.p.count), static_cast<py::ssize_t>(g.x.count)});
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

UniformAxis axis_from(const py::array_t<double>& x) {
    if (x.ndim() != 1 || x.size() < 2) throw ConfigError("axis must be a 1-D array with at least two points");
    const auto* d = x.data();
    return {d[0], d[1] - d[0], static_cast<std::size_t>(x.size())};
}

ComplexGrid grid_from(const py::array_t<double>& x, const py::array_t<cplx>& psi) {
    if (psi.ndim() != 1 || psi.size() != x.size()) throw ConfigError("psi must match the x axis");
    return ComplexGrid(axis_from(x), std::vector<cplx>(psi.data(), psi.data() + psi.size()));
}

py::dict trajectory_dict(const Trajectory& tr) {
    const std::size_t n = tr.size();
    std::vector<double> t(n), alpha(n), alpha_dot(n), phi(n), eta(n), eta_dot(n), det(n), il(n);
    std::vector<cplx> lambda(n), lambda_dot(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = tr[i];
        t[i] = s.lambda.t;
        lambda[i] = s.lambda.lambda;
        lambda_dot[i] = s.lambda.lambda_dot;
        alpha[i] = s.lambda.alpha;
        alpha_dot[i] = s.lambda.alpha_dot;
        phi[i] = s.lambda.phi;
        eta[i] = s.classical.eta;
        eta_dot[i] = s.classical.eta_dot;
        det[i] = matrix_from_state(s.lambda, tr.packet.alpha0()).det();
        il[i] = ermakov_invariant(s.classical.eta, s.classical.eta_dot, s.lambda.alpha, s.lambda.alpha_dot);
    }
    py::dict d;
    d["t"] = to_array(t);
    d["lambda"] = to_array(lambda);
    d["lambda_dot"] = to_array(lambda_dot);
    d["alpha"] = to_array(alpha);
    d["alpha_dot"] = to_array(alpha_dot);
    d["phi"] = to_array(phi);
    d["eta"] = to_array(eta);
    d["eta_dot"] = to_array(eta_dot);
    d["det_M"] = to_array(det);
    d["I_L"] = to_array(il);
    return d;
}

SystemSpec system_from(const std::string& law_json, double hbar, double mass) {
    auto j = nlohmann::json::parse(law_json);
    nlohmann::json cfg{{"system", j}, {"constants", {{"hbar", hbar}, {"mass", mass}}}, {"time", {{"t_end", 1.0}}}};
    return parse_config(cfg).system;
}

}  // namespace

PYBIND11_MODULE(_wpdyn, m) {
    m.doc() = "Gaussian wave-packet dynamics under quadratic Hamiltonians";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
    py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_RuntimeError);
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<SystemSpec>(m, "System")
        .def(py::init(&system_from), py::arg("law_json"), py::arg("hbar") = 1.0, py::arg("mass") = 1.0,
             "Build from a JSON frequency law, e.g. '{\"type\": \"constant\", \"omega\": 1}'.")
        .def("omega", [](const SystemSpec& s, double t) { return omega_at(s, t); })
        .def_property_readonly("hbar", [](const SystemSpec& s) { return s.constants().hbar(); })
        .def_property_readonly("mass", [](const SystemSpec& s) { return s.constants().mass(); });

    py::class_<InitialPacket>(m, "Packet")
        .def(py::init<double, double, double>(), py::arg("x0") = 0.0, py::arg("p0") = 1.0, py::arg("alpha0") = 1.0)
        .def_property_readonly("x0", &InitialPacket::x0)
        .def_property_readonly("p0", &InitialPacket::p0)
        .def_property_readonly("alpha0", &InitialPacket::alpha0);

    m.def(
        "solve",
        [](const SystemSpec& s, const InitialPacket& p, double t_end, double dt, int sample_every) {
            return trajectory_dict(solve_lambda(s, p, sample_times(t_end, dt, sample_every), IntegratorOptions{dt}));
        },
        py::arg("system"), py::arg("packet"), py::arg("t_end"), py::arg("dt") = 1e-3, py::arg("sample_every") = 1,
        "Integrate the width and centre equations; returns a dict of arrays.");

    m.def(
        "wavefunction",
        [](const SystemSpec& s, const InitialPacket& p, double t, const py::array_t<double>& x, double dt) {
            const auto tr = solve_lambda(s, p, t > 0.0 ? sample_times(t, dt, 1) : std::vector<double>{0.0},
                                         IntegratorOptions{dt});
            const auto psi = evaluate_wavefunction(propagate_analytic(tr, tr.size() - 1), axis_from(x));
            return to_array(psi.values);
        },
        py::arg("system"), py::arg("packet"), py::arg("t"), py::arg("x"), py::arg("dt") = 1e-3,
        "Analytic packet psi(x, t) on a uniform axis.");

    m.def(
        "moments",
        [](const SystemSpec& s, const InitialPacket& p, double t, double dt) {
            const auto tr = solve_lambda(s, p, t > 0.0 ? sample_times(t, dt, 1) : std::vector<double>{0.0},
                                         IntegratorOptions{dt});
            const auto mo = moments_from_lambda(tr[tr.size() - 1].lambda, s.constants());
            return py::make_tuple(mo.var_x, mo.var_p, mo.corr);
        },
        py::arg("system"), py::arg("packet"), py::arg("t"), py::arg("dt") = 1e-3,
        "(<x~^2>, <p~^2>, <x~p~ + p~x~>) at time t.");

    m.def(
        "kernel",
        [](double a, double b, double c, double d, double x, double xp, double hbar) {
            return kernel_ti({a, b, c, d}, x, xp, Constants(hbar, 1.0));
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("x"), py::arg("x_prime"), py::arg("hbar") = 1.0,
        "Canonical-transform kernel K(x, x').");

    m.def(
        "kernel_residuals",
        [](double a, double b, double c, double d) {
            const auto r = satisfies_kernel_odes({a, b, c, d}, Constants());
            return py::make_tuple(r.first, r.second);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

    m.def(
        "wigner",
        [](const py::array_t<double>& x, const py::array_t<cplx>& psi, const py::array_t<double>& xw,
           const py::array_t<double>& pw, double hbar) {
            return grid_to_array(wigner_numeric(grid_from(x, psi), axis_from(xw), axis_from(pw), Constants(hbar, 1.0)));
        },
        py::arg("x"), py::arg("psi"), py::arg("x_out"), py::arg("p_out"), py::arg("hbar") = 1.0,
        "Numerical Wigner transform, rows = p, columns = x.");

    m.def(
        "split_step",
        [](const SystemSpec& s, const py::array_t<double>& x, const py::array_t<cplx>& psi, double dt, long steps) {
            return to_array(split_step({grid_from(x, psi), 0.0}, s, dt, steps).grid.values);
        },
        py::arg("system"), py::arg("x"), py::arg("psi"), py::arg("dt"), py::arg("steps"),
        "Split-operator propagation from t = 0; the grid size must be a power of two.");

    m.def("builtin_scenarios", &builtin_scenario_names);
    m.def(
        "run_scenario_json",
        [](const std::string& config_or_name, const std::string& output_dir) {
            ScenarioConfig cfg;
            const auto names = builtin_scenario_names();
            if (std::find(names.begin(), names.end(), config_or_name) != names.end())
                cfg = builtin_scenario(config_or_name);
            else
                cfg = parse_config_text(config_or_name);
            const auto r = run_scenario(cfg);
            if (!output_dir.empty()) emit_outputs(r, output_dir);
            return r.report.dump();
        },
        py::arg("config"), py::arg("output_dir") = "",
        "Run a built-in scenario or a JSON config text; returns the report as JSON text.");
}
