#include "p2h/feasible_region.hpp"
#include "p2h/reporting.hpp"
#include "p2h/scenario.hpp"
#include "p2h/scheduler.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace p2h;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Harmonic-aware electrolyzer plant scheduling";

    py::class_<OperatingPoint>(m, "OperatingPoint")
        .def_readonly("current", &OperatingPoint::current)
        .def_readonly("alpha", &OperatingPoint::alpha)
        .def_readonly("gamma", &OperatingPoint::gamma)
        .def_readonly("u_stack", &OperatingPoint::u_stack)
        .def_readonly("i_fund", &OperatingPoint::i_fund)
        .def_property_readonly("displacement", &OperatingPoint::displacement);

    py::class_<ElectrolyzerSpec>(m, "ElectrolyzerSpec")
        .def(py::init<>())
        .def_readwrite("eta_faraday", &ElectrolyzerSpec::eta_faraday)
        .def_readwrite("aux_power", &ElectrolyzerSpec::aux_power)
        .def_readwrite("i_min", &ElectrolyzerSpec::i_min)
        .def_readwrite("i_max", &ElectrolyzerSpec::i_max);

    m.def("stack_voltage", [](const ElectrolyzerSpec& s, double i) { return stack_voltage(s.curve, i); });
    m.def("stack_power", [](const ElectrolyzerSpec& s, double i) { return stack_power(s.curve, i); });
    m.def("operating_point", [](const ElectrolyzerSpec& s, double i) {
        return solve_operating_point(s.rectifier, s.curve, i);
    });
    m.def("harmonic", [](const ElectrolyzerSpec& s, double i, int h) { return harmonic_at_current(s, i, h).value; },
          py::arg("spec"), py::arg("current"), py::arg("order"));
    m.def("harmonic_fft", [](const ElectrolyzerSpec& s, double i, int h) {
        return harmonic_phasor_fft(synthesize_ac_waveform(solve_operating_point(s.rectifier, s.curve, i)), h).value;
    });
    m.def("plant_efficiency", [](const ElectrolyzerSpec& s, const std::vector<double>& currents) {
        return plant_efficiency(s, currents);
    });

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("n_elz", &Scenario::n_elz)
        .def_readonly("horizon", &Scenario::horizon)
        .def_readonly("renewable", &Scenario::renewable)
        .def_readonly("elz", &Scenario::elz)
        .def("plant_limit", &Scenario::plant_limit);

    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); });
    m.def("region_json", [](const Scenario& s) { return thresholds_to_json(derive_region(s)); });
    m.def("compare_json", [](const Scenario& s) { return comparison_json(compare_strategies(s)); });

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
}
