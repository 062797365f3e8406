#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "exclusion/coupling.hpp"
#include "exclusion/engine.hpp"
#include "exclusion/harness.hpp"
#include "exclusion/kernel_profile.hpp"
#include "exclusion/observables.hpp"

namespace py = pybind11;
using namespace exclusion;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exclusion-process simulator: closed-form density profiles, "
              "seed-reproducible dynamics, couplings and experiment harness";

    py::class_<JumpKernel>(m, "JumpKernel")
        .def_static(
            "from_entries",
            [](const std::vector<std::pair<std::int64_t, double>>& entries) {
                std::vector<JumpKernel::Entry> raw;
                raw.reserve(entries.size());
                for (const auto& [z, p] : entries) raw.push_back(JumpKernel::Entry{z, p});
                return JumpKernel::from_entries(raw);
            },
            py::arg("entries"), "Validate (displacement, probability) pairs into a kernel")
        .def_static("parse", &JumpKernel::parse, py::arg("literal"))
        .def_property_readonly("drift", &JumpKernel::drift)
        .def_property_readonly("first_moment", &JumpKernel::first_moment)
        .def_property_readonly("support",
                               [](const JumpKernel& kernel) {
                                   std::vector<std::pair<std::int64_t, double>> out;
                                   for (const auto& e : kernel.support()) {
                                       out.emplace_back(e.displacement, e.probability);
                                   }
                                   return out;
                               })
        .def("to_literal", &JumpKernel::to_literal)
        .def("__repr__", [](const JumpKernel& kernel) {
            return "JumpKernel('" + kernel.to_literal() + "')";
        });

    py::class_<StepProfileParams>(m, "StepProfileParams")
        .def(py::init([](double lambda_, double rho) {
                 StepProfileParams params{lambda_, rho};
                 params.validate();
                 return params;
             }),
             py::arg("lambda_"), py::arg("rho"))
        .def_readonly("lambda_", &StepProfileParams::lambda)
        .def_readonly("rho", &StepProfileParams::rho);

    m.def("characteristic_speeds", &characteristic_speeds, py::arg("kernel"), py::arg("params"));
    m.def("burgers_profile", &burgers_profile, py::arg("u"), py::arg("kernel"), py::arg("params"));
    m.def("integrated_profile", &integrated_profile, py::arg("u"), py::arg("v"), py::arg("kernel"),
          py::arg("params"));

    py::class_<Window>(m, "Window")
        .def(py::init([](std::int64_t lo, std::int64_t hi, std::int64_t buffer) {
                 Window window{lo, hi, buffer};
                 window.validate();
                 return window;
             }),
             py::arg("lo"), py::arg("hi"), py::arg("buffer") = 0)
        .def_readonly("lo", &Window::lo)
        .def_readonly("hi", &Window::hi)
        .def_readonly("buffer", &Window::buffer)
        .def("size", &Window::size);

    py::class_<Configuration>(m, "Configuration")
        .def(py::init<const Window&>(), py::arg("window"))
        .def_property_readonly("window", &Configuration::window)
        .def("occupied", &Configuration::occupied, py::arg("site"))
        .def("set", &Configuration::set, py::arg("site"), py::arg("value"))
        .def("particle_count", &Configuration::particle_count)
        .def("count_interval", &Configuration::count_interval, py::arg("a"), py::arg("b"))
        .def("occupancies",
             [](const Configuration& config) {
                 return config.slice(config.window().lo, config.window().hi);
             })
        .def("__eq__", [](const Configuration& a, const Configuration& b) { return a == b; });

    py::class_<EventStream>(m, "EventStream")
        .def(py::init<std::uint64_t, JumpKernel, Window>(), py::arg("seed"), py::arg("kernel"),
             py::arg("window"))
        .def_property_readonly("now", &EventStream::now)
        .def("next_event", [](EventStream& stream) {
            const Event event = stream.next_event();
            return py::make_tuple(event.time, event.site, event.displacement);
        });

    m.def("sample_initial_step", &sample_initial_step, py::arg("window"), py::arg("params"),
          py::arg("seed"));
    m.def(
        "evolve_to",
        [](const Configuration& config, EventStream& stream, double t) {
            return evolve_to(config, stream, t);
        },
        py::arg("config"), py::arg("stream"), py::arg("t"));
    m.def("empirical_density", &empirical_density, py::arg("config"), py::arg("u"), py::arg("v"),
          py::arg("t"));
    m.def("lln_error", &lln_error, py::arg("config"), py::arg("u"), py::arg("v"), py::arg("t"),
          py::arg("kernel"), py::arg("params"));

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def_property_readonly("kind",
                               [](const ExperimentSpec& spec) { return to_string(spec.kind); })
        .def_readonly("kernel_literal", &ExperimentSpec::kernel_literal)
        .def_readonly("lambda_", &ExperimentSpec::lambda)
        .def_readonly("rho", &ExperimentSpec::rho)
        .def_readonly("t_final", &ExperimentSpec::t_final)
        .def_readonly("intervals", &ExperimentSpec::intervals)
        .def_readonly("replicas", &ExperimentSpec::replicas)
        .def_readonly("seed", &ExperimentSpec::seed);

    py::class_<ResultRow>(m, "ResultRow")
        .def_readonly("seed", &ResultRow::seed)
        .def_readonly("kind", &ResultRow::kind)
        .def_readonly("u", &ResultRow::u)
        .def_readonly("v", &ResultRow::v)
        .def_readonly("t", &ResultRow::t)
        .def_readonly("empirical", &ResultRow::empirical)
        .def_readonly("predicted", &ResultRow::predicted)
        .def_readonly("error", &ResultRow::error);

    py::class_<ResultTable>(m, "ResultTable")
        .def_readonly("metadata", &ResultTable::metadata)
        .def_readonly("rows", &ResultTable::rows)
        .def("to_csv", [](const ResultTable& table) { return to_csv(table); });

    m.def("parse_spec", &parse_spec, py::arg("text"));
    m.def("run_experiment", &run_experiment, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_invariant_suite", [](std::uint64_t seed) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const InvariantCheck& check : run_invariant_suite(seed)) {
            out.emplace_back(check.name, check.passed, check.detail);
        }
        return out;
    }, py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
}
