#include <filesystem>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pvsde/config.hpp"
#include "pvsde/ensemble.hpp"
#include "pvsde/error.hpp"
#include "pvsde/estimation.hpp"
#include "pvsde/jacobi.hpp"
#include "pvsde/metrics.hpp"
#include "pvsde/pipeline.hpp"
#include "pvsde/solar.hpp"

namespace py = pybind11;
using namespace pvsde;

PYBIND11_MODULE(_pvsde, m) {
    m.doc() = "Jacobi-diffusion PV forecasting core";

    static py::exception<Error> error_type(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            // args = (kind, message)
            PyErr_SetObject(error_type.ptr(),
                            py::make_tuple(std::string(to_string(e.kind())), std::string(e.what())).ptr());
        }
    });

    py::class_<SdeParams>(m, "SdeParams")
        .def(py::init([](double a, double b, double beta, double c, double d) { return SdeParams{a, b, beta, c, d}; }),
             py::arg("a"), py::arg("b"), py::arg("beta"), py::arg("c"), py::arg("d"))
        .def_readwrite("a", &SdeParams::a)
        .def_readwrite("b", &SdeParams::b)
        .def_readwrite("beta", &SdeParams::beta)
        .def_readwrite("c", &SdeParams::c)
        .def_readwrite("d", &SdeParams::d)
        .def("validate", &SdeParams::validate)
        .def("__eq__", [](const SdeParams& x, const SdeParams& y) { return x == y; })
        .def("__repr__", [](const SdeParams& t) {
            return "SdeParams(a=" + std::to_string(t.a) + ", b=" + std::to_string(t.b) + ", beta=" +
                   std::to_string(t.beta) + ", c=" + std::to_string(t.c) + ", d=" + std::to_string(t.d) + ")";
        });

    m.def("stationary_shape", [](const SdeParams& t) {
        const BetaShape s = stationary_shape(t);
        return py::make_tuple(s.alpha, s.beta);
    });
    m.def("stationary_density", &stationary_density, py::arg("theta"), py::arg("p"));
    m.def(
        "simulate_hour",
        [](const SdeParams& t, double p0, std::size_t n_steps, std::uint64_t seed, double step_seconds, int substeps) {
            Rng rng(seed);
            SimulationOptions opt;
            opt.step_seconds = step_seconds;
            opt.substeps = substeps;
            return simulate_hour(t, p0, n_steps, rng, opt);
        },
        py::arg("theta"), py::arg("p0"), py::arg("n_steps"), py::arg("seed") = 0, py::arg("step_seconds") = 30.0,
        py::arg("substeps") = 10);
    m.def(
        "make_fan",
        [](const std::vector<SdeParams>& hours, std::size_t n_paths, std::uint64_t seed) {
            DayParams day;
            day.hours = hours;
            return make_fan(day, std::nullopt, n_paths, seed).paths();
        },
        py::arg("hours"), py::arg("n_paths"), py::arg("seed"), "Fan paths as an (n_paths, n_steps) array.");

    m.def(
        "identify_hour",
        [](const std::vector<double>& samples, double step_seconds) {
            const FitReport r = identify_hour(HourSamples{samples, step_seconds});
            return py::make_tuple(r.params, flag_names(r.flags));
        },
        py::arg("samples"), py::arg("step_seconds") = 30.0, "Returns (params, flag names).");

    m.def("trimmed_mean", &trimmed_mean, py::arg("values"), py::arg("trim_fraction") = 0.2);

    m.def("picp", py::overload_cast<const std::vector<double>&, const std::vector<double>&, const std::vector<double>&,
                                    const StepMask&>(&picp),
          py::arg("lo"), py::arg("hi"), py::arg("actual"), py::arg("mask") = StepMask{});
    m.def("kl_divergence", &kl_divergence, py::arg("forecast"), py::arg("actual"), py::arg("n_bins") = 50,
          py::arg("epsilon") = 1e-9);
    m.def("rho_risk",
          py::overload_cast<const std::vector<double>&, const std::vector<double>&, double, const StepMask&>(&rho_risk),
          py::arg("quantile_path"), py::arg("actual"), py::arg("rho"), py::arg("mask") = StepMask{});
    m.def("nd", &nd, py::arg("point"), py::arg("actual"), py::arg("mask") = StepMask{});
    m.def("nrmse", &nrmse, py::arg("point"), py::arg("actual"), py::arg("mask") = StepMask{});

    m.def(
        "solar_elevation",
        [](double latitude, double longitude, std::int64_t timestamp) {
            SiteConfig site;
            site.latitude = latitude;
            site.longitude = longitude;
            return solar_elevation(site, timestamp);
        },
        py::arg("latitude"), py::arg("longitude"), py::arg("timestamp"));

    m.def(
        "run_command",
        [](const std::string& name, const std::string& config_text, const std::filesystem::path& out_dir,
           const std::filesystem::path& base_dir) {
            const RunConfig config = parse_config(config_text, base_dir);
            CommandResult r;
            {
                py::gil_scoped_release release;
                r = run_command(name, config, out_dir);
            }
            nlohmann::json j{{"warnings", r.warnings}, {"summary", r.summary}};
            j["outputs"] = nlohmann::json::array();
            for (const auto& p : r.outputs) j["outputs"].push_back(p.string());
            return j.dump();
        },
        py::arg("name"), py::arg("config_text"), py::arg("out_dir"), py::arg("base_dir") = std::filesystem::path{},
        "Runs a pipeline command; returns its report as a JSON string.");
}
