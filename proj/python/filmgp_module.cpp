// Python bindings for the main filmgp operations. Arrays come and go as
// numpy; structured results come back as dicts.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "filmgp/config.hpp"
#include "filmgp/error.hpp"
#include "filmgp/gp.hpp"
#include "filmgp/io.hpp"
#include "filmgp/locator.hpp"
#include "filmgp/qbps.hpp"
#include "filmgp/ultrasound.hpp"
#include "filmgp/validation.hpp"

namespace py = pybind11;
using namespace filmgp;

namespace {

py::object to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

KernelSpec make_kernel(const std::string& variant, const py::dict& params) {
    KernelSpec k(kernel_variant_from_string(variant));
    for (const auto& [key, value] : params) {
        const auto name = key.cast<std::string>();
        bool found = false;
        for (Hyper h : {Hyper::signal_variance, Hyper::length_scale, Hyper::period,
                        Hyper::outer_scale, Hyper::radial_weight, Hyper::angular_weight,
                        Hyper::decay_scale}) {
            if (to_string(h) == name) {
                k = k.with(h, value.cast<double>());
                found = true;
            }
        }
        if (!found) fail(ErrorCode::invalid_argument, "unknown hyperparameter '" + name + "'");
    }
    return k;
}

std::vector<FilmObservation> observations_from(const Eigen::VectorXd& angle,
                                               const Eigen::VectorXd& thickness,
                                               std::optional<double> noise_std) {
    require(angle.size() == thickness.size(), ErrorCode::invalid_argument,
            "angle and thickness differ in length");
    std::vector<FilmObservation> out;
    out.reserve(static_cast<std::size_t>(angle.size()));
    for (Eigen::Index i = 0; i < angle.size(); ++i) {
        out.push_back({angle(i), thickness(i), Method::phase, noise_std.value_or(0.0)});
    }
    return out;
}

py::dict observations_to_py(const std::vector<FilmObservation>& obs) {
    const auto n = static_cast<Eigen::Index>(obs.size());
    Eigen::VectorXd a(n), h(n), s(n);
    py::list methods;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& o = obs[static_cast<std::size_t>(i)];
        a(i) = o.shaft_angle;
        h(i) = o.thickness;
        s(i) = o.noise_std;
        methods.append(std::string(to_string(o.method)));
    }
    py::dict d;
    d["angle_rad"] = a;
    d["thickness_m"] = h;
    d["noise_std_m"] = s;
    d["method"] = methods;
    return d;
}

py::dict location_to_py(const ShaftLocation& l) {
    py::dict d;
    d["eccentricity"] = l.eccentricity_ratio();
    d["theta_rad"] = l.theta();
    d["rho_m"] = l.rho();
    d["attitude_rad"] = l.attitude_angle();
    return d;
}

}  // namespace

PYBIND11_MODULE(filmgp, m) {
    m.doc() = "Gaussian-process shaft localisation from ultrasonic film measurements";

    static PyObject* error_type = PyErr_NewException("filmgp.FilmgpError", PyExc_RuntimeError, nullptr);
    m.attr("FilmgpError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type)(py::str(e.what()));
            err.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, err.ptr());
        }
    });

    // bearing
    py::class_<BearingGeometry>(m, "BearingGeometry")
        .def(py::init<double, double, double>(), py::arg("shaft_radius"), py::arg("bore_radius"),
             py::arg("length"))
        .def_static("standard", &BearingGeometry::standard)
        .def_static("from_clearance", &BearingGeometry::from_clearance, py::arg("shaft_radius"),
                    py::arg("clearance"), py::arg("length"))
        .def_property_readonly("shaft_radius", &BearingGeometry::shaft_radius)
        .def_property_readonly("clearance", &BearingGeometry::clearance)
        .def_property_readonly("length", &BearingGeometry::length);

    m.def(
        "equilibrium",
        [](const BearingGeometry& g, double rpm, double load_n, double viscosity, double load_angle) {
            return location_to_py(
                short_bearing_equilibrium(g, OperatingPoint::from_rpm(rpm, load_n, viscosity), load_angle));
        },
        py::arg("geometry"), py::arg("speed_rpm"), py::arg("load_n"), py::arg("viscosity") = 0.064,
        py::arg("load_angle") = 0.0, "Short-bearing equilibrium location of the shaft centre.");
    m.def(
        "film_thickness",
        [](const BearingGeometry& g, double eps, double theta, const Eigen::VectorXd& angles) {
            const ShaftLocation l(eps, theta, g.clearance());
            Eigen::VectorXd h(angles.size());
            for (Eigen::Index i = 0; i < angles.size(); ++i) h(i) = film_at_shaft_angle(g, l, angles(i));
            return h;
        },
        py::arg("geometry"), py::arg("eccentricity"), py::arg("theta"), py::arg("angles"));

    // ultrasound
    py::class_<AcousticSetup>(m, "AcousticSetup")
        .def_static("standard", &AcousticSetup::standard)
        .def_readonly("impedance_1", &AcousticSetup::impedance_1)
        .def_readonly("impedance_2", &AcousticSetup::impedance_2);
    m.def(
        "forward_reflection",
        [](const AcousticSetup& s, double h) {
            const auto r = forward_reflection(s, h);
            return py::make_tuple(r.magnitude, r.phase);
        },
        py::arg("setup"), py::arg("h"), "Reflection magnitude and phase for a film of thickness h.");
    m.def("invert_amplitude", [](const AcousticSetup& s, double r) { return invert_amplitude(s, r); },
          py::arg("setup"), py::arg("magnitude"));
    m.def("invert_phase", [](const AcousticSetup& s, double p) { return invert_phase(s, p); },
          py::arg("setup"), py::arg("phase"));
    m.def(
        "synthesize_scan",
        [](const BearingGeometry& g, double eps, double theta, const AcousticSetup& s, int n_angles,
           double noise_std, std::uint64_t seed) {
            ScanSpec spec;
            spec.n_angles = n_angles;
            spec.noise = NoiseSpec::uniform(noise_std);
            return observations_to_py(
                synthesize_scan(g, ShaftLocation(eps, theta, g.clearance()), s, spec, seed));
        },
        py::arg("geometry"), py::arg("eccentricity"), py::arg("theta"), py::arg("setup"),
        py::arg("n_angles") = 7200, py::arg("noise_std") = 2e-6, py::arg("seed") = 0);

    // kernels and GP
    m.def(
        "gram",
        [](const std::string& variant, const py::dict& params, const Eigen::MatrixXd& a,
           std::optional<Eigen::MatrixXd> b) {
            const KernelSpec k = make_kernel(variant, params);
            return b ? gram(k, a, *b) : gram(k, a);
        },
        py::arg("variant"), py::arg("params") = py::dict(), py::arg("a"), py::arg("b") = py::none());

    py::class_<GPModel>(m, "GPModel")
        .def(
            "predict",
            [](const GPModel& g, const Eigen::MatrixXd& x) {
                const Prediction p = g.predict(x);
                return py::make_tuple(p.mean, p.variance);
            },
            py::arg("x"), "Posterior mean and latent variance at x (original units).")
        .def("log_marginal_likelihood", &GPModel::log_marginal_likelihood)
        .def("test_log_likelihood", &GPModel::test_log_likelihood, py::arg("x"), py::arg("y"))
        .def_property_readonly("noise_variance", [](const GPModel& g) { return g.training().noise_variance; })
        .def("to_dict", [](const GPModel& g) { return to_py(model_to_json(g)); });
    m.def(
        "fit_gp",
        [](const std::string& variant, const py::dict& params, const Eigen::MatrixXd& x,
           const Eigen::VectorXd& y, double noise_variance) {
            return fit(make_kernel(variant, params), TrainingSet(x, y, noise_variance));
        },
        py::arg("variant"), py::arg("params"), py::arg("x"), py::arg("y"), py::arg("noise_variance"),
        "Exact GP with fixed hyperparameters.");

    // optimiser
    m.def(
        "qbps_minimize",
        [](const std::function<double(const std::vector<double>&)>& f,
           const std::vector<std::pair<double, double>>& bounds, int particles, int iterations,
           int restarts, std::uint64_t seed) {
            std::vector<Bounds> b;
            for (const auto& [lo, hi] : bounds) b.push_back({lo, hi});
            SwarmConfig c;
            c.particle_count = particles;
            c.max_iterations = iterations;
            c.restarts = restarts;
            c.seed = seed;
            const OptimizationResult r = optimize(
                [&](std::span<const double> x) { return f(std::vector<double>(x.begin(), x.end())); },
                SearchSpace(b), c);
            py::dict d;
            d["x"] = r.best;
            d["fun"] = r.best_value;
            d["trace"] = r.trace;
            d["evaluations"] = r.evaluations;
            return d;
        },
        py::arg("fun"), py::arg("bounds"), py::arg("particles") = 30, py::arg("iterations") = 300,
        py::arg("restarts") = 3, py::arg("seed") = 0, "Quantum-behaved particle swarm minimisation.");

    // film fit
    m.def(
        "fit_film",
        [](const Eigen::VectorXd& angle, const Eigen::VectorXd& thickness, const BearingGeometry& g,
           const std::string& kernel, double trim_half_width, std::uint64_t seed) {
            const auto obs = observations_from(angle, thickness, std::nullopt);
            const auto trimmed = trim_observations(obs, TrimWindow{trim_half_width, estimate_min_reference(obs)});
            SwarmConfig sw = film_swarm_defaults();
            sw.seed = seed;
            FilmFitOptions fo;
            fo.clearance = g.clearance();
            GPModel model = fit_film_gp(trimmed, KernelSpec(kernel_variant_from_string(kernel)), sw, fo);
            const ShaftLocation loc = extract_shaft_location(model, g);
            return py::make_tuple(std::move(model), location_to_py(loc));
        },
        py::arg("angle"), py::arg("thickness"), py::arg("geometry"), py::arg("kernel") = "periodic",
        py::arg("trim_half_width") = 0.1 * pi, py::arg("seed") = 0,
        "Trim around the film minimum, fit a GP and extract the shaft location.");

    // localisation
    py::class_<LocalisationDataset>(m, "Dataset")
        .def_static(
            "from_csv",
            [](const std::string& text, double clearance, double viscosity) {
                return parse_dataset_csv(text, clearance, viscosity);
            },
            py::arg("text"), py::arg("clearance"), py::arg("viscosity") = 0.064)
        .def("__len__", &LocalisationDataset::size)
        .def("to_csv", [](const LocalisationDataset& d) { return dataset_csv(d); })
        .def_property_readonly("inputs", &LocalisationDataset::inputs)
        .def_property_readonly("labels", &LocalisationDataset::labels)
        .def_readonly("clearance", &LocalisationDataset::clearance);
    m.def(
        "fit_location",
        [](const LocalisationDataset& d, const std::string& model, std::uint64_t seed) {
            SwarmConfig sw;
            sw.seed = seed;
            return fit_location_gp(d, location_model_from_string(model), sw);
        },
        py::arg("dataset"), py::arg("model") = "A", py::arg("seed") = 42);
    m.def(
        "locate",
        [](const GPModel& model, double y_new, double clearance, int n_rho, int n_theta,
           bool full_circle) {
            GridSpec g;
            g.n_rho = n_rho;
            g.n_theta = n_theta;
            g.full_circle = full_circle;
            g.clearance = clearance;
            const LocateResult r = locate(model, y_new, g);
            Eigen::MatrixXd map(n_rho, n_theta);
            for (int i = 0; i < n_rho; ++i)
                for (int j = 0; j < n_theta; ++j) map(i, j) = r.map.value(i, j);
            py::dict d = location_to_py(r.location);
            d["max_log_likelihood"] = r.max_log_likelihood;
            d["credible_area_fraction"] = r.credible_area_fraction;
            d["argmax"] = py::make_tuple(r.map.argmax_rho_index(), r.map.argmax_theta_index());
            d["map"] = map;
            return d;
        },
        py::arg("model"), py::arg("y_new"), py::arg("clearance"), py::arg("n_rho") = 60,
        py::arg("n_theta") = 90, py::arg("full_circle") = false,
        "Likelihood map over the polar grid and its argmax location.");
    m.def(
        "loocv",
        [](const LocalisationDataset& d, const std::string& model, std::uint64_t seed) {
            SwarmConfig sw;
            sw.seed = seed;
            GridSpec g;
            g.clearance = d.clearance;
            return to_py(cv_report_to_json(loocv(d, location_model_from_string(model), sw, g)));
        },
        py::arg("dataset"), py::arg("model") = "A", py::arg("seed") = 42);

    // config
    m.def("default_config", [] { return to_py(config_to_json(RunConfig{})); });
    m.def("check_config", [](const py::object& o) { return to_py(config_to_json(config_from_json(from_py(o)))); },
          py::arg("config"), "Validate a config dict; returns it with defaults filled in.");
}
