// filmgp: synthetic scans, film fits, likelihood maps and cross-validation
// from the command line.
//
//   filmgp synth     --config run.json --out-dir data/
//   filmgp fit-film  --config run.json --manifest data/truth.json --out-dir fits/
//   filmgp locate    --config run.json --dataset fits/dataset.csv --speed-rpm 400 --load-kn 6 --out-dir map/
//   filmgp validate  --config run.json --dataset fits/dataset.csv --out cv_report.json
//
// Failures print one line `filmgp: error[<code>]: <message>` on stderr.
// Exit status: 0 ok, 2 config, 3 data, 4 numerical.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "filmgp/config.hpp"
#include "filmgp/error.hpp"
#include "filmgp/io.hpp"
#include "filmgp/locator.hpp"
#include "filmgp/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace filmgp;

namespace {

constexpr int schema_version = 1;

int exit_code(ErrorCode c) {
    switch (c) {
        case ErrorCode::config:
        case ErrorCode::invalid_argument:
            return 2;
        case ErrorCode::ill_conditioned:
        case ErrorCode::no_feasible_point:
        case ErrorCode::implausible_film:
            return 4;
        default:
            return 3;
    }
}

void write_json(const fs::path& p, const json& j) { write_text_file(p.string(), j.dump(2) + "\n"); }

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) fail(ErrorCode::io, "cannot create directory '" + p.string() + "': " + ec.message());
}

RunConfig config_or_default(const std::string& path) {
    return path.empty() ? config_from_json(json::object()) : load_config(path);
}

json location_json(const ShaftLocation& l) {
    return {{"eccentricity", l.eccentricity_ratio()},
            {"rho_m", l.rho()},
            {"theta_rad", l.theta()},
            {"attitude_rad", l.attitude_angle()}};
}

json hyper_json(const GPModel& m) {
    json j = kernel_to_json(m.kernel());
    j["noise_variance"] = m.training().noise_variance;
    return j;
}

std::string run_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%02zu.csv", i);
    return buf;
}

// synth ---------------------------------------------------------------------

void cmd_synth(const RunConfig& cfg, const fs::path& out) {
    ensure_dir(out);
    json runs = json::array();
    const std::uint64_t base = derive_seed(cfg.seed, 0x5eed);
    for (std::size_t i = 0; i < cfg.runs.size(); ++i) {
        const OperatingPoint op = cfg.operating_point(cfg.runs[i]);
        const ShaftLocation truth = short_bearing_equilibrium(cfg.geometry, op, cfg.load_angle);
        const auto obs = synthesize_scan(cfg.geometry, truth, cfg.acoustic, cfg.scan,
                                         derive_seed(base, i));
        const std::string name = run_file_name(i);
        write_text_file((out / name).string(), observations_csv(obs));
        json r = location_json(truth);
        r["file"] = name;
        r["speed_rpm"] = cfg.runs[i].speed_rpm;
        r["load_N"] = cfg.runs[i].load_n;
        r["h_min_m"] = cfg.geometry.clearance() * (1.0 - truth.eccentricity_ratio());
        r["observations"] = obs.size();
        runs.push_back(std::move(r));
    }
    write_json(out / "truth.json", {{"schema_version", schema_version},
                                    {"seed", cfg.seed},
                                    {"clearance_m", cfg.geometry.clearance()},
                                    {"load_angle_rad", cfg.load_angle},
                                    {"runs", std::move(runs)}});
}

// fit-film ------------------------------------------------------------------

std::vector<FilmObservation> load_observations(const fs::path& p) {
    return parse_observations_csv(read_text_file(p.string()), p.string());
}

void write_prediction(const GPModel& model, const fs::path& p) {
    const auto& x = model.training().inputs;
    const double centre = 0.5 * (x.col(0).minCoeff() + x.col(0).maxCoeff());
    constexpr int n = 720;
    Eigen::MatrixXd grid(n, 1);
    for (int k = 0; k < n; ++k) {
        const double a = two_pi * k / n;
        grid(k, 0) = centre + signed_angle_diff(a, centre);
    }
    const Prediction pr = model.predict(grid);
    std::string csv = "angle_rad,mean_m,std_m\n";
    for (int k = 0; k < n; ++k) {
        csv += format_number(two_pi * k / n) + "," + format_number(pr.mean(k)) + "," +
               format_number(std::sqrt(pr.variance(k))) + "\n";
    }
    write_text_file(p.string(), csv);
}

void cmd_fit_single(const RunConfig& cfg, const fs::path& obs_path, const fs::path& out,
                    const std::string& trace_path) {
    ensure_dir(out);
    const auto obs = load_observations(obs_path);
    require(obs.size() >= 3, ErrorCode::insufficient_data,
            obs_path.string() + ": need at least 3 observations");
    const TrimWindow window{cfg.trim_half_width, estimate_min_reference(obs)};
    const auto trimmed = trim_observations(obs, window);
    std::vector<double> trace;
    FilmFitOptions film = cfg.film;
    film.clearance = cfg.geometry.clearance();
    const GPModel model =
        fit_film_gp(trimmed, KernelSpec(cfg.film_kernel), cfg.film_swarm, film, &trace);
    const ShaftLocation loc = extract_shaft_location(model, cfg.geometry, cfg.load_angle);

    json mj = model_to_json(model);
    write_json(out / "model.json", mj);
    write_prediction(model, out / "prediction.csv");
    json summary = location_json(loc);
    summary["schema_version"] = schema_version;
    summary["h_min_m"] = cfg.geometry.clearance() * (1.0 - loc.eccentricity_ratio());
    summary["trim_reference_rad"] = window.reference_angle;
    summary["trimmed_observations"] = trimmed.size();
    summary["log_marginal_likelihood"] = model.log_marginal_likelihood();
    write_json(out / "location.json", summary);
    if (!trace_path.empty()) write_text_file(trace_path, trace_csv(trace));
}

void cmd_fit_manifest(const RunConfig& cfg, const fs::path& manifest, const fs::path& out) {
    ensure_dir(out);
    json m;
    try {
        m = json::parse(read_text_file(manifest.string()));
    } catch (const json::exception& e) {
        fail(ErrorCode::data_format, manifest.string() + ": " + e.what());
    }
    if (!m.contains("runs") || !m["runs"].is_array()) {
        fail(ErrorCode::data_format, manifest.string() + ": missing 'runs' array");
    }
    std::vector<RunInput> runs;
    std::vector<std::string> names;
    for (const auto& r : m["runs"]) {
        try {
            const fs::path file = manifest.parent_path() / r.at("file").get<std::string>();
            runs.push_back({OperatingPoint::from_rpm(r.at("speed_rpm").get<double>(),
                                                     r.at("load_N").get<double>(), cfg.viscosity),
                            load_observations(file)});
            names.push_back(file.filename().string());
        } catch (const json::exception& e) {
            fail(ErrorCode::data_format, manifest.string() + ": " + e.what());
        }
    }
    const BuildResult built = build_dataset(runs, cfg.geometry, KernelSpec(cfg.film_kernel),
                                            cfg.film_swarm, cfg.build_options());
    write_text_file((out / "dataset.csv").string(), dataset_csv(built.dataset));
    json failures = json::array();
    for (const auto& f : built.failures) {
        failures.push_back({{"file", names[f.index]}, {"error", f.message}});
    }
    write_json(out / "build_report.json", {{"schema_version", schema_version},
                                           {"runs", runs.size()},
                                           {"entries", built.dataset.size()},
                                           {"failures", std::move(failures)}});
}

// locate / validate -----------------------------------------------------------

LocalisationDataset load_dataset(const RunConfig& cfg, const fs::path& p) {
    return parse_dataset_csv(read_text_file(p.string()), cfg.geometry.clearance(), cfg.viscosity,
                             cfg.load_angle, p.string());
}

void cmd_locate(const RunConfig& cfg, const fs::path& dataset_path, double rpm, double load_n,
                const fs::path& out, bool pgm, const std::string& trace_path) {
    require(rpm > 0.0 && load_n > 0.0, ErrorCode::invalid_argument,
            "speed and load must be positive");
    ensure_dir(out);
    const LocalisationDataset data = load_dataset(cfg, dataset_path);
    std::vector<double> trace;
    const GPModel model = fit_location_gp(data, cfg.model, cfg.swarm, &trace);
    const double y = data.label_for(OperatingPoint::from_rpm(rpm, load_n, cfg.viscosity));
    const LocateResult r = locate(model, y, cfg.grid, cfg.include_noise, cfg.load_angle);

    write_text_file((out / "map.csv").string(), likelihood_map_csv(r.map));
    if (pgm) write_text_file((out / "map.pgm").string(), likelihood_map_pgm(r.map));
    if (!trace_path.empty()) write_text_file(trace_path, trace_csv(trace));

    json argmax = location_json(r.location);
    argmax["i_rho"] = r.map.argmax_rho_index();
    argmax["j_theta"] = r.map.argmax_theta_index();
    write_json(out / "summary.json",
               {{"schema_version", schema_version},
                {"model", std::string(to_string(cfg.model))},
                {"query", {{"speed_rpm", rpm}, {"load_N", load_n}, {"y_ratio", y}}},
                {"argmax", std::move(argmax)},
                {"max_loglik", r.max_log_likelihood},
                {"credible_area_fraction", r.credible_area_fraction},
                {"grid",
                 {{"n_rho", cfg.grid.n_rho},
                  {"n_theta", cfg.grid.n_theta},
                  {"full_circle", cfg.grid.full_circle},
                  {"rho_max_m", cfg.grid.clearance}}},
                {"noise_in_variance", cfg.include_noise},
                {"hyperparameters", hyper_json(model)}});
}

void cmd_validate(const RunConfig& cfg, const fs::path& dataset_path, const fs::path& out,
                  const std::string& csv_path) {
    const LocalisationDataset data = load_dataset(cfg, dataset_path);
    json models = json::array();
    std::string csv;
    for (LocationModel m : {LocationModel::A, LocationModel::B}) {
        const CVReport r = loocv(data, m, cfg.swarm, cfg.grid, cfg.include_noise);
        models.push_back(cv_report_to_json(r));
        const std::string rows = cv_report_csv(r);
        csv += csv.empty() ? rows : rows.substr(rows.find('\n') + 1);
    }
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    write_json(out, {{"schema_version", schema_version},
                     {"seed", cfg.seed},
                     {"entries", data.size()},
                     {"models", std::move(models)}});
    if (!csv_path.empty()) write_text_file(csv_path, csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shaft-centre localisation from ultrasonic film measurements"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON run configuration (defaults if omitted)");

    auto* synth = app.add_subcommand("synth", "Generate synthetic observation CSVs and truth.json");
    std::string synth_out;
    synth->add_option("-o,--out-dir", synth_out, "Output directory")->required();

    auto* fit = app.add_subcommand("fit-film", "Fit film-thickness GPs");
    std::string obs_path, manifest_path, fit_out, fit_trace;
    auto* obs_opt = fit->add_option("--obs", obs_path, "Single observation CSV");
    auto* man_opt = fit->add_option("--manifest", manifest_path,
                                    "truth.json listing runs; writes dataset.csv");
    obs_opt->excludes(man_opt);
    fit->add_option("-o,--out-dir", fit_out, "Output directory")->required();
    fit->add_option("--trace", fit_trace, "Write optimiser trace CSV (single fit only)");

    auto* loc = app.add_subcommand("locate", "Likelihood map for a new operating condition");
    std::string dataset_path, loc_out, loc_trace, model_name;
    double rpm = 0.0, load_kn = 0.0, load_n = 0.0, load_angle_deg = 0.0;
    bool pgm = false;
    loc->add_option("--dataset", dataset_path, "Dataset CSV")->required();
    loc->add_option("--speed-rpm", rpm, "Shaft speed")->required();
    auto* kn = loc->add_option("--load-kn", load_kn, "Load in kN");
    auto* nn = loc->add_option("--load-n", load_n, "Load in N");
    kn->excludes(nn);
    loc->add_option("--model", model_name, "A or B (overrides config)");
    auto* la = loc->add_option("--load-angle-deg", load_angle_deg, "Load line angle from TDC");
    loc->add_flag("--pgm", pgm, "Also write map.pgm");
    loc->add_option("--trace", loc_trace, "Write optimiser trace CSV");
    loc->add_option("-o,--out-dir", loc_out, "Output directory")->required();

    auto* val = app.add_subcommand("validate", "Leave-one-out cross-validation of models A and B");
    std::string val_dataset, val_out, val_csv;
    val->add_option("--dataset", val_dataset, "Dataset CSV")->required();
    val->add_option("-o,--out", val_out, "Report JSON")->required();
    val->add_option("--csv", val_csv, "Per-fold CSV");

    auto* dump = app.add_subcommand("default-config", "Print the default configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "filmgp: error[usage]: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg = config_or_default(config_path);
        if (*dump) {
            std::cout << config_to_json(cfg).dump(2) << "\n";
        } else if (*synth) {
            cmd_synth(cfg, synth_out);
        } else if (*fit) {
            if (!manifest_path.empty()) {
                cmd_fit_manifest(cfg, manifest_path, fit_out);
            } else if (!obs_path.empty()) {
                cmd_fit_single(cfg, obs_path, fit_out, fit_trace);
            } else {
                fail(ErrorCode::config, "fit-film needs --obs or --manifest");
            }
        } else if (*loc) {
            if (!model_name.empty()) cfg.model = location_model_from_string(model_name);
            if (*la) cfg.load_angle = load_angle_deg * pi / 180.0;
            require(*kn || *nn, ErrorCode::config, "locate needs --load-kn or --load-n");
            cmd_locate(cfg, dataset_path, rpm, *kn ? load_kn * 1e3 : load_n, loc_out, pgm,
                       loc_trace);
        } else if (*val) {
            cmd_validate(cfg, val_dataset, val_out, val_csv);
        }
    } catch (const Error& e) {
        std::cerr << "filmgp: error[" << to_string(e.code()) << "]: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "filmgp: error[internal]: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
