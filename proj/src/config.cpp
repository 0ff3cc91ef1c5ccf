#include "filmgp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "filmgp/error.hpp"

namespace filmgp {

using nlohmann::json;

std::vector<RunSpec> default_operating_grid() {
    std::vector<RunSpec> g;
    for (int kn = 2; kn <= 20; kn += 2) g.push_back({400.0, kn * 1000.0});
    for (double rpm : {100.0, 200.0, 300.0, 600.0, 800.0}) g.push_back({rpm, 10000.0});
    return g;
}

OperatingPoint RunConfig::operating_point(const RunSpec& r) const {
    return OperatingPoint::from_rpm(r.speed_rpm, r.load_n, viscosity);
}

BuildOptions RunConfig::build_options() const { return {trim_half_width, load_angle, film}; }

namespace {

// Reads keys out of one object, rejecting anything it was not asked about.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(ErrorCode::config, path_ + " must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(ErrorCode::config, path_ + "." + key + " has the wrong type");
        }
    }

    double scaled(const std::string& key, double current, double factor) {
        double v = current / factor;
        get(key, v);
        return v * factor;
    }

    const json& child(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string path(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) fail(ErrorCode::config, "unknown key " + path_ + "." + k);
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};


SwarmConfig read_swarm(const json& j, const std::string& path, SwarmConfig s) {
    Block b(j, path);
    b.get("particles", s.particle_count);
    b.get("iterations", s.max_iterations);
    b.get("restarts", s.restarts);
    b.get("beta_start", s.beta_start);
    b.get("beta_end", s.beta_end);
    b.get("tolerance", s.tolerance);
    b.get("stall_iterations", s.stall_iterations);
    b.finish();
    return s;
}

json swarm_json(const SwarmConfig& s) {
    return {{"particles", s.particle_count},   {"iterations", s.max_iterations},
            {"restarts", s.restarts},          {"beta_start", s.beta_start},
            {"beta_end", s.beta_end},          {"tolerance", s.tolerance},
            {"stall_iterations", s.stall_iterations}};
}

RunConfig parse(const json& j) {
    RunConfig c;
    Block root(j, "config");
    root.get("seed", c.seed);
    root.get("load_angle_rad", c.load_angle);

    if (root.has("geometry")) {
        Block b(root.child("geometry"), root.path("geometry"));
        const double r = b.scaled("shaft_radius_mm", c.geometry.shaft_radius(), 1e-3);
        const double cl = b.scaled("clearance_um", c.geometry.clearance(), 1e-6);
        const double len = b.scaled("length_mm", c.geometry.length(), 1e-3);
        b.finish();
        c.geometry = BearingGeometry::from_clearance(r, cl, len);
    }

    double density = c.acoustic.lubricant_density;
    double speed = c.acoustic.sound_speed;
    if (root.has("lubricant")) {
        Block b(root.child("lubricant"), root.path("lubricant"));
        b.get("viscosity_pa_s", c.viscosity);
        b.get("density_kg_m3", density);
        b.get("sound_speed_m_s", speed);
        b.finish();
    }
    double freq = c.acoustic.wave_angular_frequency / two_pi;
    double z1 = c.acoustic.impedance_1;
    double z2 = c.acoustic.impedance_2;
    if (root.has("acoustic")) {
        Block b(root.child("acoustic"), root.path("acoustic"));
        freq = b.scaled("frequency_mhz", freq, 1e6);
        b.get("impedance_1_rayl", z1);
        b.get("impedance_2_rayl", z2);
        b.get("max_reflection", c.scan.limits.max_reflection);
        b.get("min_phase_rad", c.scan.limits.min_phase);
        c.scan.limits.min_thickness = b.scaled("min_thickness_um", c.scan.limits.min_thickness, 1e-6);
        c.scan.band.min_frequency_hz = b.scaled("dip_min_frequency_mhz", c.scan.band.min_frequency_hz, 1e6);
        c.scan.band.max_frequency_hz = b.scaled("dip_max_frequency_mhz", c.scan.band.max_frequency_hz, 1e6);
        b.get("dip_max_order", c.scan.band.max_order);
        b.finish();
    }
    c.acoustic = AcousticSetup(density, speed, two_pi * freq, z1, z2);

    if (root.has("scan")) {
        Block b(root.child("scan"), root.path("scan"));
        b.get("n_angles", c.scan.n_angles);
        if (b.has("methods")) {
            std::vector<std::string> names;
            b.get("methods", names);
            c.scan.methods.clear();
            for (const auto& n : names) c.scan.methods.push_back(method_from_string(n));
        }
        c.scan.noise.amplitude_std = b.scaled("noise_amplitude_um", c.scan.noise.amplitude_std, 1e-6);
        c.scan.noise.phase_std = b.scaled("noise_phase_um", c.scan.noise.phase_std, 1e-6);
        c.scan.noise.dip_std = b.scaled("noise_dip_um", c.scan.noise.dip_std, 1e-6);
        b.finish();
    }

    if (root.has("runs")) {
        const json& runs = root.child("runs");
        if (!runs.is_array() || runs.empty()) fail(ErrorCode::config, "config.runs must be a non-empty array");
        c.runs.clear();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            Block b(runs[i], "config.runs[" + std::to_string(i) + "]");
            RunSpec r{0.0, 0.0};
            b.get("speed_rpm", r.speed_rpm);
            r.load_n = b.scaled("load_kn", 0.0, 1e3);
            b.finish();
            c.runs.push_back(r);
        }
    }

    if (root.has("film_fit")) {
        Block b(root.child("film_fit"), root.path("film_fit"));
        if (b.has("kernel")) {
            std::string k;
            b.get("kernel", k);
            c.film_kernel = kernel_variant_from_string(k);
        }
        c.trim_half_width = b.scaled("trim_half_width_deg", c.trim_half_width, pi / 180.0);
        b.get("max_optimization_points", c.film.max_optimization_points);
        if (b.has("pinned_noise_um")) {
            const json& v = b.child("pinned_noise_um");
            if (v.is_null()) {
                c.film.pinned_noise_std.reset();
            } else if (v.is_number()) {
                c.film.pinned_noise_std = v.get<double>() * 1e-6;
            } else {
                fail(ErrorCode::config, "config.film_fit.pinned_noise_um must be a number or null");
            }
        }
        b.finish();
    }
    if (root.has("film_optimizer")) {
        c.film_swarm = read_swarm(root.child("film_optimizer"), root.path("film_optimizer"), c.film_swarm);
    }
    if (root.has("optimizer")) {
        c.swarm = read_swarm(root.child("optimizer"), root.path("optimizer"), c.swarm);
    }
    if (root.has("grid")) {
        Block b(root.child("grid"), root.path("grid"));
        b.get("n_rho", c.grid.n_rho);
        b.get("n_theta", c.grid.n_theta);
        b.get("full_circle", c.grid.full_circle);
        b.get("include_noise", c.include_noise);
        b.finish();
    }
    if (root.has("model")) {
        std::string m;
        root.get("model", m);
        c.model = location_model_from_string(m);
    }
    root.finish();

    c.grid.clearance = c.geometry.clearance();
    c.swarm.seed = c.seed;
    c.film_swarm.seed = c.seed;
    // surface invalid combinations now rather than mid-run
    c.swarm.validate();
    c.film_swarm.validate();
    c.grid.validate();
    OperatingPoint(1.0, 1.0, c.viscosity);
    TrimWindow{c.trim_half_width, 0.0}.validate();
    require(c.scan.n_angles >= 3 && !c.scan.methods.empty(), ErrorCode::invalid_argument,
            "scan needs at least 3 angles and one method");
    for (const auto& r : c.runs) c.operating_point(r);
    return c;
}

}  // namespace

RunConfig config_from_json(const json& j) {
    try {
        return parse(j);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::config) throw;
        fail(ErrorCode::config, e.what());
    }
}

json config_to_json(const RunConfig& c) {
    json methods = json::array();
    for (Method m : c.scan.methods) methods.push_back(std::string(to_string(m)));
    json runs = json::array();
    for (const auto& r : c.runs) runs.push_back({{"speed_rpm", r.speed_rpm}, {"load_kn", r.load_n / 1e3}});
    return {
        {"seed", c.seed},
        {"load_angle_rad", c.load_angle},
        {"geometry",
         {{"shaft_radius_mm", c.geometry.shaft_radius() * 1e3},
          // bore minus shaft radius carries float noise; picometres are plenty
          {"clearance_um", std::round(c.geometry.clearance() * 1e12) * 1e-6},
          {"length_mm", c.geometry.length() * 1e3}}},
        {"lubricant",
         {{"viscosity_pa_s", c.viscosity},
          {"density_kg_m3", c.acoustic.lubricant_density},
          {"sound_speed_m_s", c.acoustic.sound_speed}}},
        {"acoustic",
         {{"frequency_mhz", c.acoustic.wave_angular_frequency / two_pi / 1e6},
          {"impedance_1_rayl", c.acoustic.impedance_1},
          {"impedance_2_rayl", c.acoustic.impedance_2},
          {"max_reflection", c.scan.limits.max_reflection},
          {"min_phase_rad", c.scan.limits.min_phase},
          {"min_thickness_um", c.scan.limits.min_thickness * 1e6},
          {"dip_min_frequency_mhz", c.scan.band.min_frequency_hz / 1e6},
          {"dip_max_frequency_mhz", c.scan.band.max_frequency_hz / 1e6},
          {"dip_max_order", c.scan.band.max_order}}},
        {"scan",
         {{"n_angles", c.scan.n_angles},
          {"methods", methods},
          {"noise_amplitude_um", c.scan.noise.amplitude_std * 1e6},
          {"noise_phase_um", c.scan.noise.phase_std * 1e6},
          {"noise_dip_um", c.scan.noise.dip_std * 1e6}}},
        {"runs", runs},
        {"film_fit",
         {{"kernel", std::string(to_string(c.film_kernel))},
          {"trim_half_width_deg", c.trim_half_width * 180.0 / pi},
          {"max_optimization_points", c.film.max_optimization_points},
          {"pinned_noise_um",
           c.film.pinned_noise_std ? json(*c.film.pinned_noise_std * 1e6) : json(nullptr)}}},
        {"film_optimizer", swarm_json(c.film_swarm)},
        {"optimizer", swarm_json(c.swarm)},
        {"grid",
         {{"n_rho", c.grid.n_rho},
          {"n_theta", c.grid.n_theta},
          {"full_circle", c.grid.full_circle},
          {"include_noise", c.include_noise}}},
        {"model", std::string(to_string(c.model))},
    };
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::config, "cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::config, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace filmgp
