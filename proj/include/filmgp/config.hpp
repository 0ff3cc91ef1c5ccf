#pragma once

// Run configuration for the command-line tool. JSON with nested blocks;
// every physical quantity carries its unit in the key name and unknown keys
// are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "filmgp/locator.hpp"
#include "filmgp/ultrasound.hpp"

namespace filmgp {

struct RunSpec {
    double speed_rpm;
    double load_n;
};

/// 400 rpm at 2..20 kN in 2 kN steps, then 100/200/300/600/800 rpm at 10 kN.
std::vector<RunSpec> default_operating_grid();

struct RunConfig {
    std::uint64_t seed = 42;
    BearingGeometry geometry = BearingGeometry::standard();
    double viscosity = 0.064;  // Pa s
    double load_angle = 0.0;   // rad
    AcousticSetup acoustic = AcousticSetup::standard();
    ScanSpec scan{7200, {Method::amplitude, Method::phase, Method::resonant_dip},
                  NoiseSpec::uniform(2e-6)};
    std::vector<RunSpec> runs = default_operating_grid();
    KernelVariant film_kernel = KernelVariant::periodic;
    double trim_half_width = 0.1 * pi;
    FilmFitOptions film{};
    SwarmConfig film_swarm = film_swarm_defaults();
    SwarmConfig swarm{};
    GridSpec grid{};
    bool include_noise = true;
    LocationModel model = LocationModel::A;

    OperatingPoint operating_point(const RunSpec& r) const;
    BuildOptions build_options() const;
};

/// Missing keys keep their defaults. Throws Error(config) on unknown keys,
/// wrong types or values the library types reject.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
/// Throws Error(config) for unreadable or unparsable files.
RunConfig load_config(const std::string& path);

}  // namespace filmgp
