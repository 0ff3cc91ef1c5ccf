#include "filmgp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "filmgp/error.hpp"

namespace filmgp {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

[[noreturn]] void bad_row(const std::string& source, std::size_t line, const std::string& why) {
    fail(ErrorCode::data_format, source + ":" + std::to_string(line) + ": " + why);
}

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto r = std::from_chars(field.data(), end, v);
    if (field.empty() || r.ec != std::errc{} || r.ptr != end || !std::isfinite(v)) {
        bad_row(source, line, "'" + field + "' is not a finite number");
    }
    return v;
}

// Calls fn(fields, line_no) for each non-blank data row after checking the header.
template <typename Fn>
void for_each_row(const std::string& text, const std::string& header, const std::string& source,
                  Fn fn) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    bool seen_header = false;
    const auto want = split(header);
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split(line);
        if (!seen_header) {
            if (fields != want) bad_row(source, n, "expected header '" + header + "'");
            seen_header = true;
            continue;
        }
        if (fields.size() != want.size()) {
            bad_row(source, n,
                    "expected " + std::to_string(want.size()) + " fields, got " +
                        std::to_string(fields.size()));
        }
        fn(fields, n);
    }
    if (!seen_header) fail(ErrorCode::insufficient_data, source + ": file has no rows");
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    f << contents;
    if (!f) fail(ErrorCode::io, "failed writing '" + path + "'");
}

std::vector<FilmObservation> parse_observations_csv(const std::string& text,
                                                    const std::string& source) {
    std::vector<FilmObservation> out;
    for_each_row(text, "angle_rad,thickness_m,method,noise_std_m", source,
                 [&](const std::vector<std::string>& f, std::size_t line) {
                     FilmObservation o{};
                     o.shaft_angle = parse_number(f[0], source, line);
                     o.thickness = parse_number(f[1], source, line);
                     try {
                         o.method = method_from_string(f[2]);
                     } catch (const Error& e) {
                         bad_row(source, line, e.what());
                     }
                     o.noise_std = parse_number(f[3], source, line);
                     if (o.thickness <= 0.0) bad_row(source, line, "thickness must be positive");
                     if (o.noise_std < 0.0) bad_row(source, line, "noise std must be non-negative");
                     out.push_back(o);
                 });
    return out;
}

std::string observations_csv(const std::vector<FilmObservation>& obs) {
    std::string out = "angle_rad,thickness_m,method,noise_std_m\n";
    for (const auto& o : obs) {
        out += format_number(o.shaft_angle) + "," + format_number(o.thickness) + "," +
               std::string(to_string(o.method)) + "," + format_number(o.noise_std) + "\n";
    }
    return out;
}

std::string dataset_csv(const LocalisationDataset& data) {
    std::string out = "rho_m,theta_rad,y_ratio,speed_rpm,load_N\n";
    for (const auto& e : data.entries) {
        out += format_number(e.location.rho()) + "," + format_number(e.location.theta()) + "," +
               format_number(e.label) + "," + format_number(e.op.rpm()) + "," +
               format_number(e.op.load) + "\n";
    }
    return out;
}

LocalisationDataset parse_dataset_csv(const std::string& text, double clearance,
                                      double viscosity, double load_angle,
                                      const std::string& source) {
    LocalisationDataset data{{}, clearance, load_angle};
    for_each_row(text, "rho_m,theta_rad,y_ratio,speed_rpm,load_N", source,
                 [&](const std::vector<std::string>& f, std::size_t line) {
                     const double rho = parse_number(f[0], source, line);
                     const double theta = parse_number(f[1], source, line);
                     const double y = parse_number(f[2], source, line);
                     const double rpm = parse_number(f[3], source, line);
                     const double load = parse_number(f[4], source, line);
                     if (rho < 0.0 || rho >= clearance) {
                         bad_row(source, line, "rho must lie in [0, clearance)");
                     }
                     if (y <= 0.0 || rpm <= 0.0 || load <= 0.0) {
                         bad_row(source, line, "y_ratio, speed and load must be positive");
                     }
                     data.entries.push_back({ShaftLocation::from_polar(rho, theta, clearance, load_angle), y,
                                             OperatingPoint::from_rpm(rpm, load, viscosity)});
                 });
    require(!data.entries.empty(), ErrorCode::insufficient_data, source + ": dataset has no rows");
    return data;
}

std::string likelihood_map_csv(const LikelihoodMap& map) {
    std::string out = "rho_m,theta_rad,loglik\n";
    for (int i = 0; i < map.grid.n_rho; ++i) {
        for (int j = 0; j < map.grid.n_theta; ++j) {
            out += format_number(map.grid.rho(i)) + "," + format_number(map.grid.theta(j)) + "," +
                   format_number(map.value(i, j)) + "\n";
        }
    }
    return out;
}

std::string likelihood_map_pgm(const LikelihoodMap& map) {
    const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    std::string out = "P5\n" + std::to_string(map.grid.n_theta) + " " +
                      std::to_string(map.grid.n_rho) + "\n255\n";
    // top row is the largest rho
    for (int i = map.grid.n_rho - 1; i >= 0; --i) {
        for (int j = 0; j < map.grid.n_theta; ++j) {
            const double t = span > 0.0 ? (map.value(i, j) - lo) / span : 1.0;
            out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
        }
    }
    return out;
}

}  // namespace filmgp
