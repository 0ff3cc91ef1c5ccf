#pragma once

// File formats: observation, dataset and likelihood-map CSVs, binary PGM
// rendering. Numbers are written with 17 significant digits so files
// round-trip exactly.

#include <string>
#include <vector>

#include "filmgp/locator.hpp"
#include "filmgp/ultrasound.hpp"

namespace filmgp {

std::string read_text_file(const std::string& path);
/// Throws Error(io) when the file cannot be written.
void write_text_file(const std::string& path, const std::string& contents);

/// Header `angle_rad,thickness_m,method,noise_std_m`. Malformed rows raise
/// Error(data_format) naming `source` and the 1-based line number.
std::vector<FilmObservation> parse_observations_csv(const std::string& text,
                                                    const std::string& source = "<input>");
std::string observations_csv(const std::vector<FilmObservation>& obs);

/// Header `rho_m,theta_rad,y_ratio,speed_rpm,load_N`.
std::string dataset_csv(const LocalisationDataset& data);
LocalisationDataset parse_dataset_csv(const std::string& text, double clearance,
                                      double viscosity, double load_angle = 0.0,
                                      const std::string& source = "<input>");

/// Header `rho_m,theta_rad,loglik`, rho outer.
std::string likelihood_map_csv(const LikelihoodMap& map);

/// Binary P5 image, n_theta wide and n_rho high, grey level linear in
/// log-likelihood between the map minimum (black) and maximum (white).
std::string likelihood_map_pgm(const LikelihoodMap& map);

/// %.17g formatting.
std::string format_number(double v);

}  // namespace filmgp
