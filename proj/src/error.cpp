#include "filmgp/error.hpp"

namespace filmgp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::invalid_measurement: return "invalid-measurement";
        case ErrorCode::out_of_range: return "out-of-range";
        case ErrorCode::contact: return "contact";
        case ErrorCode::no_measurement: return "no-measurement";
        case ErrorCode::inconsistent_dips: return "inconsistent-dips";
        case ErrorCode::ill_conditioned: return "ill-conditioned-kernel";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::no_feasible_point: return "no-feasible-point";
        case ErrorCode::implausible_film: return "implausible-film";
        case ErrorCode::config: return "config";
        case ErrorCode::data_format: return "data-format";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

}  // namespace filmgp
