#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace filmgp {

enum class ErrorCode {
    invalid_argument,
    invalid_measurement,
    out_of_range,
    contact,
    no_measurement,
    inconsistent_dips,
    ill_conditioned,
    insufficient_data,
    no_feasible_point,
    implausible_film,
    config,
    data_format,
    io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const char* what) {
    if (!condition) {
        throw Error(code, what);
    }
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) {
        throw Error(code, what);
    }
}

}  // namespace filmgp
