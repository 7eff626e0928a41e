#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardyqkd {

enum class ErrorCode {
    parameter_out_of_range,
    linear_dependence,
    epsilon_too_large,
    insufficient_data,
    zero_posterior,
    division_by_zero,
    unsupported_level,
    inexpressible_functional,
    infeasible,
    unbounded,
    solver_failure,
    decomposition_infeasible,
    invalid_argument,
    io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::parameter_out_of_range: return "parameter-out-of-range";
        case ErrorCode::linear_dependence: return "linear-dependence";
        case ErrorCode::epsilon_too_large: return "epsilon-too-large";
        case ErrorCode::insufficient_data: return "insufficient-data";
        case ErrorCode::zero_posterior: return "zero-posterior";
        case ErrorCode::division_by_zero: return "division-by-zero";
        case ErrorCode::unsupported_level: return "unsupported-level";
        case ErrorCode::inexpressible_functional: return "inexpressible-functional";
        case ErrorCode::infeasible: return "infeasible";
        case ErrorCode::unbounded: return "unbounded";
        case ErrorCode::solver_failure: return "solver-failure";
        case ErrorCode::decomposition_infeasible: return "decomposition-infeasible";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Errors caused by bad input rather than numerical trouble.
    bool is_config_error() const noexcept {
        switch (code_) {
            case ErrorCode::parameter_out_of_range:
            case ErrorCode::epsilon_too_large:
            case ErrorCode::unsupported_level:
            case ErrorCode::invalid_argument:
            case ErrorCode::io_error:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorCode code_;
};

}  // namespace hardyqkd
