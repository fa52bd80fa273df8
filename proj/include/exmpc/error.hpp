#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace exmpc {

enum class ErrorKind {
    dimension_mismatch,
    invalid_argument,
    not_positive_definite,
    infeasible,
    max_iterations,
    empty_input,
    degenerate_active_set,
    exploration_overflow,
    parameter_not_covered,
    constraint_violation,
    format_version_mismatch,
    checksum_mismatch,
    fingerprint_mismatch,
    reference_out_of_range,
    step_out_of_range,
    zero_step,
    input_out_of_range,
    division_by_zero,
    config_error,
    io_error,
};

std::string_view to_string(ErrorKind kind);

/// True for errors caused by bad input or configuration rather than numerics.
bool is_validation_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace exmpc
