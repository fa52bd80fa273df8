#include "exmpc/error.hpp"

namespace exmpc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::dimension_mismatch: return "DimensionMismatch";
        case ErrorKind::invalid_argument: return "InvalidArgument";
        case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
        case ErrorKind::infeasible: return "Infeasible";
        case ErrorKind::max_iterations: return "MaxIterations";
        case ErrorKind::empty_input: return "EmptyInput";
        case ErrorKind::degenerate_active_set: return "DegenerateActiveSet";
        case ErrorKind::exploration_overflow: return "ExplorationOverflow";
        case ErrorKind::parameter_not_covered: return "ParameterNotCovered";
        case ErrorKind::constraint_violation: return "ConstraintViolation";
        case ErrorKind::format_version_mismatch: return "FormatVersionMismatch";
        case ErrorKind::checksum_mismatch: return "ChecksumMismatch";
        case ErrorKind::fingerprint_mismatch: return "FingerprintMismatch";
        case ErrorKind::reference_out_of_range: return "ReferenceOutOfRange";
        case ErrorKind::step_out_of_range: return "StepOutOfRange";
        case ErrorKind::zero_step: return "ZeroStep";
        case ErrorKind::input_out_of_range: return "InputOutOfRange";
        case ErrorKind::division_by_zero: return "DivisionByZero";
        case ErrorKind::config_error: return "ConfigError";
        case ErrorKind::io_error: return "IoError";
    }
    return "Unknown";
}

bool is_validation_error(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::not_positive_definite:
        case ErrorKind::infeasible:
        case ErrorKind::max_iterations:
        case ErrorKind::degenerate_active_set:
        case ErrorKind::exploration_overflow:
        case ErrorKind::parameter_not_covered:
        case ErrorKind::constraint_violation:
            return false;
        default:
            return true;
    }
}

}  // namespace exmpc
