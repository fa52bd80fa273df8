#pragma once

// Explicit (piecewise-affine) controllers: storage, point location and the
// portable file format.

#include "exmpc/lti.hpp"
#include "exmpc/numkit.hpp"
#include "exmpc/polytope.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace exmpc {

/// One polyhedral piece of the partition with its first-move affine law.
struct CriticalRegion {
    Polyhedron region;
    Matrix F;  ///< n_u × θ_dim
    Vector g;  ///< n_u
    IndexSet active_set;

    Vector law(const Vector& theta) const { return F * theta + g; }
    bool operator==(const CriticalRegion&) const = default;
};

struct ControllerMeta {
    Vector Qy;  ///< penalty diagonals
    Vector QI;
    Vector R;
    int N = 0;
    std::string model_fingerprint;
    Vector u_min;
    Vector u_max;

    bool operator==(const ControllerMeta&) const = default;
};

struct Evaluation {
    Vector u;
    int region_index = -1;
};

class ExplicitController {
public:
    ExplicitController() = default;
    ExplicitController(std::vector<CriticalRegion> regions, int theta_dim, int n_u, ControllerMeta meta);

    /// First region containing θ (tolerance 1e-8) wins. Throws
    /// ParameterNotCovered, or ConstraintViolation when the law leaves the
    /// input box by more than 1e-6.
    Evaluation evaluate(const Vector& theta) const;

    /// Index of the first region containing θ, or -1.
    int locate(const Vector& theta) const;

    const std::vector<CriticalRegion>& regions() const { return regions_; }
    int theta_dim() const { return theta_dim_; }
    int n_u() const { return n_u_; }
    const ControllerMeta& meta() const { return meta_; }

    bool operator==(const ExplicitController&) const = default;

private:
    std::vector<CriticalRegion> regions_;
    int theta_dim_ = 0;
    int n_u_ = 0;
    ControllerMeta meta_;
};

inline constexpr const char* kFormatVersion = "exmpc-1";

void save(const ExplicitController& ctrl, const std::filesystem::path& path);

/// Throws FormatVersionMismatch, ChecksumMismatch (also for unparsable or
/// truncated files) and IoError.
ExplicitController load(const std::filesystem::path& path);

std::string to_document(const ExplicitController& ctrl);
ExplicitController from_document(const std::string& text);

/// SHA-256 hex digest of (At, Bt, Ct, Et, Ts).
std::string model_fingerprint(const AugmentedModel& model);

std::string sha256_hex(const std::string& bytes);

}  // namespace exmpc
