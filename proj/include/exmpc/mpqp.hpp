#pragma once

// Tracking MPC with a built-in integrator written as a multi-parametric QP
// in θ = (x₀, x_I,0, y_ref), and its explicit solution.

#include "exmpc/controller.hpp"
#include "exmpc/lti.hpp"
#include "exmpc/numkit.hpp"
#include "exmpc/polytope.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace exmpc {

/// Which prediction steps carry the output and integrator penalties.
/// shifted: k = 1..N. literal: k = 0..N-1 (the k = 0 terms are constant in U,
/// so u_{N-1} is only penalized by R).
enum class StageRange { shifted, literal };

struct Box {
    Vector lower;
    Vector upper;
};

struct MpcSpec {
    AugmentedModel model;
    int N = 20;
    Vector Qy;  ///< diagonal, >= 0
    Vector QI;  ///< diagonal, >= 0
    Vector R;   ///< diagonal, > 0
    Vector u_min, u_max;
    Vector y_min, y_max;  ///< ±inf disables the output constraint
    StageRange stages = StageRange::shifted;

    /// Exploration bounds. The state box defaults to the output box mapped
    /// through a square diagonal C; the reference box to the output box.
    double integrator_bound = 250.0;
    std::optional<Box> state_box;
    std::optional<Box> reference_box;

    void validate() const;
    int theta_dim() const { return model.nx + 2 * model.ny; }
};

/// min ½UᵀHU + θᵀF U   s.t.  G U <= w + S θ,   θ ∈ theta_box
struct ParametricQp {
    Matrix H;
    Matrix F;  ///< θ_dim × n_U
    Matrix G;
    Vector w;
    Matrix S;
    int theta_dim = 0;
    int n_u = 0;  ///< inputs per step; the explicit law stores the first n_u entries
    Polyhedron theta_box;
    ControllerMeta meta;

    QpProblem at(const Vector& theta) const;
    int decision_dim() const { return static_cast<int>(H.rows()); }
};

ParametricQp condense(const MpcSpec& spec);

/// Optimizer and multipliers as affine functions of θ for one active set.
struct AffineLaw {
    IndexSet active_set;
    Matrix K;  ///< U(θ) = K θ + k
    Vector k;
    Matrix L;  ///< λ_A(θ) = L θ + l
    Vector l;

    Vector optimizer(const Vector& theta) const { return K * theta + k; }
};

/// Throws DegenerateActiveSet when the active rows are linearly dependent.
AffineLaw region_law(const ParametricQp& pqp, const IndexSet& active_set);

struct ExploreOptions {
    std::size_t max_regions = 100000;
    double facet_step = 1e-6;
    int closure_samples = 4000;  ///< Halton points per coverage-closure pass
    int closure_passes = 8;
};

struct ExploreReport {
    std::vector<std::string> warnings;
    int qp_solves = 0;
    int degenerate_skipped = 0;
    int closure_seeds = 0;
};

ExplicitController explicit_solve(const ParametricQp& pqp, const ExploreOptions& options = {},
                                  ExploreReport* report = nullptr);

struct OracleReport {
    int samples = 0;
    int feasible = 0;
    int infeasible = 0;        ///< QP infeasible and not covered
    int coverage_gaps = 0;     ///< QP feasible but no region contains θ
    int spurious_coverage = 0; ///< covered although the QP is infeasible
    double max_deviation = 0.0;  ///< max |u_explicit − u_qp|∞ over feasible samples
    Vector worst_theta;
};

OracleReport verify_against_oracle(const ExplicitController& ctrl, const ParametricQp& pqp, int n_samples,
                                   std::uint64_t seed);

}  // namespace exmpc
