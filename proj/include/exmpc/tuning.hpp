#pragma once

// Blending two boundary explicit controllers with a self-computed tuning
// parameter, and the interval-splitting remap of that parameter.

#include "exmpc/controller.hpp"
#include "exmpc/numkit.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace exmpc {

/// max_i |y_ref,i| / d_max,i. Throws ReferenceOutOfRange when a ratio exceeds 1.
double rho_deviation(const Vector& y_ref, const Vector& d_max);

/// |Δ_ref| / Δ_max, or nullopt for Δ_ref = 0 (the previous ρ is kept).
/// Throws StepOutOfRange when |Δ_ref| > Δ_max.
std::optional<double> rho_step_change(double delta_ref, double delta_max);

/// Two-interval remap: ρ·ρ_s when γ <= ρ_s, otherwise ρ(1 − ρ_s) + ρ_s.
double scale_rho(double rho, double rho_s, double gamma);

/// General remap over split points 0 < s_1 < … < s_k < 1. γ in the i-th
/// interval (s_{i−1}, s_i] (the first one closed at 0) sends ρ affinely onto
/// [s_{i−1}, s_i].
double scale_rho(double rho, const std::vector<double>& splits, double gamma);

/// 0 for an upward step, 1 for a downward one. Throws ZeroStep.
double decision_sign_of_step(double delta_ref);

/// Two explicit controllers that differ only in the tuned output penalty.
class TunablePair {
public:
    /// Throws InvalidArgument unless the controllers share dimensions, horizon,
    /// model, input box, R and QI, and Qy_L <= Qy_U elementwise.
    TunablePair(ExplicitController lower, ExplicitController upper);

    const ExplicitController& lower() const { return lower_; }
    const ExplicitController& upper() const { return upper_; }

private:
    ExplicitController lower_;
    ExplicitController upper_;
};

struct Interpolation {
    Vector u;
    Vector u_L;
    Vector u_U;
    int region_L = -1;
    int region_U = -1;
};

/// u = (1 − w) u_L + w u_U with w = upper_weight.
Interpolation interpolate_input(const TunablePair& pair, const Vector& theta, double upper_weight);

enum class TuningDirection { standard, reversed };

struct Penalties {
    Vector Qy;
    Vector QI;
    Vector R;
};

/// standard: (1 − ρ̃) M_L + ρ̃ M_U; reversed: ρ̃ M_L + (1 − ρ̃) M_U. Reporting only.
Penalties effective_penalties(const TunablePair& pair, double rho_tilde, TuningDirection direction);

enum class RhoMode { deviation, step_change };

struct SelfTuneConfig {
    RhoMode mode = RhoMode::step_change;
    Vector d_max;             ///< deviation mode
    double delta_max = 15.0;  ///< step-change mode
    std::vector<double> splits{0.5};  ///< empty: ρ̃ = ρ
    /// Maps the reference change to γ ∈ [0, 1]; defaults to the sign of the
    /// component with the largest magnitude.
    std::function<double(const Vector& delta_ref)> decision;
    TuningDirection direction = TuningDirection::standard;

    void validate() const;
};

struct TunerState {
    double rho = 0.0;
    double rho_tilde = 0.0;
    double gamma = 0.0;
    Vector last_y_ref;
};

/// Updates ρ and ρ̃ whenever the reference changes; a constant reference
/// leaves the state untouched.
class SelfTuner {
public:
    SelfTuner(SelfTuneConfig config, const Vector& initial_y_ref);

    const TunerState& update(const Vector& y_ref);
    const TunerState& state() const { return state_; }
    const SelfTuneConfig& config() const { return config_; }

    /// Weight of the upper controller in the applied input.
    double upper_weight() const;

private:
    double remap(double rho, double gamma) const;

    SelfTuneConfig config_;
    TunerState state_;
};

}  // namespace exmpc
