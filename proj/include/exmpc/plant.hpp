#pragma once

// Simulated heat exchanger: cold-outlet temperature driven by the heating
// pump voltage, with slower cooling than heating and a gain that drops as
// the outlet gets hotter.

#include "exmpc/lti.hpp"

#include <random>

namespace exmpc {

struct SurrogateConfig {
    double T_steady = 35.0;  ///< °C
    double U_steady = 35.0;  ///< %
    double K0 = 0.24;        ///< °C per %
    double kappa_gain = 0.02;  ///< relative gain loss per °C above T_steady
    double tau_heat = 5.7;   ///< s
    double tau_cool = 8.5;   ///< s
    double noise_std = 0.0;  ///< °C
    double T_cold_in = 19.0; ///< °C, reported only
    double Ts = 1.0;         ///< s

    static constexpr double T_min = 20.0, T_max = 70.0;
    static constexpr double U_min = 20.0, U_max = 100.0;

    void validate() const;

    /// K(T) = K0 · max(0.1, 1 − κ (T − T_steady)).
    double gain(double T) const;

    /// Steady outlet temperature for a constant voltage (before clamping).
    double equilibrium(double U) const;

    /// Same plant without droop or asymmetry (κ = 0, τ_cool = τ_heat).
    SurrogateConfig linearized() const;
};

struct PlantState {
    double T = 35.0;
};

/// One sampling period with the gain frozen at the current temperature.
/// Throws InputOutOfRange for U outside [20, 100] %.
PlantState step(const SurrogateConfig& cfg, const PlantState& state, double U, std::mt19937_64& rng);

/// x⁺ = A x + B u.
Vector linear_step(const StateSpace& ss, const Vector& x, const Vector& u);

}  // namespace exmpc
