#include "exmpc/plant.hpp"

#include "exmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exmpc {

void SurrogateConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::invalid_argument, std::string(name) + " must be positive");
    };
    positive(tau_heat, "tau_heat");
    positive(tau_cool, "tau_cool");
    positive(K0, "K0");
    positive(Ts, "Ts");
    if (!(kappa_gain >= 0.0) || !std::isfinite(kappa_gain))
        throw Error(ErrorKind::invalid_argument, "kappa_gain must be >= 0");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
        throw Error(ErrorKind::invalid_argument, "noise_std must be >= 0");
    if (!std::isfinite(T_steady) || !std::isfinite(U_steady))
        throw Error(ErrorKind::invalid_argument, "steady state must be finite");
}

double SurrogateConfig::gain(double T) const {
    return K0 * std::max(0.1, 1.0 - kappa_gain * (T - T_steady));
}

double SurrogateConfig::equilibrium(double U) const {
    // d = K0 (1 − κ d) ΔU away from the gain floor, d = 0.1 K0 ΔU on it.
    const double dU = U - U_steady;
    const double denom = 1.0 + K0 * kappa_gain * dU;
    if (denom > 0.0) {
        const double d = K0 * dU / denom;
        if (1.0 - kappa_gain * d >= 0.1) return T_steady + d;
    }
    return T_steady + 0.1 * K0 * dU;
}

SurrogateConfig SurrogateConfig::linearized() const {
    SurrogateConfig c = *this;
    c.kappa_gain = 0.0;
    c.tau_cool = c.tau_heat;
    return c;
}

PlantState step(const SurrogateConfig& cfg, const PlantState& state, double U, std::mt19937_64& rng) {
    if (!(U >= SurrogateConfig::U_min && U <= SurrogateConfig::U_max))
        throw Error(ErrorKind::input_out_of_range, "pump voltage " + std::to_string(U) + " % outside [20, 100] %");
    const double T = state.T;
    const double T_eq = cfg.T_steady + cfg.gain(T) * (U - cfg.U_steady);
    const double tau = T_eq - T > 0.0 ? cfg.tau_heat : cfg.tau_cool;
    double next = T + (T_eq - T) * -std::expm1(-cfg.Ts / tau);
    if (cfg.noise_std > 0.0) next += std::normal_distribution<double>(0.0, cfg.noise_std)(rng);
    return {std::clamp(next, SurrogateConfig::T_min, SurrogateConfig::T_max)};
}

Vector linear_step(const StateSpace& ss, const Vector& x, const Vector& u) {
    if (x.size() != ss.nx() || u.size() != ss.nu()) throw Error(ErrorKind::dimension_mismatch, "linear_step sizes");
    return ss.A * x + ss.B * u;
}

}  // namespace exmpc
