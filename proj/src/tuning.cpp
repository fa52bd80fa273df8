#include "exmpc/tuning.hpp"

#include "exmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exmpc {
namespace {

void require_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::invalid_argument, std::string(name) + " must lie in [0, 1]");
}

void require_splits(const std::vector<double>& splits) {
    double prev = 0.0;
    for (double s : splits) {
        if (!(s > prev && s < 1.0))
            throw Error(ErrorKind::invalid_argument, "split points must increase strictly inside (0, 1)");
        prev = s;
    }
}

double default_decision(const Vector& delta) {
    Eigen::Index i = 0;
    delta.cwiseAbs().maxCoeff(&i);
    return decision_sign_of_step(delta(i));
}

}  // namespace

double rho_deviation(const Vector& y_ref, const Vector& d_max) {
    if (y_ref.size() != d_max.size() || y_ref.size() == 0)
        throw Error(ErrorKind::dimension_mismatch, "y_ref and d_max sizes differ");
    double rho = 0.0;
    for (Eigen::Index i = 0; i < y_ref.size(); ++i) {
        if (!(d_max(i) > 0.0)) throw Error(ErrorKind::invalid_argument, "d_max must be positive");
        const double ratio = std::abs(y_ref(i)) / d_max(i);
        if (!(ratio <= 1.0))
            throw Error(ErrorKind::reference_out_of_range,
                        "reference deviation " + std::to_string(y_ref(i)) + " exceeds d_max " + std::to_string(d_max(i)));
        rho = std::max(rho, ratio);
    }
    return rho;
}

std::optional<double> rho_step_change(double delta_ref, double delta_max) {
    if (!(delta_max > 0.0)) throw Error(ErrorKind::invalid_argument, "delta_max must be positive");
    if (!std::isfinite(delta_ref)) throw Error(ErrorKind::invalid_argument, "reference step must be finite");
    if (delta_ref == 0.0) return std::nullopt;
    if (std::abs(delta_ref) > delta_max)
        throw Error(ErrorKind::step_out_of_range,
                    "reference step " + std::to_string(delta_ref) + " exceeds " + std::to_string(delta_max));
    return std::abs(delta_ref) / delta_max;
}

double scale_rho(double rho, double rho_s, double gamma) {
    require_unit(rho, "rho");
    require_unit(gamma, "gamma");
    if (!(rho_s > 0.0 && rho_s < 1.0)) throw Error(ErrorKind::invalid_argument, "rho_s must lie in (0, 1)");
    if (gamma <= rho_s) return rho * rho_s;
    return rho * (1.0 - rho_s) + rho_s;
}

double scale_rho(double rho, const std::vector<double>& splits, double gamma) {
    if (splits.size() == 1) return scale_rho(rho, splits[0], gamma);
    require_unit(rho, "rho");
    require_unit(gamma, "gamma");
    require_splits(splits);
    double lo = 0.0;
    for (std::size_t i = 0; i <= splits.size(); ++i) {
        const double hi = i < splits.size() ? splits[i] : 1.0;
        if (gamma <= hi || i == splits.size()) return lo + rho * (hi - lo);
        lo = hi;
    }
    return rho;
}

double decision_sign_of_step(double delta_ref) {
    if (delta_ref == 0.0 || std::isnan(delta_ref)) throw Error(ErrorKind::zero_step, "reference step is zero");
    return delta_ref > 0.0 ? 0.0 : 1.0;
}

TunablePair::TunablePair(ExplicitController lower, ExplicitController upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    const ControllerMeta& l = lower_.meta();
    const ControllerMeta& u = upper_.meta();
    auto fail = [](const char* what) {
        throw Error(ErrorKind::invalid_argument, std::string("boundary controllers differ in ") + what);
    };
    if (lower_.theta_dim() != upper_.theta_dim() || lower_.n_u() != upper_.n_u()) fail("dimensions");
    if (l.N != u.N) fail("horizon");
    if (l.model_fingerprint != u.model_fingerprint) fail("model");
    if (l.u_min != u.u_min || l.u_max != u.u_max) fail("input bounds");
    if (l.R != u.R) fail("R");
    if (l.QI != u.QI) fail("QI");
    if (l.Qy.size() != u.Qy.size()) fail("Qy size");
    if ((l.Qy.array() > u.Qy.array()).any())
        throw Error(ErrorKind::invalid_argument, "lower controller must have Qy <= upper Qy");
}

Interpolation interpolate_input(const TunablePair& pair, const Vector& theta, double upper_weight) {
    require_unit(upper_weight, "interpolation weight");
    const Evaluation lo = pair.lower().evaluate(theta);
    const Evaluation hi = pair.upper().evaluate(theta);
    Interpolation out;
    out.u_L = lo.u;
    out.u_U = hi.u;
    out.region_L = lo.region_index;
    out.region_U = hi.region_index;
    out.u = (1.0 - upper_weight) * lo.u + upper_weight * hi.u;
    return out;
}

Penalties effective_penalties(const TunablePair& pair, double rho_tilde, TuningDirection direction) {
    require_unit(rho_tilde, "rho_tilde");
    const double w = direction == TuningDirection::standard ? rho_tilde : 1.0 - rho_tilde;
    const ControllerMeta& l = pair.lower().meta();
    const ControllerMeta& u = pair.upper().meta();
    return {(1.0 - w) * l.Qy + w * u.Qy, (1.0 - w) * l.QI + w * u.QI, (1.0 - w) * l.R + w * u.R};
}

void SelfTuneConfig::validate() const {
    if (mode == RhoMode::deviation) {
        if (d_max.size() == 0 || (d_max.array() <= 0.0).any())
            throw Error(ErrorKind::invalid_argument, "d_max must be positive");
    } else if (!(delta_max > 0.0) || !std::isfinite(delta_max)) {
        throw Error(ErrorKind::invalid_argument, "delta_max must be positive");
    }
    require_splits(splits);
}

SelfTuner::SelfTuner(SelfTuneConfig config, const Vector& initial_y_ref) : config_(std::move(config)) {
    config_.validate();
    if (!config_.decision) config_.decision = default_decision;
    state_.last_y_ref = initial_y_ref;
    if (config_.mode == RhoMode::deviation) {
        state_.rho = rho_deviation(initial_y_ref, config_.d_max);
        state_.rho_tilde = remap(state_.rho, state_.gamma);
    }
}

double SelfTuner::remap(double rho, double gamma) const {
    return config_.splits.empty() ? rho : scale_rho(rho, config_.splits, gamma);
}

const TunerState& SelfTuner::update(const Vector& y_ref) {
    if (y_ref.size() != state_.last_y_ref.size()) throw Error(ErrorKind::dimension_mismatch, "reference size changed");
    if (y_ref == state_.last_y_ref) return state_;
    const Vector delta = y_ref - state_.last_y_ref;

    double rho = state_.rho;
    if (config_.mode == RhoMode::deviation) {
        rho = rho_deviation(y_ref, config_.d_max);
    } else {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < delta.size(); ++i)
            if (auto r = rho_step_change(delta(i), config_.delta_max)) worst = std::max(worst, *r);
        rho = worst;
    }
    const double gamma = config_.decision(delta);
    require_unit(gamma, "decision value");

    state_.rho = rho;
    state_.gamma = gamma;
    state_.rho_tilde = remap(rho, gamma);
    state_.last_y_ref = y_ref;
    return state_;
}

double SelfTuner::upper_weight() const {
    return config_.direction == TuningDirection::standard ? state_.rho_tilde : 1.0 - state_.rho_tilde;
}

}  // namespace exmpc
