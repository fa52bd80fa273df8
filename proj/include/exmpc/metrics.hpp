#pragma once

// Step-response criteria: SSE, maximal overshoot, settling time and the
// relative improvement between two criteria values.

#include <optional>
#include <utility>
#include <vector>

namespace exmpc {

/// Samples between two consecutive reference changes.
struct StepSegment {
    double t0 = 0.0;
    double t1 = 0.0;
    double y_ref_before = 0.0;
    double y_ref_after = 0.0;
    double Ts = 1.0;
    std::vector<std::pair<double, double>> samples;  ///< (t, T)
};

/// Ts · Σ (T − y_ref_after)².
double sse(const StepSegment& seg);

/// 100 · max(0, max sign(Δ)(T − y_ref_after)) / |Δ| in %. Throws ZeroStep.
double max_overshoot(const StepSegment& seg);

/// Time from t0 after which T stays within band·|Δ| of the new reference;
/// nullopt when the last sample is outside the band.
std::optional<double> settling_time(const StepSegment& seg, double band = 0.05);

/// 100 (ref − self_tuned) / self_tuned in %. Throws DivisionByZero.
double relative_improvement(double ref_value, double self_tuned_value);

/// Splits a sampled run into one segment per reference change. The hold
/// before the first change is returned separately when `initial` is given.
std::vector<StepSegment> split_segments(const std::vector<double>& t, const std::vector<double>& ref,
                                        const std::vector<double>& T, double Ts, StepSegment* initial = nullptr);

struct SegmentCriteria {
    double t0 = 0.0;
    double t1 = 0.0;
    double ref_before = 0.0;
    double ref_after = 0.0;
    double sse = 0.0;
    double overshoot = 0.0;
    std::optional<double> settling;
};

SegmentCriteria criteria(const StepSegment& seg);

}  // namespace exmpc
