#include "exmpc/metrics.hpp"

#include "exmpc/error.hpp"

#include <algorithm>
#include <cmath>

namespace exmpc {

double sse(const StepSegment& seg) {
    double s = 0.0;
    for (const auto& [t, T] : seg.samples) {
        const double e = T - seg.y_ref_after;
        s += e * e;
    }
    return seg.Ts * s;
}

double max_overshoot(const StepSegment& seg) {
    const double delta = seg.y_ref_after - seg.y_ref_before;
    if (delta == 0.0) throw Error(ErrorKind::zero_step, "overshoot of a segment without a reference change");
    const double sign = delta > 0.0 ? 1.0 : -1.0;
    double worst = 0.0;
    for (const auto& [t, T] : seg.samples) worst = std::max(worst, sign * (T - seg.y_ref_after));
    return 100.0 * worst / std::abs(delta);
}

std::optional<double> settling_time(const StepSegment& seg, double band) {
    const double width = band * std::abs(seg.y_ref_after - seg.y_ref_before);
    const auto& s = seg.samples;
    for (std::size_t i = s.size(); i-- > 0;) {
        if (std::abs(s[i].second - seg.y_ref_after) > width) {
            if (i + 1 == s.size()) return std::nullopt;
            return s[i + 1].first - seg.t0;
        }
    }
    return 0.0;
}

double relative_improvement(double ref_value, double self_tuned_value) {
    if (self_tuned_value == 0.0) throw Error(ErrorKind::division_by_zero, "self-tuned criterion is zero");
    return 100.0 * (ref_value - self_tuned_value) / self_tuned_value;
}

std::vector<StepSegment> split_segments(const std::vector<double>& t, const std::vector<double>& ref,
                                        const std::vector<double>& T, double Ts, StepSegment* initial) {
    if (t.size() != ref.size() || t.size() != T.size())
        throw Error(ErrorKind::dimension_mismatch, "time, reference and output columns differ in length");
    std::vector<StepSegment> out;
    StepSegment cur;
    cur.Ts = Ts;
    bool have_step = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i == 0 || ref[i] != ref[i - 1]) {
            if (i > 0) {
                cur.t1 = t[i - 1];
                if (have_step)
                    out.push_back(std::move(cur));
                else if (initial)
                    *initial = std::move(cur);
                have_step = true;
            }
            cur = StepSegment{};
            cur.Ts = Ts;
            cur.t0 = t[i];
            cur.y_ref_before = i > 0 ? ref[i - 1] : ref[i];
            cur.y_ref_after = ref[i];
        }
        cur.samples.emplace_back(t[i], T[i]);
    }
    if (!t.empty()) {
        cur.t1 = t.back();
        if (have_step)
            out.push_back(std::move(cur));
        else if (initial)
            *initial = std::move(cur);
    }
    return out;
}

SegmentCriteria criteria(const StepSegment& seg) {
    SegmentCriteria c;
    c.t0 = seg.t0;
    c.t1 = seg.t1;
    c.ref_before = seg.y_ref_before;
    c.ref_after = seg.y_ref_after;
    c.sse = sse(seg);
    c.overshoot = max_overshoot(seg);
    c.settling = settling_time(seg);
    return c;
}

}  // namespace exmpc
