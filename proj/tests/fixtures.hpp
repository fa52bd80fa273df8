#pragma once

#include "exmpc/mpqp.hpp"

#include <limits>

namespace fixture {

using exmpc::Vector;

inline Vector scalar(double v) { return Vector::Constant(1, v); }

/// Heat-exchanger model with the penalties and bounds used by the boundary
/// controllers (deviation units around 35 °C / 35 %).
inline exmpc::MpcSpec heat_exchanger_spec(double qy, int N = 20) {
    exmpc::MpcSpec s;
    s.model = exmpc::augment(exmpc::fo_to_ss(0.24, 5.7, 1.0));
    s.N = N;
    s.Qy = scalar(qy);
    s.QI = scalar(1.0);
    s.R = scalar(10.0);
    s.u_min = scalar(-15.0);
    s.u_max = scalar(65.0);
    s.y_min = scalar(-15.0);
    s.y_max = scalar(20.0);
    return s;
}

/// Same model with only input bounds; the exploration box stays that of the
/// output bounds.
inline exmpc::MpcSpec input_only_spec(double qy, int N) {
    exmpc::MpcSpec s = heat_exchanger_spec(qy, N);
    const double inf = std::numeric_limits<double>::infinity();
    s.y_min = scalar(-inf);
    s.y_max = scalar(inf);
    s.state_box = exmpc::Box{scalar(-15.0), scalar(20.0)};
    s.reference_box = exmpc::Box{scalar(-15.0), scalar(20.0)};
    return s;
}

}  // namespace fixture
