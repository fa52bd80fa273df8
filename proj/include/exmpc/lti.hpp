#pragma once

#include "exmpc/numkit.hpp"

namespace exmpc {

/// Discrete-time x⁺ = A x + B u, y = C x with sampling period Ts.
struct StateSpace {
    Matrix A;
    Matrix B;
    Matrix C;
    double Ts = 1.0;

    int nx() const { return static_cast<int>(A.rows()); }
    int nu() const { return static_cast<int>(B.cols()); }
    int ny() const { return static_cast<int>(C.rows()); }

    /// Throws DimensionMismatch / InvalidArgument.
    void validate() const;
};

/// How the integrator row of the augmented model is driven.
///
/// control_error: x_I⁺ = x_I + Ts (y_ref − C x); the reference enters
/// through Et. printed_input_block: x_I⁺ = x_I − Ts C x + u, the literal
/// [B; I] input block with no reference feed. The latter is kept for
/// inspection only; it does not give offset-free closed loops.
enum class IntegratorCoupling { control_error, printed_input_block };

/// x̃⁺ = At x̃ + Bt u + Et y_ref,  y = Ct x̃,  x̃ = (x, x_I).
struct AugmentedModel {
    Matrix At;
    Matrix Bt;
    Matrix Ct;
    Matrix Et;
    double Ts = 1.0;
    int nx = 0;
    int nu = 0;
    int ny = 0;
    IntegratorCoupling coupling = IntegratorCoupling::control_error;

    int dim() const { return nx + ny; }
};

/// Zero-order-hold discretization of K / (τ s + 1).
StateSpace fo_to_ss(double gain, double tau, double Ts);

AugmentedModel augment(const StateSpace& ss, IntegratorCoupling coupling = IntegratorCoupling::control_error);

}  // namespace exmpc
