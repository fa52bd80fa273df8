#include "exmpc/lti.hpp"

#include "exmpc/error.hpp"

#include <cmath>

namespace exmpc {

void StateSpace::validate() const {
    if (A.rows() != A.cols()) throw Error(ErrorKind::dimension_mismatch, "A must be square");
    if (B.rows() != A.rows()) throw Error(ErrorKind::dimension_mismatch, "B rows must equal n_x");
    if (C.cols() != A.rows()) throw Error(ErrorKind::dimension_mismatch, "C cols must equal n_x");
    if (!(Ts > 0.0) || !std::isfinite(Ts)) throw Error(ErrorKind::invalid_argument, "Ts must be positive");
    require_finite(A, "A");
    require_finite(B, "B");
    require_finite(C, "C");
}

StateSpace fo_to_ss(double gain, double tau, double Ts) {
    if (!(tau > 0.0)) throw Error(ErrorKind::invalid_argument, "time constant must be positive");
    if (!(Ts > 0.0)) throw Error(ErrorKind::invalid_argument, "sampling time must be positive");
    const double a = std::exp(-Ts / tau);
    StateSpace ss;
    ss.A = Matrix::Constant(1, 1, a);
    // 1 - e^{-Ts/τ} without cancellation for very large τ
    ss.B = Matrix::Constant(1, 1, -gain * std::expm1(-Ts / tau));
    ss.C = Matrix::Ones(1, 1);
    ss.Ts = Ts;
    return ss;
}

AugmentedModel augment(const StateSpace& ss, IntegratorCoupling coupling) {
    ss.validate();
    const int nx = ss.nx(), nu = ss.nu(), ny = ss.ny();
    const int n = nx + ny;

    AugmentedModel m;
    m.nx = nx;
    m.nu = nu;
    m.ny = ny;
    m.Ts = ss.Ts;
    m.coupling = coupling;

    m.At = Matrix::Zero(n, n);
    m.At.topLeftCorner(nx, nx) = ss.A;
    m.At.bottomLeftCorner(ny, nx) = -ss.Ts * ss.C;
    m.At.bottomRightCorner(ny, ny).setIdentity();

    m.Bt = Matrix::Zero(n, nu);
    m.Bt.topRows(nx) = ss.B;

    m.Et = Matrix::Zero(n, ny);
    if (coupling == IntegratorCoupling::control_error) {
        m.Et.bottomRows(ny) = ss.Ts * Matrix::Identity(ny, ny);
    } else {
        m.Bt.bottomRows(ny) = Matrix::Identity(ny, nu);
    }

    m.Ct = Matrix::Zero(ny, n);
    m.Ct.leftCols(nx) = ss.C;
    return m;
}

}  // namespace exmpc
