#include "exmpc/error.hpp"
#include "exmpc/mpqp.hpp"

#include <cmath>
#include <string>

namespace exmpc {
namespace {

void require_size(const Vector& v, int n, const char* name) {
    if (v.size() != n)
        throw Error(ErrorKind::dimension_mismatch,
                    std::string(name) + " has size " + std::to_string(v.size()) + ", expected " + std::to_string(n));
}

}  // namespace

void MpcSpec::validate() const {
    const int nu = model.nu, ny = model.ny;
    if (N < 1) throw Error(ErrorKind::invalid_argument, "horizon N must be >= 1");
    require_size(Qy, ny, "Qy");
    require_size(QI, ny, "QI");
    require_size(R, nu, "R");
    require_size(u_min, nu, "u_min");
    require_size(u_max, nu, "u_max");
    require_size(y_min, ny, "y_min");
    require_size(y_max, ny, "y_max");
    require_finite(Qy, "Qy");
    require_finite(QI, "QI");
    require_finite(R, "R");
    if ((Qy.array() < 0.0).any()) throw Error(ErrorKind::invalid_argument, "Qy must be >= 0");
    if ((QI.array() < 0.0).any()) throw Error(ErrorKind::invalid_argument, "QI must be >= 0");
    if ((R.array() <= 0.0).any()) throw Error(ErrorKind::invalid_argument, "R must be > 0");
    for (int i = 0; i < nu; ++i) {
        if (!(u_min(i) < 0.0 && 0.0 < u_max(i)))
            throw Error(ErrorKind::invalid_argument, "input box must contain the origin in its interior");
        if (!std::isfinite(u_min(i)) || !std::isfinite(u_max(i)))
            throw Error(ErrorKind::invalid_argument, "input bounds must be finite");
    }
    for (int i = 0; i < ny; ++i) {
        if (!(y_min(i) < 0.0 && 0.0 < y_max(i)))
            throw Error(ErrorKind::invalid_argument, "output box must contain the origin in its interior");
    }
    if (!(integrator_bound > 0.0) || !std::isfinite(integrator_bound))
        throw Error(ErrorKind::invalid_argument, "integrator bound must be positive");
}

QpProblem ParametricQp::at(const Vector& theta) const {
    if (theta.size() != theta_dim) throw Error(ErrorKind::dimension_mismatch, "theta size");
    return QpProblem{H, F.transpose() * theta, G, w + S * theta};
}

ParametricQp condense(const MpcSpec& spec) {
    spec.validate();
    const AugmentedModel& m = spec.model;
    const int n = m.dim(), nu = m.nu, ny = m.ny, N = spec.N;
    const int nU = N * nu;
    const int d = spec.theta_dim();

    Matrix P = Matrix::Zero(n, d);
    P.leftCols(n).setIdentity();
    Matrix Jref = Matrix::Zero(ny, d);
    Jref.rightCols(ny).setIdentity();
    Matrix Lsel = Matrix::Zero(ny, n);
    Lsel.rightCols(ny).setIdentity();
    Matrix Gam = Matrix::Zero(n, nU);

    const Eigen::DiagonalMatrix<double, Eigen::Dynamic> Qy(spec.Qy), QI(spec.QI);

    Matrix H = Matrix::Zero(nU, nU);
    for (int k = 0; k < N; ++k) H.block(k * nu, k * nu, nu, nu) = 2.0 * spec.R.asDiagonal().toDenseMatrix();
    Matrix F = Matrix::Zero(d, nU);

    std::vector<Matrix> y_rows;     // Ct Γ_k
    std::vector<Matrix> y_offsets;  // Ct P_k
    for (int k = 0; k <= N; ++k) {
        const bool stage = spec.stages == StageRange::shifted ? (k >= 1) : (k <= N - 1);
        if (stage) {
            const Matrix a = m.Ct * P - Jref;
            const Matrix b = m.Ct * Gam;
            const Matrix c = Lsel * P;
            const Matrix e = Lsel * Gam;
            H += 2.0 * (b.transpose() * Qy * b + e.transpose() * QI * e);
            F += 2.0 * (a.transpose() * Qy * b + c.transpose() * QI * e);
        }
        if (k >= 1) {
            y_rows.push_back(m.Ct * Gam);
            y_offsets.push_back(m.Ct * P);
        }
        if (k < N) {
            Gam = m.At * Gam;
            Gam.block(0, k * nu, n, nu) += m.Bt;
            P = m.At * P + m.Et * Jref;
        }
    }
    H = 0.5 * (H + H.transpose());

    try {
        CholeskyFactor check(H);
    } catch (const Error& e) {
        throw Error(ErrorKind::not_positive_definite, std::string("condensed Hessian: ") + e.what());
    }

    // Rows: u <= u_max, -u <= -u_min, y <= y_max, -y <= -y_min.
    std::vector<std::pair<Vector, std::pair<double, Vector>>> rows;  // (G row, (w, S row))
    const Vector zero_theta = Vector::Zero(d);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < nu; ++i) {
            Vector g = Vector::Zero(nU);
            g(k * nu + i) = 1.0;
            rows.push_back({g, {spec.u_max(i), zero_theta}});
        }
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < nu; ++i) {
            Vector g = Vector::Zero(nU);
            g(k * nu + i) = -1.0;
            rows.push_back({g, {-spec.u_min(i), zero_theta}});
        }
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < ny; ++i)
            if (std::isfinite(spec.y_max(i)))
                rows.push_back({y_rows[k].row(i).transpose(), {spec.y_max(i), -Vector(y_offsets[k].row(i).transpose())}});
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < ny; ++i)
            if (std::isfinite(spec.y_min(i)))
                rows.push_back({-Vector(y_rows[k].row(i).transpose()), {-spec.y_min(i), Vector(y_offsets[k].row(i).transpose())}});

    ParametricQp pqp;
    const auto mrows = static_cast<Eigen::Index>(rows.size());
    pqp.G.resize(mrows, nU);
    pqp.w.resize(mrows);
    pqp.S.resize(mrows, d);
    for (Eigen::Index r = 0; r < mrows; ++r) {
        pqp.G.row(r) = rows[r].first.transpose();
        pqp.w(r) = rows[r].second.first;
        pqp.S.row(r) = rows[r].second.second.transpose();
    }
    pqp.H = std::move(H);
    pqp.F = std::move(F);
    pqp.theta_dim = d;
    pqp.n_u = nu;

    Vector lo(d), hi(d);
    if (spec.state_box) {
        require_size(spec.state_box->lower, m.nx, "state_box.lower");
        require_size(spec.state_box->upper, m.nx, "state_box.upper");
        lo.head(m.nx) = spec.state_box->lower;
        hi.head(m.nx) = spec.state_box->upper;
    } else {
        const Matrix C = m.Ct.leftCols(m.nx);
        if (m.nx != ny || !C.isDiagonal(0.0))
            throw Error(ErrorKind::invalid_argument, "state exploration box needs a square diagonal C or an explicit state_box");
        for (int i = 0; i < m.nx; ++i) {
            const double c = C(i, i);
            if (c == 0.0 || !std::isfinite(spec.y_min(i)) || !std::isfinite(spec.y_max(i)))
                throw Error(ErrorKind::invalid_argument, "cannot derive the state box from the output bounds");
            lo(i) = std::min(spec.y_min(i) / c, spec.y_max(i) / c);
            hi(i) = std::max(spec.y_min(i) / c, spec.y_max(i) / c);
        }
    }
    lo.segment(m.nx, ny).setConstant(-spec.integrator_bound);
    hi.segment(m.nx, ny).setConstant(spec.integrator_bound);
    if (spec.reference_box) {
        require_size(spec.reference_box->lower, ny, "reference_box.lower");
        require_size(spec.reference_box->upper, ny, "reference_box.upper");
        lo.tail(ny) = spec.reference_box->lower;
        hi.tail(ny) = spec.reference_box->upper;
    } else {
        if (!spec.y_min.allFinite() || !spec.y_max.allFinite())
            throw Error(ErrorKind::invalid_argument, "reference box needs finite output bounds or an explicit reference_box");
        lo.tail(ny) = spec.y_min;
        hi.tail(ny) = spec.y_max;
    }
    if (((hi - lo).array() <= 0.0).any()) throw Error(ErrorKind::invalid_argument, "empty exploration box");
    pqp.theta_box = Polyhedron::box(lo, hi);

    pqp.meta.Qy = spec.Qy;
    pqp.meta.QI = spec.QI;
    pqp.meta.R = spec.R;
    pqp.meta.N = N;
    pqp.meta.model_fingerprint = model_fingerprint(m);
    pqp.meta.u_min = spec.u_min;
    pqp.meta.u_max = spec.u_max;
    return pqp;
}

}  // namespace exmpc
