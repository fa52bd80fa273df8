#include "exmpc/error.hpp"
#include "exmpc/mpqp.hpp"

namespace exmpc {

AffineLaw region_law(const ParametricQp& pqp, const IndexSet& active_set) {
    const CholeskyFactor factor(pqp.H);
    const int na = static_cast<int>(active_set.size());
    const int nU = pqp.decision_dim();
    const int d = pqp.theta_dim;
    const Matrix HinvFt = factor.solve(Matrix(pqp.F.transpose()));

    AffineLaw law;
    law.active_set = active_set;
    if (na == 0) {
        law.K = -HinvFt;
        law.k = Vector::Zero(nU);
        law.L = Matrix::Zero(0, d);
        law.l = Vector::Zero(0);
        return law;
    }

    Matrix GA(na, nU), SA(na, d);
    Vector wA(na);
    for (int i = 0; i < na; ++i) {
        const int r = active_set[i];
        if (r < 0 || r >= pqp.G.rows()) throw Error(ErrorKind::invalid_argument, "active set index out of range");
        GA.row(i) = pqp.G.row(r);
        SA.row(i) = pqp.S.row(r);
        wA(i) = pqp.w(r);
    }

    // LICQ: the active rows of G must be linearly independent.
    if (na > nU) throw Error(ErrorKind::degenerate_active_set, "more active constraints than decision variables");
    Eigen::JacobiSVD<Matrix> svd(GA);
    const Vector& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-9 * sv(0))
        throw Error(ErrorKind::degenerate_active_set, "active constraint rows are linearly dependent");

    const Matrix HinvGAt = factor.solve(Matrix(GA.transpose()));
    const Matrix M = GA * HinvGAt;
    const Eigen::LLT<Matrix> mfac(M);
    if (mfac.info() != Eigen::Success)
        throw Error(ErrorKind::degenerate_active_set, "reduced KKT matrix is singular");

    law.L = -mfac.solve(SA + GA * HinvFt);
    law.l = -mfac.solve(wA);
    law.K = -HinvFt - HinvGAt * law.L;
    law.k = -HinvGAt * law.l;
    return law;
}

}  // namespace exmpc
