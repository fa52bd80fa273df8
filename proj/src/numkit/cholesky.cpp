#include "exmpc/error.hpp"
#include "exmpc/numkit.hpp"

#include <cmath>
#include <string>

namespace exmpc {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

void require_finite(const Matrix& m, const char* name) {
    if (!m.allFinite()) throw Error(ErrorKind::invalid_argument, std::string(name) + " has non-finite entries");
}

void require_finite(const Vector& v, const char* name) {
    if (!v.allFinite()) throw Error(ErrorKind::invalid_argument, std::string(name) + " has non-finite entries");
}

CholeskyFactor::CholeskyFactor(const Matrix& H) {
    if (H.rows() != H.cols()) throw Error(ErrorKind::dimension_mismatch, "Cholesky needs a square matrix");
    require_finite(H, "H");
    const Eigen::Index n = H.rows();
    const double max_diag = n > 0 ? H.diagonal().cwiseAbs().maxCoeff() : 0.0;
    const double min_pivot = tol::pivot_relative * std::max(max_diag, 1e-300);

    lower_ = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = H(j, j) - lower_.row(j).head(j).squaredNorm();
        if (!(d > min_pivot)) {
            throw Error(ErrorKind::not_positive_definite,
                        "pivot " + std::to_string(j) + " = " + std::to_string(d));
        }
        const double ljj = std::sqrt(d);
        lower_(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            lower_(i, j) = (H(i, j) - lower_.row(i).head(j).dot(lower_.row(j).head(j))) / ljj;
        }
    }
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
    if (rhs.size() != lower_.rows()) throw Error(ErrorKind::dimension_mismatch, "rhs size");
    Vector y = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::solve(const Matrix& rhs) const {
    if (rhs.rows() != lower_.rows()) throw Error(ErrorKind::dimension_mismatch, "rhs rows");
    Matrix y = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector cholesky_solve(const Matrix& H, const Vector& rhs) {
    require_finite(rhs, "rhs");
    return CholeskyFactor(H).solve(rhs);
}

}  // namespace exmpc
