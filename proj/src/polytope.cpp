#include "exmpc/polytope.hpp"

#include "exmpc/error.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace exmpc {

Polyhedron::Polyhedron(Matrix A, Vector b) {
    if (A.rows() != b.size()) throw Error(ErrorKind::dimension_mismatch, "polyhedron A/b rows");
    require_finite(A, "A");
    require_finite(b, "b");
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        const double norm = A.row(r).norm();
        if (norm <= tol::rank_relative) throw Error(ErrorKind::invalid_argument, "zero row in polyhedron");
        A.row(r) /= norm;
        b(r) /= norm;
    }
    A_ = std::move(A);
    b_ = std::move(b);
}

Polyhedron Polyhedron::from_normalized(Matrix A, Vector b) {
    Polyhedron p;
    p.A_ = std::move(A);
    p.b_ = std::move(b);
    return p;
}

Polyhedron Polyhedron::box(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size()) throw Error(ErrorKind::dimension_mismatch, "box bounds");
    const Eigen::Index d = lower.size();
    Matrix A = Matrix::Zero(2 * d, d);
    Vector b(2 * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        A(2 * i, i) = 1.0;
        b(2 * i) = upper(i);
        A(2 * i + 1, i) = -1.0;
        b(2 * i + 1) = -lower(i);
    }
    return from_normalized(std::move(A), std::move(b));
}

bool Polyhedron::contains(const Vector& theta, double tolerance) const {
    if (theta.size() != A_.cols()) throw Error(ErrorKind::dimension_mismatch, "contains: theta size");
    for (Eigen::Index r = 0; r < A_.rows(); ++r)
        if (A_.row(r).dot(theta) > b_(r) + tolerance) return false;
    return true;
}

ChebyshevBall Polyhedron::chebyshev() const {
    if (A_.rows() == 0) {
        ChebyshevBall ball;
        ball.kind = Feasibility::full_dimensional;
        ball.center = Vector::Zero(A_.cols());
        ball.radius = std::numeric_limits<double>::infinity();
        return ball;
    }
    return lp_feasible(A_, b_);
}

bool Polyhedron::is_empty() const { return chebyshev().kind == Feasibility::empty; }

double support(const Polyhedron& P, const Vector& direction) {
    if (P.rows() == 0) return std::numeric_limits<double>::infinity();
    const LpResult lp = lp_minimize(-direction, P.A(), P.b());
    if (lp.status == LpStatus::infeasible) return -std::numeric_limits<double>::infinity();
    if (lp.status == LpStatus::unbounded) return std::numeric_limits<double>::infinity();
    return -lp.objective;
}

std::pair<Vector, Vector> Polyhedron::bounding_box() const {
    const int d = dim();
    Vector lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        Vector e = Vector::Zero(d);
        e(i) = 1.0;
        hi(i) = support(*this, e);
        lo(i) = -support(*this, -e);
    }
    return {lo, hi};
}

Polyhedron Polyhedron::minimize() const {
    if (is_empty()) throw Error(ErrorKind::empty_input, "minimize on an empty polyhedron");
    const Eigen::Index m = A_.rows();
    std::vector<bool> keep(m, true);

    // Exact duplicates (up to tolerance): keep the tighter row, first on ties.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!keep[i]) continue;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            if (!keep[j]) continue;
            if ((A_.row(i) - A_.row(j)).cwiseAbs().maxCoeff() <= 1e-12) {
                if (b_(j) < b_(i)) {
                    keep[i] = false;
                    break;
                }
                keep[j] = false;
            }
        }
    }

    // Rows with slack against the bounding box are implied by the others.
    const auto [lo, hi] = bounding_box();
    if (lo.allFinite() && hi.allFinite()) {
        for (Eigen::Index r = 0; r < m; ++r) {
            if (!keep[r]) continue;
            double max_val = 0.0;
            for (Eigen::Index c = 0; c < A_.cols(); ++c) max_val += A_(r, c) * (A_(r, c) > 0 ? hi(c) : lo(c));
            if (max_val < b_(r) - 1e-9) keep[r] = false;
        }
    }

    // One LP per remaining row against the rows still kept.
    for (Eigen::Index r = 0; r < m; ++r) {
        if (!keep[r]) continue;
        std::vector<Eigen::Index> others;
        for (Eigen::Index i = 0; i < m; ++i)
            if (keep[i] && i != r) others.push_back(i);
        Matrix A(static_cast<Eigen::Index>(others.size()) + 1, A_.cols());
        Vector b(A.rows());
        for (std::size_t k = 0; k < others.size(); ++k) {
            A.row(static_cast<Eigen::Index>(k)) = A_.row(others[k]);
            b(static_cast<Eigen::Index>(k)) = b_(others[k]);
        }
        A.row(A.rows() - 1) = A_.row(r);
        b(b.size() - 1) = b_(r) + 1.0;
        const LpResult lp = lp_minimize(-Vector(A_.row(r).transpose()), A, b);
        if (lp.status == LpStatus::optimal && -lp.objective <= b_(r) + 1e-9) keep[r] = false;
    }

    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < m; ++r)
        if (keep[r]) rows.push_back(r);
    Matrix A(static_cast<Eigen::Index>(rows.size()), A_.cols());
    Vector b(A.rows());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        A.row(static_cast<Eigen::Index>(k)) = A_.row(rows[k]);
        b(static_cast<Eigen::Index>(k)) = b_(rows[k]);
    }
    return from_normalized(std::move(A), std::move(b));
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
    if (other.dim() != dim() && rows() > 0 && other.rows() > 0)
        throw Error(ErrorKind::dimension_mismatch, "intersect: dims differ");
    Matrix A(A_.rows() + other.A_.rows(), std::max(A_.cols(), other.A_.cols()));
    Vector b(A.rows());
    if (A_.rows() > 0) A.topRows(A_.rows()) = A_;
    if (other.A_.rows() > 0) A.bottomRows(other.A_.rows()) = other.A_;
    b << b_, other.b_;
    return from_normalized(std::move(A), std::move(b));
}

namespace {

bool contained_in(const Polyhedron& P, const Polyhedron& Q) {
    for (int r = 0; r < Q.rows(); ++r) {
        if (support(P, Q.A().row(r).transpose()) > Q.b()(r) + tol::feasibility) return false;
    }
    return true;
}

}  // namespace

bool same_set(const Polyhedron& P, const Polyhedron& Q, int n_samples, std::uint64_t seed) {
    if (P.dim() != Q.dim()) throw Error(ErrorKind::dimension_mismatch, "same_set: dims differ");
    if (n_samples == 0) return contained_in(P, Q) && contained_in(Q, P);

    const auto [plo, phi] = P.bounding_box();
    const auto [qlo, qhi] = Q.bounding_box();
    const Vector lo = plo.cwiseMin(qlo);
    const Vector hi = phi.cwiseMax(qhi);
    if (!lo.allFinite() || !hi.allFinite())
        throw Error(ErrorKind::invalid_argument, "same_set sampling needs bounded sets");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector theta(P.dim());
    for (int s = 0; s < n_samples; ++s) {
        for (int i = 0; i < P.dim(); ++i) theta(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
        if (P.contains(theta, 0.0) != Q.contains(theta, 0.0)) return false;
    }
    return true;
}

}  // namespace exmpc
