#include "exmpc/error.hpp"
#include "exmpc/numkit.hpp"

#include <cmath>
#include <limits>

namespace exmpc {
namespace {

// Dense tableau in canonical form: the columns listed in `basis` form an
// identity block. Objective row holds reduced costs; `value` the objective.
class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols)
        : t_(Matrix::Zero(rows, cols + 1)), reduced_(Vector::Zero(cols)), basis_(rows, -1) {}

    Eigen::Index rows() const { return t_.rows(); }
    Eigen::Index cols() const { return t_.cols() - 1; }
    double& at(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
    double& rhs(Eigen::Index r) { return t_(r, t_.cols() - 1); }
    double rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }
    std::vector<Eigen::Index>& basis() { return basis_; }
    const std::vector<Eigen::Index>& basis() const { return basis_; }

    // Reduced costs for cost vector c given the current basis.
    void price(const Vector& c) {
        reduced_ = c;
        value_ = 0.0;
        for (Eigen::Index r = 0; r < rows(); ++r) {
            const double cb = c(basis_[r]);
            if (cb == 0.0) continue;
            reduced_ -= cb * t_.row(r).head(cols()).transpose();
            value_ += cb * rhs(r);
        }
    }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t_.row(r) /= t_(r, c);
        for (Eigen::Index i = 0; i < rows(); ++i) {
            if (i == r) continue;
            const double factor = t_(i, c);
            if (factor != 0.0) t_.row(i) -= factor * t_.row(r);
        }
        const double rc = reduced_(c);
        if (rc != 0.0) {
            reduced_ -= rc * t_.row(r).head(cols()).transpose();
            value_ += rc * rhs(r);
        }
        basis_[r] = c;
    }

    enum class Outcome { optimal, unbounded };

    // Minimizes over the columns with allowed[c] == true. Dantzig pricing,
    // switching to Bland's lowest-index rule after the first degenerate pivot.
    Outcome run(const std::vector<bool>& allowed) {
        bool bland = false;
        const long max_pivots = 50L * (rows() + cols()) + 100;
        for (long iter = 0; iter < max_pivots; ++iter) {
            Eigen::Index enter = -1;
            double best = -tol::simplex_pivot;
            for (Eigen::Index c = 0; c < cols(); ++c) {
                if (!allowed[c]) continue;
                if (reduced_(c) < best) {
                    enter = c;
                    if (bland) break;
                    best = reduced_(c);
                }
            }
            if (enter < 0) return Outcome::optimal;

            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index r = 0; r < rows(); ++r) {
                const double a = t_(r, enter);
                if (a <= tol::simplex_pivot) continue;
                const double ratio = std::max(rhs(r), 0.0) / a;
                if (ratio < best_ratio - 1e-14 ||
                    (std::abs(ratio - best_ratio) <= 1e-14 && basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return Outcome::unbounded;
            if (best_ratio <= 1e-14) bland = true;
            pivot(leave, enter);
        }
        throw Error(ErrorKind::max_iterations, "simplex pivot limit reached");
    }

    double value() const { return value_; }

private:
    Matrix t_;
    Vector reduced_;
    double value_ = 0.0;
    std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult lp_minimize(const Vector& c, const Matrix& A, const Vector& b) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (c.size() != n || b.size() != m) throw Error(ErrorKind::dimension_mismatch, "lp_minimize sizes");
    require_finite(A, "A");
    require_finite(b, "b");
    require_finite(c, "c");

    LpResult result;
    if (m == 0) {
        result.x = Vector::Zero(n);
        result.status = c.isZero() ? LpStatus::optimal : LpStatus::unbounded;
        return result;
    }

    Eigen::Index n_art = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        if (b(i) < 0.0) ++n_art;

    // Columns: x+ (n), x- (n), slacks (m), artificials (n_art).
    const Eigen::Index slack0 = 2 * n;
    const Eigen::Index art0 = slack0 + m;
    Tableau tab(m, art0 + n_art);
    Eigen::Index art = art0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            tab.at(i, j) = sign * A(i, j);
            tab.at(i, n + j) = -sign * A(i, j);
        }
        tab.at(i, slack0 + i) = sign;
        tab.rhs(i) = sign * b(i);
        if (sign < 0.0) {
            tab.at(i, art) = 1.0;
            tab.basis()[i] = art++;
        } else {
            tab.basis()[i] = slack0 + i;
        }
    }

    const Eigen::Index total = art0 + n_art;
    std::vector<bool> allowed(total, true);

    if (n_art > 0) {
        Vector phase1 = Vector::Zero(total);
        phase1.tail(n_art).setOnes();
        tab.price(phase1);
        tab.run(allowed);
        const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
        if (tab.value() > tol::phase1 * scale) {
            result.status = LpStatus::infeasible;
            return result;
        }
        // Drive zero-level artificials out of the basis where possible.
        for (Eigen::Index r = 0; r < m; ++r) {
            if (tab.basis()[r] < art0) continue;
            Eigen::Index best = -1;
            double best_abs = 1e-9;
            for (Eigen::Index j = 0; j < art0; ++j) {
                if (std::abs(tab.at(r, j)) > best_abs) {
                    best_abs = std::abs(tab.at(r, j));
                    best = j;
                }
            }
            if (best >= 0) tab.pivot(r, best);
        }
        for (Eigen::Index j = art0; j < total; ++j) allowed[j] = false;
    }

    Vector cost = Vector::Zero(total);
    cost.head(n) = c;
    cost.segment(n, n) = -c;
    tab.price(cost);
    const auto outcome = tab.run(allowed);

    Vector z = Vector::Zero(total);
    for (Eigen::Index r = 0; r < m; ++r) z(tab.basis()[r]) = tab.rhs(r);
    result.x = z.head(n) - z.segment(n, n);
    result.objective = c.dot(result.x);
    result.status = outcome == Tableau::Outcome::optimal ? LpStatus::optimal : LpStatus::unbounded;
    return result;
}

ChebyshevBall lp_feasible(const Matrix& G, const Vector& w, double radius_cap) {
    if (G.rows() < 1) throw Error(ErrorKind::invalid_argument, "lp_feasible needs at least one row");
    if (w.size() != G.rows()) throw Error(ErrorKind::dimension_mismatch, "lp_feasible sizes");
    const Eigen::Index m = G.rows();
    const Eigen::Index d = G.cols();

    ChebyshevBall ball;
    // Zero rows are either vacuous or contradictory.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double norm = G.row(i).norm();
        if (norm <= tol::rank_relative) {
            if (w(i) < -tol::feasibility) return ball;
            continue;
        }
        keep.push_back(i);
    }

    const auto k = static_cast<Eigen::Index>(keep.size());
    Matrix A = Matrix::Zero(k + 2, d + 1);
    Vector b = Vector::Zero(k + 2);
    for (Eigen::Index r = 0; r < k; ++r) {
        A.row(r).head(d) = G.row(keep[r]);
        A(r, d) = G.row(keep[r]).norm();
        b(r) = w(keep[r]);
    }
    A(k, d) = 1.0;
    b(k) = radius_cap;
    A(k + 1, d) = -1.0;
    b(k + 1) = 0.0;

    Vector c = Vector::Zero(d + 1);
    c(d) = -1.0;
    const LpResult lp = lp_minimize(c, A, b);
    if (lp.status == LpStatus::infeasible) return ball;

    ball.center = lp.x.head(d);
    ball.radius = std::max(0.0, lp.x(d));
    ball.kind = ball.radius > tol::chebyshev_radius ? Feasibility::full_dimensional
                                                     : Feasibility::lower_dimensional;
    return ball;
}

}  // namespace exmpc
