#include "exmpc/error.hpp"
#include "exmpc/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exmpc {
namespace {

void validate(const QpProblem& p) {
    const Eigen::Index n = p.H.rows();
    if (p.H.cols() != n || p.f.size() != n) throw Error(ErrorKind::dimension_mismatch, "QP H/f sizes");
    if (p.G.rows() != p.w.size() || (p.G.rows() > 0 && p.G.cols() != n))
        throw Error(ErrorKind::dimension_mismatch, "QP G/w sizes");
    require_finite(p.H, "H");
    require_finite(p.f, "f");
    require_finite(p.G, "G");
    require_finite(p.w, "w");
    const double scale = std::max(1.0, p.H.cwiseAbs().maxCoeff());
    if ((p.H - p.H.transpose()).cwiseAbs().maxCoeff() > tol::symmetry_relative * scale)
        throw Error(ErrorKind::invalid_argument, "QP H is not symmetric");
}

// Any point with G z <= w, from min t s.t. G z - t <= w, t >= 0.
Vector phase_one(const QpProblem& p) {
    const Eigen::Index m = p.G.rows();
    const Eigen::Index n = p.G.cols();
    Matrix A = Matrix::Zero(m + 1, n + 1);
    Vector b = Vector::Zero(m + 1);
    A.topLeftCorner(m, n) = p.G;
    A.col(n).head(m).setConstant(-1.0);
    b.head(m) = p.w;
    A(m, n) = -1.0;
    Vector c = Vector::Zero(n + 1);
    c(n) = 1.0;
    const LpResult lp = lp_minimize(c, A, b);
    if (lp.status != LpStatus::optimal || lp.x(n) > tol::phase1)
        throw Error(ErrorKind::infeasible, "phase-1 objective " + std::to_string(lp.x.size() > n ? lp.x(n) : -1.0));
    return lp.x.head(n);
}

}  // namespace

QpSolution qp_solve(const QpProblem& p) {
    validate(p);
    return qp_solve(p, CholeskyFactor(p.H));
}

QpSolution qp_solve(const QpProblem& p, const CholeskyFactor& factor) {
    validate(p);
    const Eigen::Index n = p.H.rows();
    const Eigen::Index m = p.G.rows();

    Vector z = -factor.solve(p.f);
    if (m > 0 && (p.G * z - p.w).maxCoeff() > tol::feasibility) z = phase_one(p);

    std::vector<int> working;
    std::vector<bool> in_working(m, false);
    Vector lambda;
    const long max_iter = 100L * (m + n);
    bool degenerate = false;

    QpSolution sol;
    for (long iter = 0;; ++iter) {
        if (iter >= max_iter) throw Error(ErrorKind::max_iterations, "active-set pivot limit reached");
        sol.iterations = static_cast<int>(iter);

        const Vector g = p.H * z + p.f;
        const auto k = static_cast<Eigen::Index>(working.size());
        Vector step;
        if (k == 0) {
            step = -factor.solve(g);
            lambda.resize(0);
        } else {
            Matrix A(k, n);
            for (Eigen::Index r = 0; r < k; ++r) A.row(r) = p.G.row(working[r]);
            const Matrix HinvAt = factor.solve(Matrix(A.transpose()));
            const Vector Hinvg = factor.solve(g);
            const Matrix M = A * HinvAt;
            lambda = -M.ldlt().solve(A * Hinvg);
            step = -(Hinvg + HinvAt * lambda);
        }

        const double znorm = 1.0 + z.cwiseAbs().maxCoeff();
        if (step.cwiseAbs().maxCoeff() <= 1e-11 * znorm) {
            // Stationary on the working set: check multiplier signs.
            Eigen::Index drop = -1;
            double most_negative = -tol::dual;
            for (Eigen::Index r = 0; r < k; ++r) {
                if (lambda(r) < most_negative) {
                    // Dantzig choice until degeneracy shows up, then lowest index.
                    if (degenerate) {
                        if (drop < 0 || working[r] < working[drop]) drop = r;
                    } else {
                        most_negative = lambda(r);
                        drop = r;
                    }
                }
            }
            if (drop < 0) break;
            in_working[working[drop]] = false;
            working.erase(working.begin() + drop);
            continue;
        }

        double alpha = 1.0;
        int blocking = -1;
        const Vector Gp = p.G * step;
        const Vector slack = p.w - p.G * z;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (in_working[i] || Gp(i) <= 1e-14 * znorm) continue;
            const double ratio = std::max(slack(i), 0.0) / Gp(i);
            if (ratio < alpha || (ratio == alpha && blocking >= 0 && i < blocking)) {
                alpha = ratio;
                blocking = static_cast<int>(i);
            }
        }
        if (blocking >= 0 && alpha <= 1e-14) degenerate = true;
        z += alpha * step;
        if (blocking >= 0) {
            working.push_back(blocking);
            in_working[blocking] = true;
        }
    }

    sol.z = z;
    sol.duals = Vector::Zero(m);
    for (std::size_t r = 0; r < working.size(); ++r) sol.duals(working[r]) = lambda(static_cast<Eigen::Index>(r));
    sol.active_set = working;
    std::sort(sol.active_set.begin(), sol.active_set.end());
    sol.objective = 0.5 * z.dot(p.H * z) + p.f.dot(z);
    return sol;
}

}  // namespace exmpc
