#pragma once

// Dense linear algebra and the two small solvers the rest of the toolkit
// builds on: a simplex LP (used for Chebyshev centers and redundancy checks)
// and a primal active-set QP for strictly convex problems.

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace exmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<int>;

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double feasibility = 1e-8;
inline constexpr double rank_relative = 1e-12;
inline constexpr double chebyshev_radius = 1e-9;
inline constexpr double pivot_relative = 1e-12;
inline constexpr double dual = 1e-9;
inline constexpr double phase1 = 1e-9;
inline constexpr double simplex_pivot = 1e-10;
inline constexpr double symmetry_relative = 1e-10;
inline constexpr double membership = 1e-8;
}  // namespace tol

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);
void require_finite(const Matrix& m, const char* name);
void require_finite(const Vector& v, const char* name);

/// Cholesky factor L of an SPD matrix (H = L Lᵀ), reusable for many solves.
class CholeskyFactor {
public:
    /// Throws NotPositiveDefinite when a pivot falls below
    /// pivot_relative * max(diag(H)).
    explicit CholeskyFactor(const Matrix& H);

    Vector solve(const Vector& rhs) const;
    Matrix solve(const Matrix& rhs) const;
    int size() const { return static_cast<int>(lower_.rows()); }
    const Matrix& lower() const { return lower_; }

private:
    Matrix lower_;
};

Vector cholesky_solve(const Matrix& H, const Vector& rhs);

// ---------------------------------------------------------------------------
// Linear programming

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector x;  ///< optimal point; for `unbounded`, the last feasible vertex
    double objective = 0.0;
};

/// min cᵀx subject to A x <= b with x free. Two-phase dense tableau simplex.
LpResult lp_minimize(const Vector& c, const Matrix& A, const Vector& b);

enum class Feasibility { full_dimensional, lower_dimensional, empty };

struct ChebyshevBall {
    Feasibility kind = Feasibility::empty;
    Vector center;  ///< empty vector when kind == empty
    double radius = 0.0;
};

/// Largest ball inside {x : G x <= w}. The radius is capped at `radius_cap`
/// so unbounded sets still return a deep feasible point.
ChebyshevBall lp_feasible(const Matrix& G, const Vector& w, double radius_cap = 1e6);

// ---------------------------------------------------------------------------
// Quadratic programming

/// minimize ½ zᵀHz + fᵀz  s.t.  G z <= w
struct QpProblem {
    Matrix H;
    Vector f;
    Matrix G;
    Vector w;
};

struct QpSolution {
    Vector z;
    IndexSet active_set;  ///< final working set, ascending
    Vector duals;         ///< one multiplier per row of G, zero when inactive
    double objective = 0.0;
    int iterations = 0;
};

/// Throws Infeasible, MaxIterations, NotPositiveDefinite, DimensionMismatch.
QpSolution qp_solve(const QpProblem& p);

/// Same as qp_solve with a precomputed factor of p.H.
QpSolution qp_solve(const QpProblem& p, const CholeskyFactor& factor);

}  // namespace exmpc
