#pragma once

#include "exmpc/numkit.hpp"

#include <cstdint>
#include <utility>

namespace exmpc {

/// Closed halfspace polyhedron {θ : Aθ <= b} with unit-norm rows.
class Polyhedron {
public:
    Polyhedron() = default;

    /// Normalizes every row of (A | b) to |A_row|₂ = 1. Zero rows are rejected.
    Polyhedron(Matrix A, Vector b);

    static Polyhedron box(const Vector& lower, const Vector& upper);

    /// Takes rows that are already unit-norm (e.g. read back from a file) as is.
    static Polyhedron from_normalized(Matrix A, Vector b);

    int dim() const { return static_cast<int>(A_.cols()); }
    int rows() const { return static_cast<int>(A_.rows()); }
    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }

    bool contains(const Vector& theta, double tolerance = tol::membership) const;
    bool is_empty() const;
    ChebyshevBall chebyshev() const;

    /// Same point set with every redundant row removed; row order preserved.
    Polyhedron minimize() const;

    /// Row-stacked intersection.
    Polyhedron intersect(const Polyhedron& other) const;

    /// Coordinate-wise bounds (may be infinite for unbounded sets).
    std::pair<Vector, Vector> bounding_box() const;

    bool operator==(const Polyhedron& other) const = default;

private:
    Matrix A_;
    Vector b_;
};

/// Monte-Carlo mutual containment over `n_samples` points in the joint
/// bounding box; exact LP-based containment when n_samples == 0.
bool same_set(const Polyhedron& P, const Polyhedron& Q, int n_samples, std::uint64_t seed = 1);

/// Largest value of direction·θ over P, or +inf when unbounded.
double support(const Polyhedron& P, const Vector& direction);

}  // namespace exmpc
