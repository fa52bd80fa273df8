#include <doctest.h>

#include "exmpc/error.hpp"
#include "exmpc/mpqp.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace exmpc;
using fixture::heat_exchanger_spec;
using fixture::scalar;

namespace {

const ParametricQp& boundary_qp(double qy) {
    static const ParametricQp lower = condense(heat_exchanger_spec(100.0));
    static const ParametricQp upper = condense(heat_exchanger_spec(1000.0));
    return qy == 100.0 ? lower : upper;
}

const ExplicitController& boundary_ctrl(double qy) {
    static const ExplicitController lower = explicit_solve(boundary_qp(100.0));
    static const ExplicitController upper = explicit_solve(boundary_qp(1000.0));
    return qy == 100.0 ? lower : upper;
}

Vector uniform_in(const Polyhedron& box, std::mt19937_64& rng) {
    const auto [lo, hi] = box.bounding_box();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector t(lo.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
    return t;
}

double cost(const ParametricQp& p, const Vector& U, const Vector& theta) {
    return 0.5 * U.dot(p.H * U) + theta.dot(p.F * U);
}

}  // namespace

TEST_CASE("condense: N = 1 matches the hand expansion") {
    const MpcSpec spec = heat_exchanger_spec(100.0, 1);
    const double A = spec.model.At(0, 0), B = spec.model.Bt(0, 0);
    const ParametricQp p = condense(spec);
    REQUIRE(p.H.rows() == 1);
    REQUIRE(p.theta_dim == 3);
    // y₁ = A x₀ + B u₀; x_I,1 = x_I,0 + (y_ref − x₀) does not depend on u₀.
    CHECK(p.H(0, 0) == doctest::Approx(2.0 * (10.0 + 100.0 * B * B)).epsilon(1e-14));
    CHECK(p.F(0, 0) == doctest::Approx(2.0 * 100.0 * A * B).epsilon(1e-14));
    CHECK(p.F(1, 0) == 0.0);
    CHECK(p.F(2, 0) == doctest::Approx(-2.0 * 100.0 * B).epsilon(1e-14));

    // Rows: u ≤ 65, −u ≤ 15, y₁ ≤ 20, −y₁ ≤ 15.
    REQUIRE(p.G.rows() == 4);
    CHECK(p.G(0, 0) == 1.0);
    CHECK(p.w(0) == 65.0);
    CHECK(p.G(1, 0) == -1.0);
    CHECK(p.w(1) == 15.0);
    CHECK(p.G(2, 0) == doctest::Approx(B));
    CHECK(p.w(2) == 20.0);
    CHECK(p.S(2, 0) == doctest::Approx(-A));
    CHECK(p.G(3, 0) == doctest::Approx(-B));
    CHECK(p.w(3) == 15.0);
    CHECK(p.S(3, 0) == doctest::Approx(A));
    CHECK(p.S.col(1).isZero());
    CHECK(p.S.col(2).isZero());
}

TEST_CASE("condense: N = 1 with the printed input block and with literal stages") {
    MpcSpec spec = heat_exchanger_spec(100.0, 1);
    const double B = spec.model.Bt(0, 0);
    spec.model = augment(fo_to_ss(0.24, 5.7, 1.0), IntegratorCoupling::printed_input_block);
    CHECK(condense(spec).H(0, 0) == doctest::Approx(2.0 * (10.0 + 100.0 * B * B + 1.0)).epsilon(1e-14));

    spec = heat_exchanger_spec(100.0, 1);
    spec.stages = StageRange::literal;
    const ParametricQp p = condense(spec);
    CHECK(p.H(0, 0) == doctest::Approx(20.0));
    CHECK(p.F.isZero());
}

TEST_CASE("condense: N = 20 Hessian is symmetric positive definite") {
    const ParametricQp& p = boundary_qp(100.0);
    REQUIRE(p.H.rows() == 20);
    CHECK((p.H - p.H.transpose()).norm() == 0.0);
    CHECK_NOTHROW(CholeskyFactor(p.H));
    CHECK(p.G.rows() == 80);
    const auto [lo, hi] = p.theta_box.bounding_box();
    CHECK(lo(0) == -15.0);
    CHECK(hi(0) == 20.0);
    CHECK(lo(1) == -250.0);
    CHECK(hi(1) == 250.0);
    CHECK(lo(2) == -15.0);
    CHECK(hi(2) == 20.0);
}

TEST_CASE("condense: only R penalized gives decoupled inputs") {
    MpcSpec spec = heat_exchanger_spec(0.0, 6);
    spec.QI = scalar(0.0);
    const ParametricQp p = condense(spec);
    CHECK(p.H.isApprox(20.0 * Matrix::Identity(6, 6)));
    CHECK(p.F.isZero());
}

TEST_CASE("condense: multi-output stage cost against direct simulation") {
    // Two-state, two-input, two-output plant: check ½UᵀHU + θᵀFU + c(θ)
    // against the summed stage cost of a forward simulation.
    StateSpace ss;
    ss.A.resize(2, 2);
    ss.A << 0.9, 0.1, -0.05, 0.8;
    ss.B.resize(2, 2);
    ss.B << 0.5, 0.0, 0.1, 0.3;
    ss.C = Matrix::Identity(2, 2);
    ss.Ts = 0.5;
    MpcSpec spec;
    spec.model = augment(ss);
    spec.N = 4;
    spec.Qy = Vector::Constant(2, 3.0);
    spec.QI = Vector::Constant(2, 0.5);
    spec.R = Vector::Constant(2, 0.7);
    spec.u_min = Vector::Constant(2, -1.0);
    spec.u_max = Vector::Constant(2, 1.0);
    spec.y_min = Vector::Constant(2, -2.0);
    spec.y_max = Vector::Constant(2, 2.0);
    const ParametricQp p = condense(spec);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    auto sim_cost = [&](const Vector& U, const Vector& theta) {
        Vector x = theta.head(4);
        const Vector yref = theta.tail(2);
        double J = 0.0;
        for (int k = 0; k < spec.N; ++k) {
            const Vector u = U.segment(2 * k, 2);
            x = spec.model.At * x + spec.model.Bt * u + spec.model.Et * yref;
            const Vector e = spec.model.Ct * x - yref;
            J += e.dot(spec.Qy.asDiagonal() * e) + x.tail(2).dot(spec.QI.asDiagonal() * x.tail(2)) +
                 u.dot(spec.R.asDiagonal() * u);
        }
        return J;
    };
    for (int trial = 0; trial < 20; ++trial) {
        Vector theta(6), U(8), V(8);
        for (auto& v : theta) v = nd(rng);
        for (auto& v : U) v = nd(rng);
        for (auto& v : V) v = nd(rng);
        // Differences cancel the θ-only constant.
        const double lhs = sim_cost(U, theta) - sim_cost(V, theta);
        const double rhs = cost(p, U, theta) - cost(p, V, theta);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }

    // Output rows: y_k ≤ y_max along the simulated trajectory.
    Vector theta(6), U(8);
    for (auto& v : theta) v = nd(rng);
    for (auto& v : U) v = nd(rng);
    Vector x = theta.head(4);
    const Vector lhs = p.G * U - p.S * theta;
    for (int k = 0; k < spec.N; ++k) {
        x = spec.model.At * x + spec.model.Bt * U.segment(2 * k, 2) + spec.model.Et * theta.tail(2);
        const Vector y = spec.model.Ct * x;
        for (int i = 0; i < 2; ++i) {
            CHECK(lhs(16 + 2 * k + i) == doctest::Approx(y(i)).epsilon(1e-12));
            CHECK(lhs(24 + 2 * k + i) == doctest::Approx(-y(i)).epsilon(1e-12));
        }
    }
}

TEST_CASE("condense: invalid specifications") {
    MpcSpec spec = heat_exchanger_spec(100.0);
    spec.R = scalar(0.0);
    CHECK_THROWS_AS(condense(spec), Error);
    spec = heat_exchanger_spec(100.0);
    spec.u_min = scalar(1.0);
    CHECK_THROWS_AS(condense(spec), Error);
    spec = heat_exchanger_spec(100.0);
    spec.Qy = Vector::Constant(2, 1.0);
    try {
        condense(spec);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dimension_mismatch);
    }
}

TEST_CASE("region_law reproduces the KKT oracle") {
    const ParametricQp& p = boundary_qp(100.0);
    const IndexSet set{0, 3, 41};
    const AffineLaw law = region_law(p, set);
    const auto ref = oracle::set_law(p.H, p.F, p.G, p.w, p.S, set);
    REQUIRE(ref);
    CHECK((law.K - ref->K).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((law.k - ref->k).lpNorm<Eigen::Infinity>() < 1e-9);
    for (int i = 0; i < 3; ++i) {
        CHECK((law.L.row(i) - ref->L.row(set[i])).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK(std::abs(law.l(i) - ref->l(set[i])) < 1e-9);
    }
    // u₀ ≤ 65 together with −u₀ ≤ 15 is dependent.
    CHECK_THROWS_AS(region_law(p, IndexSet{0, 20}), Error);
}

TEST_CASE("explicit_solve: unconstrained problem has one LQ region") {
    MpcSpec spec = heat_exchanger_spec(100.0, 5);
    spec.u_min = scalar(-1e7);
    spec.u_max = scalar(1e7);
    spec.y_min = scalar(-std::numeric_limits<double>::infinity());
    spec.y_max = scalar(std::numeric_limits<double>::infinity());
    spec.state_box = Box{scalar(-10.0), scalar(10.0)};
    spec.reference_box = Box{scalar(-10.0), scalar(10.0)};
    spec.integrator_bound = 10.0;
    const ParametricQp p = condense(spec);
    const ExplicitController c = explicit_solve(p);
    REQUIRE(c.regions().size() == 1);
    const Matrix lq = -p.H.ldlt().solve(Matrix(p.F.transpose()));
    CHECK((c.regions()[0].F - lq.topRows(1)).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(c.regions()[0].g.isZero());
    CHECK(c.regions()[0].active_set.empty());
    const OracleReport rep = verify_against_oracle(c, p, 200, 5);
    CHECK(rep.max_deviation <= 1e-9);
    CHECK(rep.coverage_gaps == 0);
}

TEST_CASE("explicit_solve: scalar toy partition equals exhaustive enumeration") {
    // x⁺ = 0.9x + u, N = 2, cost Σ x_k² + 0.5 u_k², u_k ≥ −1, θ = x₀ ∈ [−10, 10].
    const double a = 0.9, r = 0.5;
    ParametricQp p;
    Matrix Gam(2, 2);
    Gam << 1, 0, a, 1;
    Vector phi(2);
    phi << a, a * a;
    p.H = 2.0 * (Gam.transpose() * Gam + r * Matrix::Identity(2, 2));
    p.F = 2.0 * phi.transpose() * Gam;
    p.G = -Matrix::Identity(2, 2);
    p.w = Vector::Ones(2);
    p.S = Matrix::Zero(2, 1);
    p.theta_dim = 1;
    p.n_u = 1;
    p.theta_box = Polyhedron::box(scalar(-10.0), scalar(10.0));
    p.meta.u_min = scalar(-1e9);
    p.meta.u_max = scalar(1e9);

    const ExplicitController c = explicit_solve(p);

    // Oracle: every subset of the two rows, with its interval in θ.
    std::set<IndexSet> expected;
    for (const IndexSet set : {IndexSet{}, IndexSet{0}, IndexSet{1}, IndexSet{0, 1}}) {
        const auto law = oracle::set_law(p.H, p.F, p.G, p.w, p.S, set);
        REQUIRE(law);
        int hits = 0;
        for (int i = 0; i <= 20000; ++i) {
            Vector t = scalar(-10.0 + 20.0 * i / 20000.0);
            if (law->valid_at(p.G, p.w, p.S, t, -1e-12)) ++hits;
        }
        if (hits > 1) expected.insert(set);
    }
    std::set<IndexSet> got;
    for (const auto& reg : c.regions()) got.insert(reg.active_set);
    CHECK(got == expected);
    CHECK(c.regions().size() == expected.size());

    std::mt19937_64 rng(11);
    for (int s = 0; s < 2000; ++s) {
        const Vector t = uniform_in(p.theta_box, rng);
        const auto qp = oracle::brute_force_qp(p.H, p.F.transpose() * t, p.G, p.w + p.S * t);
        REQUIRE(qp);
        const auto ev = c.evaluate(t);
        CHECK(std::abs(ev.u(0) - qp->z(0)) < 1e-9);
    }
}

TEST_CASE("explicit_solve: boundary controllers agree with the QP oracle") {
    for (double qy : {100.0, 1000.0}) {
        CAPTURE(qy);
        const ExplicitController& c = boundary_ctrl(qy);
        CHECK(c.regions().size() > 50);
        const OracleReport rep = verify_against_oracle(c, boundary_qp(qy), 1000, 2024);
        CHECK(rep.coverage_gaps == 0);
        CHECK(rep.spurious_coverage == 0);
        CHECK(rep.max_deviation <= 1e-6);
        for (const auto& reg : c.regions()) {
            CHECK(reg.region.chebyshev().kind == Feasibility::full_dimensional);
            CHECK(reg.region.rows() == reg.region.minimize().rows());
        }
    }
}

TEST_CASE("explicit_solve: continuity across facets") {
    const ExplicitController& c = boundary_ctrl(100.0);
    std::mt19937_64 rng(17);
    int checked = 0;
    while (checked < 200) {
        Vector a = uniform_in(boundary_qp(100.0).theta_box, rng);
        Vector b = uniform_in(boundary_qp(100.0).theta_box, rng);
        int ia = c.locate(a), ib = c.locate(b);
        REQUIRE(ia >= 0);
        REQUIRE(ib >= 0);
        if (ia == ib) continue;
        for (int it = 0; it < 60; ++it) {
            const Vector m = 0.5 * (a + b);
            const int im = c.locate(m);
            if (im == ia) {
                a = m;
            } else {
                b = m;
                ib = im;
            }
        }
        const Vector m = 0.5 * (a + b);
        const double gap = (c.regions()[ia].law(m) - c.regions()[ib].law(m)).lpNorm<Eigen::Infinity>();
        CHECK(gap <= 1e-6);
        ++checked;
    }
}

TEST_CASE("explicit_solve: full sequences are feasible and optimal") {
    for (double qy : {100.0, 1000.0}) {
        CAPTURE(qy);
        const ParametricQp& p = boundary_qp(qy);
        const ExplicitController& c = boundary_ctrl(qy);
        std::mt19937_64 rng(23);
        for (int s = 0; s < 1000; ++s) {
            const Vector t = uniform_in(p.theta_box, rng);
            const int idx = c.locate(t);
            REQUIRE(idx >= 0);
            const Vector U = region_law(p, c.regions()[idx].active_set).optimizer(t);
            CHECK((p.G * U - p.w - p.S * t).maxCoeff() <= 1e-8);
            const QpSolution qp = qp_solve(p.at(t));
            const double ce = cost(p, U, t), cq = cost(p, qp.z, t);
            CHECK(std::abs(ce - cq) <= 1e-8 * std::max(1.0, std::abs(cq)));
        }
    }
}

TEST_CASE("explicit_solve: identical inputs give identical partitions") {
    const ParametricQp p = condense(heat_exchanger_spec(100.0, 8));
    const ExplicitController c1 = explicit_solve(p);
    const ExplicitController c2 = explicit_solve(p);
    CHECK(c1 == c2);
}

TEST_CASE("explicit_solve: region cap raises ExplorationOverflow") {
    ExploreOptions opt;
    opt.max_regions = 3;
    try {
        explicit_solve(boundary_qp(100.0), opt);
        FAIL("expected ExplorationOverflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::exploration_overflow);
    }
}

TEST_CASE("verify_against_oracle: infeasible parameters are not mismatches") {
    MpcSpec spec = heat_exchanger_spec(100.0, 6);
    spec.state_box = Box{scalar(-40.0), scalar(40.0)};
    const ParametricQp p = condense(spec);
    ExploreReport report;
    const ExplicitController c = explicit_solve(p, {}, &report);
    const OracleReport rep = verify_against_oracle(c, p, 1000, 9);
    CHECK(rep.infeasible > 0);
    CHECK(rep.feasible > 0);
    CHECK(rep.infeasible + rep.feasible == rep.samples);
    CHECK(rep.spurious_coverage == 0);
    CHECK(rep.coverage_gaps == 0);
    CHECK(rep.max_deviation <= 1e-6);
}
