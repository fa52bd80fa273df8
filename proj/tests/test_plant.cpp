#include <doctest.h>

#include "exmpc/error.hpp"
#include "exmpc/metrics.hpp"
#include "exmpc/plant.hpp"

#include <cmath>
#include <random>

using namespace exmpc;

namespace {

double hold(const SurrogateConfig& cfg, double T0, double U, int steps, std::vector<double>* trace = nullptr) {
    std::mt19937_64 rng(0);
    PlantState s{T0};
    for (int k = 0; k < steps; ++k) {
        s = step(cfg, s, U, rng);
        if (trace) trace->push_back(s.T);
    }
    return s.T;
}

double settle(const std::vector<double>& trace, double before, double after) {
    StepSegment seg;
    seg.y_ref_before = before;
    seg.y_ref_after = after;
    for (std::size_t k = 0; k < trace.size(); ++k) seg.samples.emplace_back(static_cast<double>(k + 1), trace[k]);
    return settling_time(seg).value();
}

}  // namespace

TEST_CASE("steady state is an equilibrium") {
    const SurrogateConfig cfg;
    CHECK(hold(cfg, 35.0, 35.0, 100) == 35.0);
    CHECK(cfg.equilibrium(35.0) == 35.0);
}

TEST_CASE("linear surrogate converges to the first-order gain") {
    const SurrogateConfig lin = SurrogateConfig{}.linearized();
    CHECK(hold(lin, 35.0, 75.0, 400) == doctest::Approx(35.0 + 0.24 * 40.0).epsilon(1e-12));
    CHECK(lin.equilibrium(75.0) == doctest::Approx(44.6).epsilon(1e-12));
}

TEST_CASE("gain droop lowers the hot equilibrium") {
    const SurrogateConfig cfg;
    const double T = hold(cfg, 35.0, 75.0, 400);
    CHECK(T < 44.6);
    CHECK(T == doctest::Approx(cfg.equilibrium(75.0)).epsilon(1e-9));
    CHECK(cfg.equilibrium(100.0) < 50.0);
}

TEST_CASE("gain floor") {
    SurrogateConfig cfg;
    cfg.kappa_gain = 0.5;
    CHECK(cfg.gain(100.0) == doctest::Approx(0.024));
    CHECK(cfg.gain(35.0) == 0.24);
    CHECK(cfg.gain(20.0) > 0.24);
    CHECK(hold(cfg, 35.0, 100.0, 2000) == doctest::Approx(cfg.equilibrium(100.0)).epsilon(1e-9));
}

TEST_CASE("linear_step") {
    const StateSpace ss = fo_to_ss(0.24, 5.7, 1.0);
    CHECK(linear_step(ss, Vector::Zero(1), Vector::Zero(1))(0) == 0.0);
    CHECK(linear_step(ss, Vector::Zero(1), Vector::Constant(1, 10.0))(0) == doctest::Approx(0.39).epsilon(0.015));
    CHECK(std::abs(linear_step(ss, Vector::Ones(1), Vector::Zero(1))(0) - 0.839) < 5e-4);
    CHECK_THROWS_AS(linear_step(ss, Vector::Zero(2), Vector::Zero(1)), Error);
}

TEST_CASE("linearized surrogate matches the discrete model") {
    const SurrogateConfig lin = SurrogateConfig{}.linearized();
    const StateSpace ss = fo_to_ss(lin.K0, lin.tau_heat, lin.Ts);
    std::mt19937_64 rng(12), noise(0);
    std::uniform_real_distribution<double> U(20.0, 100.0);
    PlantState s;
    Vector x = Vector::Zero(1);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double u = U(rng);
        s = step(lin, s, u, noise);
        x = linear_step(ss, x, Vector::Constant(1, u - lin.U_steady));
        worst = std::max(worst, std::abs((s.T - lin.T_steady) - x(0)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("heating and cooling settle at different speeds") {
    SurrogateConfig cfg;
    cfg.kappa_gain = 0.0;
    std::vector<double> up, down;
    hold(cfg, 35.0, 45.0, 200, &up);
    hold(cfg, 35.0, 25.0, 200, &down);
    const double t_up = settle(up, 35.0, cfg.equilibrium(45.0));
    const double t_down = settle(down, 35.0, cfg.equilibrium(25.0));
    MESSAGE("settling up " << t_up << " s, down " << t_down << " s");
    CHECK(t_down >= 1.1 * t_up);

    // Same check on the default plant with droop.
    std::vector<double> up2, down2;
    hold(SurrogateConfig{}, 35.0, 45.0, 200, &up2);
    hold(SurrogateConfig{}, 35.0, 25.0, 200, &down2);
    CHECK(settle(down2, 35.0, SurrogateConfig{}.equilibrium(25.0)) >=
          1.1 * settle(up2, 35.0, SurrogateConfig{}.equilibrium(45.0)));
}

TEST_CASE("equilibrium is increasing in the input") {
    const SurrogateConfig cfg;
    double prev = -1e9;
    for (double U = 20.0; U <= 100.0; U += 0.5) {
        const double T = cfg.equilibrium(U);
        CHECK(T > prev);
        prev = T;
    }
}

TEST_CASE("input range is enforced") {
    std::mt19937_64 rng(1);
    const SurrogateConfig cfg;
    try {
        step(cfg, PlantState{}, 19.9, rng);
        FAIL("expected InputOutOfRange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::input_out_of_range);
    }
    CHECK_THROWS_AS(step(cfg, PlantState{}, 100.1, rng), Error);
    CHECK_NOTHROW(step(cfg, PlantState{}, 20.0, rng));
    CHECK_NOTHROW(step(cfg, PlantState{}, 100.0, rng));
}

TEST_CASE("temperature guard and noise") {
    SurrogateConfig cfg;
    cfg.kappa_gain = 0.0;
    cfg.K0 = 1.0;
    CHECK(hold(cfg, 35.0, 100.0, 100) == 70.0);

    SurrogateConfig noisy;
    noisy.noise_std = 0.5;
    std::mt19937_64 a(7), b(7);
    double sum2 = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const double Ta = step(noisy, PlantState{}, 35.0, a).T;
        CHECK(Ta == step(noisy, PlantState{}, 35.0, b).T);
        sum2 += (Ta - 35.0) * (Ta - 35.0);
    }
    CHECK(std::sqrt(sum2 / n) == doctest::Approx(0.5).epsilon(0.03));
}
