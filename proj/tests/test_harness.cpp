#include <doctest.h>

#include "exmpc/error.hpp"
#include "exmpc/harness.hpp"

#include <cmath>
#include <sstream>

using namespace exmpc;

namespace {

const TunablePair& boundary_pair() {
    static const TunablePair pair = build_pair(default_paper_scenario());
    return pair;
}

Scenario with_mode(Scenario sc, ControllerMode m, double w = 0.0) {
    sc.mode = {m, w};
    return sc;
}

std::string csv_of(const ScenarioResult& r) {
    std::ostringstream o;
    write_csv(r, o);
    return o.str();
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::io_error;
}

}  // namespace

TEST_CASE("default scenario") {
    const Scenario sc = default_paper_scenario();
    const std::vector<std::pair<double, double>> schedule{{0, 35}, {200, 45}, {800, 50}, {1400, 45}, {2000, 35}};
    CHECK(sc.schedule == schedule);
    CHECK(sc.duration == 2600.0);
    CHECK(sc.mpc.N == 20);
    CHECK(sc.mpc.Qy_lower == 100.0);
    CHECK(sc.mpc.Qy_upper == 1000.0);
    CHECK(sc.mpc.QI == 1.0);
    CHECK(sc.mpc.R == 10.0);
    CHECK(sc.mpc.u_min == -15.0);
    CHECK(sc.mpc.u_max == 65.0);
    CHECK(sc.mpc.y_min == -15.0);
    CHECK(sc.mpc.y_max == 20.0);
    CHECK(sc.tuner.mode == RhoMode::step_change);
    CHECK(sc.tuner.delta_max == 15.0);
    CHECK(sc.tuner.splits == std::vector<double>{0.5});
    CHECK(sc.mode.mode == ControllerMode::self_tuned);
    CHECK(sc.reference_at(199.0) == 35.0);
    CHECK(sc.reference_at(200.0) == 45.0);
    CHECK(sc.reference_at(2599.0) == 35.0);
}

TEST_CASE("constant reference at the steady state stays put") {
    Scenario sc = default_paper_scenario();
    sc.schedule = {{0.0, 35.0}};
    sc.duration = 300.0;
    const ScenarioResult r = run(sc, boundary_pair());
    REQUIRE(r.records.size() == 300);
    for (const auto& rec : r.records) {
        CHECK(rec.T == 35.0);
        CHECK(std::abs(rec.u_dev) <= 1e-9);
        CHECK(rec.rho == 0.0);
        CHECK(rec.rho_tilde == 0.0);
    }
    CHECK(r.segments.empty());
    CHECK(r.total_sse == doctest::Approx(0.0));
}

TEST_CASE("self-tuned trace on the default scenario") {
    const ScenarioResult r = run(default_paper_scenario(), boundary_pair());
    REQUIRE(r.records.size() == 2600);
    const double expected[] = {1.0 / 3.0, 1.0 / 6.0, 2.0 / 3.0, 5.0 / 6.0};
    const int at[] = {200, 800, 1400, 2000};
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(r.records[at[i]].rho_tilde - expected[i]) <= 1e-12);
        CHECK(r.records[at[i] - 1].rho_tilde == (i == 0 ? 0.0 : r.records[at[i - 1]].rho_tilde));
    }
    CHECK(r.records[1399].Qy_eff < 550.0);
    CHECK(r.records[1400].Qy_eff > 550.0);
    CHECK(r.input_clips == 0);
    REQUIRE(r.segments.size() == 4);
    for (const auto& rec : r.records) {
        CHECK(rec.U >= 20.0);
        CHECK(rec.U <= 100.0);
        CHECK(rec.u_dev >= std::min(rec.u_L, rec.u_U) - 1e-12);
        CHECK(rec.u_dev <= std::max(rec.u_L, rec.u_U) + 1e-12);
    }
}

TEST_CASE("fixed weight 0 reproduces the lower controller") {
    const Scenario sc = default_paper_scenario();
    const ScenarioResult lower = run(with_mode(sc, ControllerMode::lower), boundary_pair());
    const ScenarioResult fixed0 = run(with_mode(sc, ControllerMode::fixed, 0.0), boundary_pair());
    REQUIRE(lower.records.size() == fixed0.records.size());
    for (std::size_t k = 0; k < lower.records.size(); ++k) {
        CHECK(lower.records[k].T == fixed0.records[k].T);
        CHECK(lower.records[k].U == fixed0.records[k].U);
    }
}

TEST_CASE("linear plant tracks without offset in every mode") {
    Scenario sc = default_paper_scenario();
    sc.plant = sc.plant.linearized();
    for (auto m : {ControllerMode::lower, ControllerMode::upper, ControllerMode::self_tuned}) {
        const ScenarioResult r = run(with_mode(sc, m), boundary_pair());
        CAPTURE(r.mode);
        for (int end : {199, 799, 1399, 1999, 2599}) CHECK(std::abs(r.records[end].T - r.records[end].T_ref) <= 0.1);
        CHECK(r.anti_windup.empty());
    }
}

TEST_CASE("runs are reproducible, including with noise") {
    Scenario sc = default_paper_scenario();
    sc.plant.noise_std = 0.05;
    sc.seed = 7;
    CHECK(csv_of(run(sc, boundary_pair())) == csv_of(run(sc, boundary_pair())));
    Scenario other = sc;
    other.seed = 8;
    CHECK(csv_of(run(sc, boundary_pair())) != csv_of(run(other, boundary_pair())));
}

TEST_CASE("controllers for another model are rejected") {
    Scenario sc = default_paper_scenario();
    sc.mpc.model_tau = 6.0;
    CHECK(kind_of([&] { run(sc, boundary_pair()); }) == ErrorKind::fingerprint_mismatch);
}

TEST_CASE("scenario validation") {
    Scenario sc = default_paper_scenario();
    sc.schedule = {{0.0, 35.0}, {100.0, 60.0}};
    CHECK(kind_of([&] { sc.validate(); }) == ErrorKind::config_error);
    sc.schedule = {{0.0, 35.0}, {100.0, 40.0}, {100.0, 45.0}};
    CHECK(kind_of([&] { sc.validate(); }) == ErrorKind::config_error);
    sc = default_paper_scenario();
    sc.plant.Ts = 0.5;
    CHECK(kind_of([&] { sc.validate(); }) == ErrorKind::config_error);
}

TEST_CASE("CSV layout and read-back") {
    const ScenarioResult r = run(default_paper_scenario(), boundary_pair());
    const std::string csv = csv_of(r);
    CHECK(csv.rfind("t,T_ref,T,U,u_dev,rho,rho_tilde,Qy_eff,region_L,region_U\n", 0) == 0);
    const auto path = std::filesystem::temp_directory_path() / "exmpc_self_tuned.csv";
    write_csv(r, path);
    const ScenarioResult back = read_csv(path);
    REQUIRE(back.records.size() == r.records.size());
    for (std::size_t k = 0; k < r.records.size(); ++k) {
        CHECK(back.records[k].T == r.records[k].T);
        CHECK(back.records[k].U == r.records[k].U);
        CHECK(back.records[k].region_U == r.records[k].region_U);
    }
    CHECK(back.total_sse == r.total_sse);
    REQUIRE(back.segments.size() == r.segments.size());
    CHECK(back.segments[2].sse == r.segments[2].sse);
    std::filesystem::remove(path);

    std::ostringstream crit, table, cmp;
    write_criteria_csv({r}, crit);
    CHECK(crit.str().rfind("mode,segment,t0,t1,T_ref_before,T_ref_after,sse,overshoot_pct,settling_s\n", 0) == 0);
    write_criteria_table(r, table);
    CHECK(table.str().find("45->50") != std::string::npos);
    write_comparison_table(r, r, r, cmp);
    CHECK(cmp.str().find("total") != std::string::npos);
}

TEST_CASE("scenario file") {
    std::istringstream ok(R"([scenario]
duration = 500
schedule = 0:35, 100:40
mode = fixed:0.25
seed = 3

[plant]
kappa_gain = 0
tau_cool = 5.7

[mpc]
N = 10
Qy_upper = 500
stages = literal

[tuner]
splits = 0.3, 0.6
direction = reversed
)");
    const Scenario sc = parse_scenario(ok);
    CHECK(sc.duration == 500.0);
    CHECK(sc.schedule.size() == 2);
    CHECK(sc.schedule[1] == std::pair<double, double>{100.0, 40.0});
    CHECK(sc.mode.mode == ControllerMode::fixed);
    CHECK(sc.mode.fixed_weight == 0.25);
    CHECK(sc.seed == 3);
    CHECK(sc.plant.kappa_gain == 0.0);
    CHECK(sc.mpc.N == 10);
    CHECK(sc.mpc.Qy_upper == 500.0);
    CHECK(sc.mpc.Qy_lower == 100.0);
    CHECK(sc.mpc.stages == StageRange::literal);
    CHECK(sc.tuner.splits == std::vector<double>{0.3, 0.6});
    CHECK(sc.tuner.direction == TuningDirection::reversed);

    auto error_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_scenario(in, "scen.ini");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::config_error);
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of("[mpc]\nHorizon = 3\n").find("unknown key 'Horizon' in [mpc]") != std::string::npos);
    CHECK(error_of("[extra]\na = 1\n").find("unknown section [extra]") != std::string::npos);
    CHECK(error_of("[mpc]\nN = ten\n").find("[mpc] N") != std::string::npos);
    CHECK(error_of("[mpc]\nN = 3\nbroken line\n").find("scen.ini:3") != std::string::npos);
    CHECK(error_of("[scenario]\nmode = medium\n").find("unknown mode") != std::string::npos);
    CHECK(error_of("[scenario]\nschedule = 0:35, 10:90\n").find("outside") != std::string::npos);
}

TEST_CASE("mode names") {
    CHECK(ModeSpec::parse("lower").mode == ControllerMode::lower);
    CHECK(ModeSpec::parse("upper").fixed_weight == 1.0);
    CHECK(ModeSpec::parse("fixed:0.5").name() == "fixed:0.5");
    CHECK_THROWS_AS(ModeSpec::parse("fixed:2"), Error);
    CHECK_THROWS_AS(ModeSpec::parse("fixed:"), Error);
}
