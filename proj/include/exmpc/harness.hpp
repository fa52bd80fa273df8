#pragma once

// Closed-loop scenarios: the heat-exchanger plant under the lower, upper,
// self-tuned or fixed-blend explicit controller.

#include "exmpc/metrics.hpp"
#include "exmpc/mpqp.hpp"
#include "exmpc/plant.hpp"
#include "exmpc/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace exmpc {

/// Controller settings in plant units; bounds are deviations from the
/// steady state.
struct MpcSettings {
    double model_gain = 0.24;
    double model_tau = 5.7;
    int N = 20;
    double Qy_lower = 100.0;
    double Qy_upper = 1000.0;
    double QI = 1.0;
    double R = 10.0;
    double u_min = -15.0, u_max = 65.0;
    double y_min = -15.0, y_max = 20.0;
    double integrator_bound = 250.0;
    StageRange stages = StageRange::shifted;
};

enum class ControllerMode { lower, upper, self_tuned, fixed };

struct ModeSpec {
    ControllerMode mode = ControllerMode::self_tuned;
    double fixed_weight = 0.0;  ///< upper-controller weight for `fixed`

    /// "lower", "upper", "self_tuned" or "fixed:<weight>". Throws ConfigError.
    static ModeSpec parse(const std::string& text);
    std::string name() const;
};

struct Scenario {
    double duration = 2600.0;  ///< s
    double Ts = 1.0;           ///< s
    std::vector<std::pair<double, double>> schedule;  ///< (t, T_ref °C)
    SurrogateConfig plant;
    MpcSettings mpc;
    SelfTuneConfig tuner;
    ModeSpec mode;
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;

    /// Reference at time t (last schedule entry with time <= t).
    double reference_at(double t) const;

    AugmentedModel model() const;
    MpcSpec mpc_spec(double qy) const;
};

Scenario default_paper_scenario();

/// Throws ConfigError with the offending line or key. Unknown sections and
/// keys are rejected.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::istream& in, const std::string& origin = "<input>");

/// Builds the lower and upper boundary controllers of a scenario.
TunablePair build_pair(const Scenario& sc, ExploreReport* lower_report = nullptr,
                       ExploreReport* upper_report = nullptr);

struct SampleRecord {
    double t = 0.0;
    double T_ref = 0.0;
    double T = 0.0;
    double U = 0.0;
    double u_dev = 0.0;
    double rho = 0.0;
    double rho_tilde = 0.0;
    double Qy_eff = 0.0;
    int region_L = -1;
    int region_U = -1;
    // Not written to CSV.
    double x_I = 0.0;
    double u_L = 0.0;
    double u_U = 0.0;
};

struct AntiWindupEvent {
    double t = 0.0;
    double unclamped = 0.0;
    double clamped = 0.0;
};

struct ScenarioResult {
    std::string mode;
    std::vector<SampleRecord> records;
    std::vector<SegmentCriteria> segments;
    double total_sse = 0.0;
    std::vector<AntiWindupEvent> anti_windup;
    int input_clips = 0;  ///< tolerance-level clips onto [20, 100] %
    double mean_eval_seconds = 0.0;
    double max_eval_seconds = 0.0;
};

/// Runs the closed loop. Throws FingerprintMismatch when the controllers were
/// built for another model, ParameterNotCovered with time and θ when the
/// loop leaves the partition.
ScenarioResult run(const Scenario& sc, const TunablePair& pair);

/// Segment criteria and total SSE from sampled (t, T_ref, T) columns.
void fill_criteria(ScenarioResult& result, double Ts);

inline constexpr const char* kCsvHeader = "t,T_ref,T,U,u_dev,rho,rho_tilde,Qy_eff,region_L,region_U";

void write_csv(const ScenarioResult& result, std::ostream& out);
void write_csv(const ScenarioResult& result, const std::filesystem::path& path);

/// Reads a trajectory CSV written by write_csv. Throws ConfigError.
ScenarioResult read_csv(const std::filesystem::path& path);

/// Per-segment criteria of several runs as CSV rows.
void write_criteria_csv(const std::vector<ScenarioResult>& results, std::ostream& out);

/// Aligned text table of the criteria of one run.
void write_criteria_table(const ScenarioResult& result, std::ostream& out);

/// Side-by-side comparison of the boundary runs against the self-tuned run,
/// with relative improvements.
void write_comparison_table(const ScenarioResult& lower, const ScenarioResult& upper,
                            const ScenarioResult& self_tuned, std::ostream& out);

/// Shortest round-trip decimal form of v.
std::string format_double(double v);

}  // namespace exmpc
