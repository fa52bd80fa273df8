#include "exmpc/harness.hpp"

#include "exmpc/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace exmpc {
namespace {

Error config_error(const std::string& what) { return Error(ErrorKind::config_error, what); }

std::string theta_text(const Vector& theta) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < theta.size(); ++i) s += (i ? ", " : "") + format_double(theta(i));
    return s + ")";
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Scenario

ModeSpec ModeSpec::parse(const std::string& text) {
    if (text == "lower") return {ControllerMode::lower, 0.0};
    if (text == "upper") return {ControllerMode::upper, 1.0};
    if (text == "self_tuned") return {ControllerMode::self_tuned, 0.0};
    if (text.rfind("fixed:", 0) == 0) {
        const std::string num = text.substr(6);
        double w = 0.0;
        const auto res = std::from_chars(num.data(), num.data() + num.size(), w);
        if (res.ec != std::errc() || res.ptr != num.data() + num.size() || !(w >= 0.0 && w <= 1.0))
            throw config_error("mode fixed:<weight> needs a weight in [0, 1], got '" + num + "'");
        return {ControllerMode::fixed, w};
    }
    throw config_error("unknown mode '" + text + "' (expected lower, upper, self_tuned or fixed:<weight>)");
}

std::string ModeSpec::name() const {
    switch (mode) {
        case ControllerMode::lower: return "lower";
        case ControllerMode::upper: return "upper";
        case ControllerMode::self_tuned: return "self_tuned";
        case ControllerMode::fixed: return "fixed:" + format_double(fixed_weight);
    }
    return "unknown";
}

void Scenario::validate() const {
    if (!(duration > 0.0) || !(Ts > 0.0)) throw config_error("duration and Ts must be positive");
    if (plant.Ts != Ts) throw config_error("plant Ts must equal the scenario Ts");
    if (schedule.empty()) throw config_error("reference schedule is empty");
    if (schedule.front().first != 0.0) throw config_error("reference schedule must start at t = 0");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto [t, ref] = schedule[i];
        if (i > 0 && !(t > schedule[i - 1].first)) throw config_error("schedule times must increase strictly");
        if (!(ref >= 20.0 && ref <= 55.0))
            throw config_error("reference " + format_double(ref) + " °C outside [20, 55] °C");
        const double dev = ref - plant.T_steady;
        if (dev < mpc.y_min || dev > mpc.y_max)
            throw config_error("reference " + format_double(ref) + " °C outside the controller output bounds");
    }
    try {
        plant.validate();
        tuner.validate();
    } catch (const Error& e) {
        throw config_error(e.what());
    }
    if (mpc.N < 1) throw config_error("mpc N must be >= 1");
    if (!(mpc.Qy_lower <= mpc.Qy_upper)) throw config_error("Qy_lower must not exceed Qy_upper");
    if (!(mpc.model_gain > 0.0) || !(mpc.model_tau > 0.0)) throw config_error("model gain and tau must be positive");
    if (mode.mode == ControllerMode::fixed && !(mode.fixed_weight >= 0.0 && mode.fixed_weight <= 1.0))
        throw config_error("fixed weight must lie in [0, 1]");
}

double Scenario::reference_at(double t) const {
    double ref = schedule.front().second;
    for (const auto& [ts, r] : schedule) {
        if (ts > t) break;
        ref = r;
    }
    return ref;
}

AugmentedModel Scenario::model() const { return augment(fo_to_ss(mpc.model_gain, mpc.model_tau, Ts)); }

MpcSpec Scenario::mpc_spec(double qy) const {
    MpcSpec s;
    s.model = model();
    s.N = mpc.N;
    s.Qy = Vector::Constant(1, qy);
    s.QI = Vector::Constant(1, mpc.QI);
    s.R = Vector::Constant(1, mpc.R);
    s.u_min = Vector::Constant(1, mpc.u_min);
    s.u_max = Vector::Constant(1, mpc.u_max);
    s.y_min = Vector::Constant(1, mpc.y_min);
    s.y_max = Vector::Constant(1, mpc.y_max);
    s.stages = mpc.stages;
    s.integrator_bound = mpc.integrator_bound;
    return s;
}

Scenario default_paper_scenario() {
    Scenario sc;
    sc.duration = 2600.0;
    sc.Ts = 1.0;
    sc.schedule = {{0.0, 35.0}, {200.0, 45.0}, {800.0, 50.0}, {1400.0, 45.0}, {2000.0, 35.0}};
    sc.tuner.mode = RhoMode::step_change;
    sc.tuner.delta_max = 15.0;
    sc.tuner.splits = {0.5};
    sc.mode = {ControllerMode::self_tuned, 0.0};
    return sc;
}

TunablePair build_pair(const Scenario& sc, ExploreReport* lower_report, ExploreReport* upper_report) {
    sc.validate();
    ExplicitController lower = explicit_solve(condense(sc.mpc_spec(sc.mpc.Qy_lower)), {}, lower_report);
    ExplicitController upper = explicit_solve(condense(sc.mpc_spec(sc.mpc.Qy_upper)), {}, upper_report);
    return TunablePair(std::move(lower), std::move(upper));
}

// ---------------------------------------------------------------------------
// Closed loop

ScenarioResult run(const Scenario& sc, const TunablePair& pair) {
    sc.validate();
    const std::string fp = model_fingerprint(sc.model());
    if (pair.lower().meta().model_fingerprint != fp || pair.upper().meta().model_fingerprint != fp)
        throw Error(ErrorKind::fingerprint_mismatch, "controllers were built for a different model than the scenario");
    if (pair.lower().theta_dim() != 3 || pair.lower().n_u() != 1)
        throw Error(ErrorKind::dimension_mismatch, "scenario needs single-input single-output controllers");

    const SurrogateConfig& plant = sc.plant;
    const auto n = static_cast<long>(std::llround(sc.duration / sc.Ts));
    const double x_bound = sc.mpc.integrator_bound;

    ScenarioResult res;
    res.mode = sc.mode.name();
    res.records.reserve(static_cast<std::size_t>(n));
    std::mt19937_64 rng(sc.seed);
    PlantState state{plant.T_steady};
    double x_I = 0.0;
    SelfTuner tuner(sc.tuner, Vector::Constant(1, sc.reference_at(0.0) - plant.T_steady));
    double eval_total = 0.0;

    for (long k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * sc.Ts;
        const double T_ref = sc.reference_at(t);
        const double y = state.T - plant.T_steady;
        const double y_ref = T_ref - plant.T_steady;

        double weight = 0.0, rho = 0.0, rho_tilde = 0.0;
        TuningDirection direction = TuningDirection::standard;
        switch (sc.mode.mode) {
            case ControllerMode::lower: break;
            case ControllerMode::upper: weight = rho = rho_tilde = 1.0; break;
            case ControllerMode::fixed: weight = rho = rho_tilde = sc.mode.fixed_weight; break;
            case ControllerMode::self_tuned: {
                const TunerState& ts = tuner.update(Vector::Constant(1, y_ref));
                rho = ts.rho;
                rho_tilde = ts.rho_tilde;
                weight = tuner.upper_weight();
                direction = sc.tuner.direction;
                break;
            }
        }

        Vector theta(3);
        theta << y, x_I, y_ref;
        Interpolation ip;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            ip = interpolate_input(pair, theta, weight);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::parameter_not_covered) throw;
            throw Error(ErrorKind::parameter_not_covered,
                        "t = " + format_double(t) + " s: theta " + theta_text(theta) + " is not covered");
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        eval_total += dt;
        res.max_eval_seconds = std::max(res.max_eval_seconds, dt);

        double U = ip.u(0) + plant.U_steady;
        const double U_clip = std::clamp(U, SurrogateConfig::U_min, SurrogateConfig::U_max);
        if (U_clip != U) {
            if (std::abs(U_clip - U) > 1e-6)
                throw Error(ErrorKind::constraint_violation, "t = " + format_double(t) + " s: input " +
                                                                 format_double(U) + " % outside [20, 100] %");
            ++res.input_clips;
            U = U_clip;
        }

        SampleRecord r;
        r.t = t;
        r.T_ref = T_ref;
        r.T = state.T;
        r.U = U;
        r.u_dev = U - plant.U_steady;
        r.rho = rho;
        r.rho_tilde = rho_tilde;
        r.Qy_eff = effective_penalties(pair, rho_tilde, direction).Qy(0);
        r.region_L = ip.region_L;
        r.region_U = ip.region_U;
        r.x_I = x_I;
        r.u_L = ip.u_L(0);
        r.u_U = ip.u_U(0);
        res.records.push_back(r);

        state = step(plant, state, U, rng);
        const double next = x_I + sc.Ts * (y_ref - y);
        x_I = std::clamp(next, -x_bound, x_bound);
        if (x_I != next) res.anti_windup.push_back({t, next, x_I});
    }
    res.mean_eval_seconds = n > 0 ? eval_total / static_cast<double>(n) : 0.0;
    fill_criteria(res, sc.Ts);
    return res;
}

void fill_criteria(ScenarioResult& result, double Ts) {
    std::vector<double> t, ref, T;
    double total = 0.0;
    for (const auto& r : result.records) {
        t.push_back(r.t);
        ref.push_back(r.T_ref);
        T.push_back(r.T);
        total += (r.T - r.T_ref) * (r.T - r.T_ref);
    }
    result.total_sse = Ts * total;
    result.segments.clear();
    for (const auto& seg : split_segments(t, ref, T, Ts)) result.segments.push_back(criteria(seg));
}

// ---------------------------------------------------------------------------
// CSV and tables

void write_csv(const ScenarioResult& result, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : result.records) {
        out << format_double(r.t) << ',' << format_double(r.T_ref) << ',' << format_double(r.T) << ','
            << format_double(r.U) << ',' << format_double(r.u_dev) << ',' << format_double(r.rho) << ','
            << format_double(r.rho_tilde) << ',' << format_double(r.Qy_eff) << ',' << r.region_L << ','
            << r.region_U << '\n';
    }
}

void write_csv(const ScenarioResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot open " + path.string() + " for writing");
    write_csv(result, out);
    if (!out) throw Error(ErrorKind::io_error, "write failed for " + path.string());
}

ScenarioResult read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw config_error(path.string() + ":1: expected header '" + std::string(kCsvHeader) + "'");
    ScenarioResult res;
    res.mode = path.stem().string();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> v;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t end = std::min(line.find(',', pos), line.size());
            double x = 0.0;
            const auto r = std::from_chars(line.data() + pos, line.data() + end, x);
            if (r.ec != std::errc() || r.ptr != line.data() + end)
                throw config_error(path.string() + ":" + std::to_string(lineno) + ": field " +
                                   std::to_string(v.size() + 1) + " is not a number");
            v.push_back(x);
            pos = end + 1;
        }
        if (v.size() != 10)
            throw config_error(path.string() + ":" + std::to_string(lineno) + ": expected 10 fields, got " +
                               std::to_string(v.size()));
        SampleRecord rec;
        rec.t = v[0];
        rec.T_ref = v[1];
        rec.T = v[2];
        rec.U = v[3];
        rec.u_dev = v[4];
        rec.rho = v[5];
        rec.rho_tilde = v[6];
        rec.Qy_eff = v[7];
        rec.region_L = static_cast<int>(v[8]);
        rec.region_U = static_cast<int>(v[9]);
        res.records.push_back(rec);
    }
    const double Ts = res.records.size() > 1 ? res.records[1].t - res.records[0].t : 1.0;
    fill_criteria(res, Ts);
    return res;
}

void write_criteria_csv(const std::vector<ScenarioResult>& results, std::ostream& out) {
    out << "mode,segment,t0,t1,T_ref_before,T_ref_after,sse,overshoot_pct,settling_s\n";
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.segments.size(); ++i) {
            const auto& s = r.segments[i];
            out << r.mode << ',' << i + 1 << ',' << format_double(s.t0) << ',' << format_double(s.t1) << ','
                << format_double(s.ref_before) << ',' << format_double(s.ref_after) << ',' << format_double(s.sse)
                << ',' << format_double(s.overshoot) << ',' << (s.settling ? format_double(*s.settling) : "not_settled")
                << '\n';
        }
        out << r.mode << ",total,,,,," << format_double(r.total_sse) << ",,\n";
    }
}

namespace {

std::string step_label(const SegmentCriteria& s) {
    std::ostringstream o;
    o << s.ref_before << "->" << s.ref_after;
    return o.str();
}

std::string settling_text(const std::optional<double>& s) {
    if (!s) return "n/s";
    std::ostringstream o;
    o << std::fixed << std::setprecision(0) << *s;
    return o.str();
}

}  // namespace

void write_criteria_table(const ScenarioResult& result, std::ostream& out) {
    out << "mode: " << result.mode << '\n';
    out << std::left << std::setw(10) << "step" << std::right << std::setw(12) << "SSE" << std::setw(12)
        << "sigma_max%" << std::setw(12) << "t_eps[s]" << '\n';
    out << std::fixed << std::setprecision(2);
    for (const auto& s : result.segments) {
        out << std::left << std::setw(10) << step_label(s) << std::right << std::setw(12) << s.sse << std::setw(12)
            << s.overshoot << std::setw(12) << settling_text(s.settling) << '\n';
    }
    out << std::left << std::setw(10) << "total" << std::right << std::setw(12) << result.total_sse << '\n';
    out << std::defaultfloat;
}

void write_comparison_table(const ScenarioResult& lower, const ScenarioResult& upper,
                            const ScenarioResult& self_tuned, std::ostream& out) {
    auto ri = [](double ref, double st) -> std::string {
        if (st == 0.0) return "n/a";
        std::ostringstream o;
        o << std::fixed << std::setprecision(1) << relative_improvement(ref, st);
        return o.str();
    };
    out << std::left << std::setw(10) << "step" << std::right;
    for (const char* h : {"SSE_L", "SSE_U", "SSE_S", "dSSE_L%", "dSSE_U%", "sig_L%", "sig_U%", "sig_S%", "ts_L",
                          "ts_U", "ts_S"})
        out << std::setw(10) << h;
    out << '\n' << std::fixed << std::setprecision(2);
    const std::size_t n = std::min({lower.segments.size(), upper.segments.size(), self_tuned.segments.size()});
    for (std::size_t i = 0; i < n; ++i) {
        const auto &l = lower.segments[i], &u = upper.segments[i], &s = self_tuned.segments[i];
        out << std::left << std::setw(10) << step_label(s) << std::right << std::setw(10) << l.sse << std::setw(10)
            << u.sse << std::setw(10) << s.sse << std::setw(10) << ri(l.sse, s.sse) << std::setw(10)
            << ri(u.sse, s.sse) << std::setw(10) << l.overshoot << std::setw(10) << u.overshoot << std::setw(10)
            << s.overshoot << std::setw(10) << settling_text(l.settling) << std::setw(10)
            << settling_text(u.settling) << std::setw(10) << settling_text(s.settling) << '\n';
    }
    out << std::left << std::setw(10) << "total" << std::right << std::setw(10) << lower.total_sse << std::setw(10)
        << upper.total_sse << std::setw(10) << self_tuned.total_sse << std::setw(10)
        << ri(lower.total_sse, self_tuned.total_sse) << std::setw(10) << ri(upper.total_sse, self_tuned.total_sse)
        << '\n';
    out << std::defaultfloat;
}

}  // namespace exmpc
