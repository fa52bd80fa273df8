// Command-line front end: build, verify and simulate explicit controllers.

#include "exmpc/error.hpp"
#include "exmpc/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace exmpc;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string controllers = ".";
    std::string mode;
    std::string input;
    std::optional<std::uint64_t> seed;
    int samples = 1000;
};

Scenario scenario_from(const Options& o) {
    Scenario sc = o.config.empty() ? default_paper_scenario() : load_scenario(o.config);
    if (o.seed) sc.seed = *o.seed;
    if (!o.mode.empty()) sc.mode = ModeSpec::parse(o.mode);
    return sc;
}

fs::path out_dir(const Options& o, const char* fallback) {
    fs::path dir = o.out.empty() ? fs::path(fallback) : fs::path(o.out);
    fs::create_directories(dir);
    return dir;
}

void print_report(const char* name, const ExplicitController& c, const ExploreReport& rep) {
    std::cout << name << ": " << c.regions().size() << " regions, " << rep.qp_solves << " QP solves, "
              << rep.degenerate_skipped << " degenerate active sets skipped\n";
    for (const auto& w : rep.warnings) std::cout << "  warning: " << w << '\n';
}

int cmd_build(const Options& o) {
    const Scenario sc = scenario_from(o);
    const fs::path dir = out_dir(o, ".");
    ExploreReport lr, ur;
    const TunablePair pair = build_pair(sc, &lr, &ur);
    save(pair.lower(), dir / "lower.empc.json");
    save(pair.upper(), dir / "upper.empc.json");
    print_report("lower", pair.lower(), lr);
    print_report("upper", pair.upper(), ur);
    std::cout << "wrote " << (dir / "lower.empc.json").string() << " and " << (dir / "upper.empc.json").string() << '\n';
    return 0;
}

TunablePair load_pair(const Options& o) {
    const fs::path dir(o.controllers);
    return TunablePair(load(dir / "lower.empc.json"), load(dir / "upper.empc.json"));
}

int cmd_verify(const Options& o) {
    const Scenario sc = scenario_from(o);
    const TunablePair pair = load_pair(o);
    bool ok = true;
    for (const auto& [name, ctrl, qy] : {std::tuple{"lower", &pair.lower(), sc.mpc.Qy_lower},
                                         std::tuple{"upper", &pair.upper(), sc.mpc.Qy_upper}}) {
        const ParametricQp pqp = condense(sc.mpc_spec(qy));
        if (ctrl->meta().model_fingerprint != pqp.meta.model_fingerprint || !(ctrl->meta() == pqp.meta))
            throw Error(ErrorKind::fingerprint_mismatch,
                        std::string(name) + " controller does not match the configured problem");
        const OracleReport rep = verify_against_oracle(*ctrl, pqp, o.samples, o.seed.value_or(1));
        std::cout << name << ": samples " << rep.samples << ", feasible " << rep.feasible << ", infeasible "
                  << rep.infeasible << ", coverage gaps " << rep.coverage_gaps << ", spurious coverage "
                  << rep.spurious_coverage << ", max deviation " << format_double(rep.max_deviation) << '\n';
        if (rep.coverage_gaps > 0 || rep.spurious_coverage > 0 || rep.max_deviation > 1e-6) ok = false;
    }
    return ok ? 0 : 2;
}

int cmd_simulate(const Options& o) {
    const Scenario sc = scenario_from(o);
    const TunablePair pair = load_pair(o);
    const ScenarioResult r = run(sc, pair);
    const fs::path dir = out_dir(o, ".");
    std::string stem = r.mode;
    for (char& c : stem)
        if (c == ':') c = '_';
    write_csv(r, dir / (stem + ".csv"));
    write_criteria_table(r, std::cout);
    std::cout << "mean evaluation time " << r.mean_eval_seconds * 1e6 << " us, anti-windup events "
              << r.anti_windup.size() << '\n';
    return 0;
}

int cmd_evaluate(const Options& o) {
    const ScenarioResult r = read_csv(o.input);
    write_criteria_table(r, std::cout);
    if (!o.out.empty()) {
        std::ofstream out(o.out);
        if (!out) throw Error(ErrorKind::io_error, "cannot open " + o.out);
        write_criteria_csv({r}, out);
    }
    return 0;
}

int cmd_paper_run(const Options& o) {
    Scenario sc = scenario_from(o);
    const fs::path dir = out_dir(o, "results");
    const TunablePair pair = build_pair(sc);
    std::vector<ScenarioResult> results;
    for (ControllerMode m : {ControllerMode::lower, ControllerMode::upper, ControllerMode::self_tuned}) {
        sc.mode = {m, m == ControllerMode::upper ? 1.0 : 0.0};
        results.push_back(run(sc, pair));
        write_csv(results.back(), dir / (results.back().mode + ".csv"));
    }
    {
        std::ofstream crit(dir / "criteria.csv");
        write_criteria_csv(results, crit);
    }
    std::ofstream cmp(dir / "comparison.txt");
    write_comparison_table(results[0], results[1], results[2], cmp);
    write_comparison_table(results[0], results[1], results[2], std::cout);
    for (const auto& r : results)
        std::cerr << r.mode << ": mean evaluation " << r.mean_eval_seconds * 1e6 << " us, anti-windup events "
                  << r.anti_windup.size() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit MPC with self-tuned blending of two boundary controllers"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "scenario file (INI); defaults to the built-in scenario");
        sub->add_option("--seed", o.seed, "random seed");
    };

    auto* build = app.add_subcommand("build", "build both boundary controllers");
    add_common(build);
    build->add_option("--out", o.out, "output directory");

    auto* verify = app.add_subcommand("verify", "compare controllers with the online QP");
    add_common(verify);
    verify->add_option("--controllers", o.controllers, "directory with lower/upper controller files");
    verify->add_option("--samples", o.samples, "number of random parameters")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "run one closed-loop scenario");
    add_common(simulate);
    simulate->add_option("--controllers", o.controllers, "directory with lower/upper controller files");
    simulate->add_option("--mode", o.mode, "lower, upper, self_tuned or fixed:<weight>");
    simulate->add_option("--out", o.out, "output directory");

    auto* evaluate = app.add_subcommand("evaluate", "criteria table of a trajectory CSV");
    evaluate->add_option("input", o.input, "trajectory CSV")->required();
    evaluate->add_option("--out", o.out, "criteria CSV to write");

    auto* paper_run = app.add_subcommand("paper-run", "scenario under lower, upper and self-tuned control");
    add_common(paper_run);
    paper_run->add_option("--out", o.out, "output directory (default results)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*build) return cmd_build(o);
        if (*verify) return cmd_verify(o);
        if (*simulate) return cmd_simulate(o);
        if (*evaluate) return cmd_evaluate(o);
        if (*paper_run) return cmd_paper_run(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return is_validation_error(e.kind()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
