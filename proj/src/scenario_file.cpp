#include "exmpc/error.hpp"
#include "exmpc/harness.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>

namespace exmpc {
namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(Scenario&, const std::string&)>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::invalid_argument("expected a number, got '" + text + "'");
    return v;
}

long to_integer(const std::string& text) {
    const std::string s = trim(text);
    long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw std::invalid_argument("expected an integer, got '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = text.find(sep, pos);
        const std::string item = trim(text.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
        if (!item.empty()) out.push_back(item);
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return out;
}

/// "0:35, 200:45" → [(0, 35), (200, 45)]
std::vector<std::pair<double, double>> to_schedule(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw std::invalid_argument("schedule entries look like t:T_ref, got '" + item + "'");
        out.emplace_back(to_double(parts[0]), to_double(parts[1]));
    }
    return out;
}

std::vector<double> to_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(item));
    return out;
}

#define NUM(section, key, field) {section "." key, [](Scenario& s, const std::string& v) { s.field = to_double(v); }}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        NUM("scenario", "duration", duration),
        NUM("scenario", "Ts", Ts),
        {"scenario.schedule", [](Scenario& s, const std::string& v) { s.schedule = to_schedule(v); }},
        {"scenario.mode", [](Scenario& s, const std::string& v) { s.mode = ModeSpec::parse(trim(v)); }},
        {"scenario.seed",
         [](Scenario& s, const std::string& v) {
             const long seed = to_integer(v);
             if (seed < 0) throw std::invalid_argument("seed must be >= 0");
             s.seed = static_cast<std::uint64_t>(seed);
         }},
        NUM("plant", "T_steady", plant.T_steady),
        NUM("plant", "U_steady", plant.U_steady),
        NUM("plant", "K0", plant.K0),
        NUM("plant", "kappa_gain", plant.kappa_gain),
        NUM("plant", "tau_heat", plant.tau_heat),
        NUM("plant", "tau_cool", plant.tau_cool),
        NUM("plant", "noise_std", plant.noise_std),
        NUM("plant", "T_cold_in", plant.T_cold_in),
        NUM("plant", "Ts", plant.Ts),
        NUM("mpc", "model_gain", mpc.model_gain),
        NUM("mpc", "model_tau", mpc.model_tau),
        {"mpc.N", [](Scenario& s, const std::string& v) { s.mpc.N = static_cast<int>(to_integer(v)); }},
        NUM("mpc", "Qy_lower", mpc.Qy_lower),
        NUM("mpc", "Qy_upper", mpc.Qy_upper),
        NUM("mpc", "QI", mpc.QI),
        NUM("mpc", "R", mpc.R),
        NUM("mpc", "u_min", mpc.u_min),
        NUM("mpc", "u_max", mpc.u_max),
        NUM("mpc", "y_min", mpc.y_min),
        NUM("mpc", "y_max", mpc.y_max),
        NUM("mpc", "integrator_bound", mpc.integrator_bound),
        {"mpc.stages",
         [](Scenario& s, const std::string& v) {
             const std::string t = trim(v);
             if (t == "shifted")
                 s.mpc.stages = StageRange::shifted;
             else if (t == "literal")
                 s.mpc.stages = StageRange::literal;
             else
                 throw std::invalid_argument("expected shifted or literal, got '" + t + "'");
         }},
        {"tuner.mode",
         [](Scenario& s, const std::string& v) {
             const std::string t = trim(v);
             if (t == "step_change")
                 s.tuner.mode = RhoMode::step_change;
             else if (t == "deviation")
                 s.tuner.mode = RhoMode::deviation;
             else
                 throw std::invalid_argument("expected step_change or deviation, got '" + t + "'");
         }},
        NUM("tuner", "delta_max", tuner.delta_max),
        {"tuner.d_max",
         [](Scenario& s, const std::string& v) {
             const auto l = to_list(v);
             s.tuner.d_max = Eigen::Map<const Vector>(l.data(), static_cast<Eigen::Index>(l.size()));
         }},
        {"tuner.splits", [](Scenario& s, const std::string& v) { s.tuner.splits = to_list(v); }},
        {"tuner.direction",
         [](Scenario& s, const std::string& v) {
             const std::string t = trim(v);
             if (t == "standard")
                 s.tuner.direction = TuningDirection::standard;
             else if (t == "reversed")
                 s.tuner.direction = TuningDirection::reversed;
             else
                 throw std::invalid_argument("expected standard or reversed, got '" + t + "'");
         }},
    };
    return table;
}

#undef NUM

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::config_error, origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    Scenario sc = default_paper_scenario();
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (section != "scenario" && section != "plant" && section != "mpc" && section != "tuner")
            throw Error(ErrorKind::config_error, origin + ": unknown section [" + section + "]");
        if (!body.data().empty() && body.empty())
            throw Error(ErrorKind::config_error, origin + ": key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            const auto it = table.find(section + "." + key);
            if (it == table.end())
                throw Error(ErrorKind::config_error, origin + ": unknown key '" + key + "' in [" + section + "]");
            try {
                it->second(sc, value.data());
            } catch (const Error& e) {
                throw Error(ErrorKind::config_error, origin + ": [" + section + "] " + key + ": " + e.what());
            } catch (const std::invalid_argument& e) {
                throw Error(ErrorKind::config_error, origin + ": [" + section + "] " + key + ": " + e.what());
            }
        }
    }
    try {
        sc.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::config_error, origin + ": " + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
    return parse_scenario(in, path.string());
}

}  // namespace exmpc
