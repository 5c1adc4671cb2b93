#pragma once

// Experiment configuration and run manifests for the command line runner.
// JSON in, resolved ExperimentConfig out; every file-producing run writes a
// manifest next to the data recording the resolved config, code version,
// wall time and any approximation warnings raised along the way.
//
// Not part of the umbrella header: this pulls in the vendored json parser,
// which library users should not pay for.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "branches.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "hilbert.hpp"
#include "version.hpp"

namespace drivencavity::cli {

// Experiment identifiers, one per runnable protocol.
inline const std::set<std::string>& known_experiments() {
    static const std::set<std::string> k{"steady",         "master", "traject",
                                         "branch_entropy", "hft",    "realignment"};
    return k;
}

struct ExperimentConfig {
    dynamics::SystemParams params{1.0, 0.7, 0.125, 0.0};
    int n_max = 60;
    double dt = 0.002;
    double t_final = -1.0;  // < 0: use the experiment's default
    std::uint64_t seed = 0;
    int n_traj = 1;
    double theta = 0.0;
    double relative_phase = 0.0;  // Phi' of the conditional superposition
    std::string experiment;
    std::string out_dir;  // empty: env DRIVENCAVITY_OUT, else "."

    // Tracks whether the config file set gamma, so subcommands with a
    // different damping default (fig2) only fill in when it was left free.
    bool gamma_given = false;

    void validate() const {
        params.validate();
        if (n_max < 1) throw ConfigError("config: n_max must be >= 1");
        if (!(dt > 0.0)) throw ConfigError("config: dt must be > 0");
        if (t_final < 0.0) throw ConfigError("config: t_final must be >= 0");
        if (n_traj < 1) throw ConfigError("config: n_traj must be >= 1");
        if (!std::isfinite(theta)) throw ConfigError("config: theta must be finite");
        if (!std::isfinite(relative_phase))
            throw ConfigError("config: relative_phase must be finite");
        if (known_experiments().count(experiment) == 0)
            throw ConfigError("config: unknown experiment '" + experiment + "'");
    }
};

inline const char* recognized_keys_message() {
    return "recognized keys: g, drive, kappa, gamma, n_max, dt, t_final, "
           "seed, n_traj, theta, relative_phase, experiment, out";
}

namespace detail {

inline double require_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number())
        throw ConfigError("config: key '" + key + "' must be a number");
    return v.get<double>();
}

}  // namespace detail

// Applies the keys of a parsed JSON object onto cfg. Unknown keys are
// errors: a typo silently falling back to a default would poison every
// figure built from the file.
inline void apply_config_json(const nlohmann::json& doc, ExperimentConfig& cfg) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key == "g") {
            cfg.params.g = detail::require_number(value, key);
        } else if (key == "drive") {
            cfg.params.drive = detail::require_number(value, key);
        } else if (key == "kappa") {
            cfg.params.kappa = detail::require_number(value, key);
        } else if (key == "gamma") {
            cfg.params.gamma = detail::require_number(value, key);
            cfg.gamma_given = true;
        } else if (key == "n_max") {
            if (!value.is_number_integer())
                throw ConfigError("config: key 'n_max' must be an integer");
            cfg.n_max = value.get<int>();
        } else if (key == "dt") {
            cfg.dt = detail::require_number(value, key);
        } else if (key == "t_final") {
            cfg.t_final = detail::require_number(value, key);
        } else if (key == "seed") {
            if (!value.is_number_unsigned())
                throw ConfigError("config: key 'seed' must be a nonnegative integer");
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "n_traj") {
            if (!value.is_number_integer())
                throw ConfigError("config: key 'n_traj' must be an integer");
            cfg.n_traj = value.get<int>();
        } else if (key == "theta") {
            cfg.theta = detail::require_number(value, key);
        } else if (key == "relative_phase") {
            cfg.relative_phase = detail::require_number(value, key);
        } else if (key == "experiment") {
            if (!value.is_string())
                throw ConfigError("config: key 'experiment' must be a string");
            cfg.experiment = value.get<std::string>();
        } else if (key == "out") {
            if (!value.is_string())
                throw ConfigError("config: key 'out' must be a string");
            cfg.out_dir = value.get<std::string>();
        } else {
            throw ConfigError("config: unknown key '" + key + "'; " +
                              recognized_keys_message());
        }
    }
}

// Reads a JSON config file onto cfg (defaults stay where the file is
// silent). Parse errors keep the parser's byte/line diagnostics.
inline void load_config(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ConfigError("config: '" + path + "' is empty; expected a JSON object; " +
                          recognized_keys_message());
    nlohmann::json doc;
    try {
        // comments tolerated so annotated configs load as written
        doc = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: '" + path + "': " + e.what());
    }
    apply_config_json(doc, cfg);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return nlohmann::json{{"g", cfg.params.g},
                          {"drive", cfg.params.drive},
                          {"kappa", cfg.params.kappa},
                          {"gamma", cfg.params.gamma},
                          {"n_max", cfg.n_max},
                          {"dt", cfg.dt},
                          {"t_final", cfg.t_final},
                          {"seed", cfg.seed},
                          {"n_traj", cfg.n_traj},
                          {"theta", cfg.theta},
                          {"relative_phase", cfg.relative_phase},
                          {"experiment", cfg.experiment},
                          {"out", cfg.out_dir}};
}

struct RunManifest {
    std::string subcommand;
    std::string experiment;
    std::string version = kVersion;
    double wall_time_seconds = 0.0;
    std::vector<std::string> warnings;
    std::vector<std::string> outputs;
    nlohmann::json config;
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json doc{{"subcommand", m.subcommand}, {"experiment", m.experiment},
                       {"version", m.version},       {"wall_time_seconds", m.wall_time_seconds},
                       {"warnings", m.warnings},     {"outputs", m.outputs},
                       {"config", m.config}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("write_manifest: cannot open '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw Error("write_manifest: write failed for '" + path + "'");
}

// Approximation warnings shared by every experiment: semiclassical component
// overlap, branch drift stretched past its window, coherent tail clipped by
// the Fock cutoff. Weak driving disables the steady-state checks entirely.
inline std::vector<std::string> standard_warnings(const ExperimentConfig& cfg,
                                                  double horizon) {
    std::vector<std::string> w;
    char buf[128];
    try {
        const auto ss = dynamics::semiclassical_steady_state(cfg.params);
        if (branches::weak_orthogonality_warning(cfg.params)) {
            std::snprintf(buf, sizeof(buf),
                          "field components overlap strongly: r_ss*sin(phi_ss) = %.3g < 3",
                          ss.r_ss * std::sin(ss.phi_ss));
            w.emplace_back(buf);
        }
        if (branches::short_time_warning(horizon, cfg.params, ss.r_ss)) {
            std::snprintf(buf, sizeof(buf),
                          "branch drift approximation stretched: g*t/r_ss = %.3g > 0.5",
                          cfg.params.g * horizon / ss.r_ss);
            w.emplace_back(buf);
        }
        const double tail = hilbert::coherent_tail_weight(ss.r_ss * ss.r_ss, cfg.n_max);
        if (tail > 1e-8) {
            std::snprintf(buf, sizeof(buf),
                          "coherent tail weight %.3g beyond n_max = %d", tail, cfg.n_max);
            w.emplace_back(buf);
        }
    } catch (const WeakDrivingError&) {
        w.emplace_back("driving below locking threshold (2*drive <= g); "
                       "steady-state diagnostics unavailable");
    }
    return w;
}

}  // namespace drivencavity::cli
