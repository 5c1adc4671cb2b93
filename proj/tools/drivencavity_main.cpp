// Command line runner for the driven-cavity experiments. Every subcommand
// resolves one ExperimentConfig (config file, then flags on top), runs one
// protocol, and for file-producing runs writes CSV data plus a JSON manifest
// describing exactly what was run.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drivencavity/config.hpp"
#include "drivencavity/drivencavity.hpp"

namespace dc = drivencavity;
using dc::Complex;
using dc::DensityOperator;
using dc::StateVector;
using dc::SpaceSpec;

namespace {

StateVector ground_vacuum(const SpaceSpec& spec) {
    Eigen::Vector2cd atom;
    atom << 0.0, 1.0; // |g>
    dc::FieldVector vac = dc::FieldVector::Zero(spec.field_dim());
    vac(0) = 1.0;
    return dc::hilbert::atom_field_product(atom, vac, spec);
}

// Sampling grid shared by all experiments: every 0.05 time units (or every
// step when dt is coarser), endpoint always included.
int sample_stride(double dt) {
    return std::max(1L, std::lround(0.05 / dt));
}

std::vector<double> stride_grid(double t_final, double dt, int stride) {
    const long n_steps = std::lround(std::ceil(t_final / dt - 1e-9));
    std::vector<double> ts;
    for (long s = 0; s <= n_steps; ++s)
        if (s % stride == 0 || s == n_steps) ts.push_back(s * dt);
    return ts;
}

std::string channel_name(dc::trajectories::JumpChannel c) {
    return c == dc::trajectories::JumpChannel::cavity_emission ? "cavity"
                                                               : "spontaneous";
}

void write_jumps_csv(const std::vector<dc::trajectories::JumpRecord>& jumps,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dc::Error("cannot open '" + path + "'");
    out << "time,channel\n";
    for (const auto& j : jumps)
        out << dc::cli::format_value(j.time) << ',' << channel_name(j.channel) << '\n';
    if (!out) throw dc::Error("write failed for '" + path + "'");
}

struct RunContext {
    dc::cli::ExperimentConfig cfg;
    std::string subcommand;
    std::filesystem::path out_dir;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::filesystem::path file(const std::string& suffix) const {
        return out_dir / (subcommand + suffix);
    }

    void finish(dc::cli::RunManifest m) const {
        m.subcommand = subcommand;
        m.experiment = cfg.experiment;
        m.config = dc::cli::config_to_json(cfg);
        m.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        const auto path = file("_manifest.json");
        dc::cli::write_manifest(m, path.string());
        std::cerr << "wrote " << path.string() << '\n';
    }
};

void write_data(const RunContext& ctx, const dc::cli::Series& columns,
                dc::cli::RunManifest& manifest, const std::string& suffix = ".csv") {
    const auto path = ctx.file(suffix);
    dc::cli::write_series(columns, path.string());
    manifest.outputs.push_back(path.filename().string());
    std::cerr << "wrote " << path.string() << '\n';
}

int run_steady(const RunContext& ctx) {
    const auto ss = dc::dynamics::semiclassical_steady_state(ctx.cfg.params);
    std::cout << "phi_ss = " << dc::cli::format_value(ss.phi_ss) << '\n'
              << "r_ss = " << dc::cli::format_value(ss.r_ss) << '\n'
              << "field_mean_upper = " << dc::cli::format_value(ss.r_ss * std::cos(ss.phi_ss))
              << " + " << dc::cli::format_value(ss.r_ss * std::sin(ss.phi_ss)) << "i\n"
              << "photon_number = " << dc::cli::format_value(ss.r_ss * ss.r_ss) << '\n';
    return 0;
}

int run_realignment(const RunContext& ctx) {
    double phi = std::numbers::pi / 4.0;
    try {
        phi = dc::dynamics::semiclassical_steady_state(ctx.cfg.params).phi_ss;
    } catch (const dc::WeakDrivingError&) {
        // keep the generic angle; the check is phase independent anyway
    }
    const DensityOperator rho = dc::entanglement::schematic_post_collapse_mixture(phi);
    const double v = dc::entanglement::realignment_trace_norm(rho, 2, 4);
    const double expected = std::numbers::sqrt2;
    std::cout << "realignment_trace_norm = " << dc::cli::format_value(v) << '\n'
              << "expected = " << dc::cli::format_value(expected) << '\n'
              << "difference = " << dc::cli::format_value(std::abs(v - expected)) << '\n';
    return std::abs(v - expected) < 1e-9 ? 0 : 2;
}

int run_master(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const SpaceSpec spec{cfg.n_max};
    const auto ops = dc::hilbert::build_operators(spec);
    const StateVector psi0 = ground_vacuum(spec);
    const DensityOperator rho0 = psi0 * psi0.adjoint();

    dc::dynamics::MasterOptions opt;
    opt.t_final = cfg.t_final;
    opt.dt = cfg.dt;
    opt.sample_stride = sample_stride(cfg.dt);
    const auto res = dc::dynamics::integrate_master(rho0, cfg.params, spec, opt);

    std::vector<double> re_a, im_a, nbar, excited, entropy;
    for (const auto& rho : res.states) {
        const Complex a = dc::hilbert::expectation(ops.a, rho);
        re_a.push_back(a.real());
        im_a.push_back(a.imag());
        nbar.push_back(dc::hilbert::expectation(ops.number, rho).real());
        const Eigen::Matrix2cd atom = dc::hilbert::partial_trace_field(rho, spec);
        excited.push_back(atom(0, 0).real());
        entropy.push_back(dc::entanglement::entropy_of_entanglement(atom));
    }

    dc::cli::RunManifest m;
    m.warnings = dc::cli::standard_warnings(cfg, cfg.t_final);
    if (res.truncation_warning)
        m.warnings.emplace_back("cavity population approached the Fock cutoff");
    dc::cli::Series cols{{"time", res.times},
                         {"re_a", re_a},
                         {"im_a", im_a},
                         {"photon_number", nbar},
                         {"excited_population", excited},
                         {"atom_entropy", entropy}};
    write_data(ctx, cols, m);
    ctx.finish(m);
    return 0;
}

int run_traject(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const SpaceSpec spec{cfg.n_max};
    const StateVector psi0 = ground_vacuum(spec);

    dc::trajectories::TrajectoryOptions opt;
    opt.t_final = cfg.t_final;
    opt.dt = cfg.dt;
    opt.sample_stride = sample_stride(cfg.dt);

    dc::cli::RunManifest m;
    m.warnings = dc::cli::standard_warnings(cfg, cfg.t_final);

    if (cfg.n_traj == 1) {
        const auto result =
            dc::trajectories::evolve_trajectory(psi0, cfg.params, spec, opt, cfg.seed, 0);
        const auto series = dc::trajectories::entanglement_series(result, spec);
        dc::cli::Series cols{{"time", series.times}, {"atom_entropy", series.values}};
        write_data(ctx, cols, m);

        const auto jumps_path = ctx.file("_jumps.csv");
        write_jumps_csv(result.jumps, jumps_path.string());
        m.outputs.push_back(jumps_path.filename().string());
        std::cerr << "wrote " << jumps_path.string() << '\n';
        ctx.finish(m);
        return 0;
    }

    // Ensemble mode: per-trajectory jump detail is dropped; columns are
    // ensemble means on the sampling grid (entropy is of the mean atom
    // state, so it includes classical mixing across trajectories).
    const std::vector<double> grid = stride_grid(cfg.t_final, cfg.dt, opt.sample_stride);
    std::vector<double> sum_excited(grid.size(), 0.0), sum_nbar(grid.size(), 0.0);
    std::vector<Eigen::Matrix2cd> sum_atom(grid.size(), Eigen::Matrix2cd::Zero());
    long total_jumps = 0;
    for (int k = 0; k < cfg.n_traj; ++k) {
        const auto result = dc::trajectories::evolve_trajectory(
            psi0, cfg.params, spec, opt, cfg.seed, static_cast<std::uint64_t>(k));
        total_jumps += static_cast<long>(result.jumps.size());
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const StateVector* match = nullptr;
            while (cursor < result.samples.size() &&
                   result.samples[cursor].time <= grid[i] + 1e-12) {
                if (std::abs(result.samples[cursor].time - grid[i]) <= 1e-12)
                    match = &result.samples[cursor].state;
                ++cursor;
            }
            if (!match)
                throw dc::ConfigError("traject: no sample at grid time " +
                                      std::to_string(grid[i]));
            sum_excited[i] += dc::trajectories::detail::excited_population(*match, spec);
            sum_nbar[i] += dc::trajectories::detail::photon_number(*match, spec);
            sum_atom[i] += dc::hilbert::partial_trace_field(*match, spec);
        }
    }
    std::vector<double> excited(grid.size()), nbar(grid.size()), entropy(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        excited[i] = sum_excited[i] / cfg.n_traj;
        nbar[i] = sum_nbar[i] / cfg.n_traj;
        entropy[i] = dc::entanglement::entropy_of_entanglement(
            Eigen::Matrix2cd(sum_atom[i] / double(cfg.n_traj)));
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "averaged %d trajectories, %ld jumps total",
                  cfg.n_traj, total_jumps);
    m.warnings.emplace_back(buf);
    dc::cli::Series cols{{"time", std::vector<double>(grid)},
                         {"excited_population", excited},
                         {"photon_number", nbar},
                         {"atom_entropy", entropy}};
    write_data(ctx, cols, m);
    ctx.finish(m);
    return 0;
}

// Entropy of entanglement after a spontaneous emission, three ways: the
// closed-form branch superposition, one gamma = 0 trajectory, and the full
// master equation, all from the same collapsed initial state.
int run_branch_entropy(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const SpaceSpec spec{cfg.n_max};
    const auto ss = dc::dynamics::semiclassical_steady_state(cfg.params);

    const StateVector before = dc::branches::conditional_steady_superposition(
        cfg.params, cfg.relative_phase, spec);
    const StateVector collapsed = dc::branches::post_emission_collapse(before, spec);

    const int stride = sample_stride(cfg.dt);
    // Collapse maps the superposition phase Phi' to Phi' + 2 phi_ss.
    const double phase = cfg.relative_phase + 2.0 * ss.phi_ss;

    dc::dynamics::MasterOptions mopt;
    mopt.t_final = cfg.t_final;
    mopt.dt = cfg.dt;
    mopt.sample_stride = stride;
    const DensityOperator rho0 = collapsed * collapsed.adjoint();
    const auto master = dc::dynamics::integrate_master(rho0, cfg.params, spec, mopt);

    dc::trajectories::TrajectoryOptions topt;
    topt.t_final = cfg.t_final;
    topt.dt = cfg.dt;
    topt.sample_stride = stride;
    const auto traj = dc::trajectories::evolve_trajectory(collapsed, cfg.params, spec,
                                                          topt, cfg.seed, 0);

    std::vector<double> e_branch, e_traj, e_master;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < master.times.size(); ++i) {
        const double t = master.times[i];
        e_branch.push_back(dc::entanglement::entropy_of_entanglement(
            dc::branches::branch_superposition(t, cfg.params, phase, spec), spec));
        e_master.push_back(dc::entanglement::entropy_of_entanglement(
            dc::hilbert::partial_trace_field(master.states[i], spec)));
        const StateVector* match = nullptr;
        while (cursor < traj.samples.size() && traj.samples[cursor].time <= t + 1e-12) {
            if (std::abs(traj.samples[cursor].time - t) <= 1e-12)
                match = &traj.samples[cursor].state;
            ++cursor;
        }
        if (!match)
            throw dc::ConfigError("branch_entropy: trajectory missed grid time " +
                                  std::to_string(t));
        e_traj.push_back(dc::entanglement::entropy_of_entanglement(*match, spec));
    }

    dc::cli::RunManifest m;
    m.warnings = dc::cli::standard_warnings(cfg, cfg.t_final);
    if (master.truncation_warning)
        m.warnings.emplace_back("cavity population approached the Fock cutoff");
    dc::cli::Series cols{{"time", master.times},
                         {"entropy_branches", e_branch},
                         {"entropy_trajectory", e_traj},
                         {"entropy_master", e_master}};
    write_data(ctx, cols, m);
    ctx.finish(m);
    return 0;
}

// The conditioned field correlation h(tau) from the closed-form branch
// states: coherent and incoherent within-branch averages plus the
// short-time approximation they are compared against.
int run_hft(const RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    const SpaceSpec spec{cfg.n_max};
    const dc::correlations::QuadratureSpec quad{cfg.theta};
    const std::vector<double> ts =
        stride_grid(cfg.t_final, cfg.dt, sample_stride(cfg.dt));

    const auto coh = dc::correlations::hft_from_branches(ts, cfg.params, spec, quad, true);
    const auto inc = dc::correlations::hft_from_branches(ts, cfg.params, spec, quad, false);
    const auto app = dc::correlations::hft_approx(ts, cfg.params, true);

    dc::cli::RunManifest m;
    m.warnings = dc::cli::standard_warnings(cfg, cfg.t_final);
    dc::cli::Series cols{{"time", std::vector<double>(ts)},
                         {"h_coherent", coh.values},
                         {"h_incoherent", inc.values},
                         {"h_approx", app.values}};
    write_data(ctx, cols, m);
    ctx.finish(m);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"single atom in a driven lossy cavity: simulation experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dc::kVersion);

    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::string> out_flag;
    std::optional<int> ntraj_flag;
    std::optional<double> theta_flag;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed_flag, "RNG seed (wins over config)");
    app.add_option("--out", out_flag, "output directory (wins over config)");
    app.add_option("--ntraj", ntraj_flag, "trajectory count (wins over config)");
    app.add_option("--theta", theta_flag, "quadrature angle (wins over config)");

    // subcommand name -> (experiment, default t_final)
    struct SubSpec {
        const char* name;
        const char* help;
        const char* experiment;
        double default_t_final;
    };
    const SubSpec subs[] = {
        {"steady", "print the semiclassical steady state", "steady", 0.0},
        {"master", "master-equation observables from vacuum", "master", 1.0},
        {"traject", "quantum trajectory entropy and jump record", "traject", 10.0},
        {"fig1", "post-emission entropy: branches vs trajectory vs master",
         "branch_entropy", 3.0},
        {"fig2", "single-trajectory entropy with damping (gamma = 0.4 g)", "traject",
         100.0},
        {"fig3", "conditioned field correlation h(tau), branch averages",
         "hft", 4.0},
        {"realignment", "entanglement check of the schematic post-collapse mixture",
         "realignment", 0.0},
    };
    for (const auto& s : subs) app.add_subcommand(s.name, s.help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunContext ctx;
        for (const auto& s : subs) {
            if (app.get_subcommand(s.name)->parsed()) {
                ctx.subcommand = s.name;
                if (!config_path.empty()) dc::cli::load_config(config_path, ctx.cfg);
                ctx.cfg.experiment = s.experiment;
                if (ctx.cfg.t_final < 0.0) ctx.cfg.t_final = s.default_t_final;
                break;
            }
        }
        if (ctx.subcommand == "fig2" && !ctx.cfg.gamma_given)
            ctx.cfg.params.gamma = 0.4 * ctx.cfg.params.g;
        if (seed_flag) ctx.cfg.seed = *seed_flag;
        if (ntraj_flag) ctx.cfg.n_traj = *ntraj_flag;
        if (theta_flag) ctx.cfg.theta = *theta_flag;
        if (out_flag) ctx.cfg.out_dir = *out_flag;
        if (ctx.cfg.out_dir.empty()) {
            const char* env = std::getenv("DRIVENCAVITY_OUT");
            ctx.cfg.out_dir = env != nullptr ? env : ".";
        }
        ctx.cfg.validate();
        ctx.out_dir = ctx.cfg.out_dir;
        std::filesystem::create_directories(ctx.out_dir);

        if (ctx.cfg.experiment == "steady") return run_steady(ctx);
        if (ctx.cfg.experiment == "realignment") return run_realignment(ctx);
        if (ctx.cfg.experiment == "master") return run_master(ctx);
        if (ctx.cfg.experiment == "traject") return run_traject(ctx);
        if (ctx.cfg.experiment == "branch_entropy") return run_branch_entropy(ctx);
        if (ctx.cfg.experiment == "hft") return run_hft(ctx);
        std::cerr << "error: experiment '" << ctx.cfg.experiment << "' has no runner\n";
        return 1;
    } catch (const dc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
