#pragma once

// Monte-Carlo wavefunction unraveling of the master equation with two jump
// channels (cavity photon loss, spontaneous emission).
//
// Per step of size dt, on the current normalized state:
//   dp = dt * (2 kappa <a^+a> + gamma <sigma_+ sigma_->)
// One uniform draw u per step, consumed whether or not a jump occurs:
//   u <  dp : jump. Channel is cavity_emission when u falls in the first
//             dt*2kappa<a^+a> of the interval, spontaneous otherwise; apply
//             a or sigma_- and renormalize. The drift is skipped that step.
//   u >= dp : RK4 drift under the non-Hermitian generator G, renormalized.
// A spontaneous jump copies the excited block into the ground block and
// zeroes the former, so the atom is bitwise exactly in |g>.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dynamics.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "hilbert.hpp"
#include "rng.hpp"

namespace drivencavity::trajectories {

enum class JumpChannel { cavity_emission, spontaneous_emission };

struct JumpRecord {
    double time = 0.0;
    JumpChannel channel = JumpChannel::cavity_emission;
};

struct TrajectorySample {
    double time = 0.0;
    StateVector state;
    bool after_jump = false; // sample was forced by a jump at this time
};

struct TrajectoryResult {
    std::vector<TrajectorySample> samples;
    std::vector<JumpRecord> jumps;
    std::uint64_t seed = 0;
};

struct TrajectoryOptions {
    double t_final = 1.0;
    double dt = 0.002;
    int sample_stride = 10;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

namespace detail {

inline double excited_population(const StateVector& psi, const SpaceSpec& spec) {
    return psi.segment(0, spec.field_dim()).squaredNorm();
}

inline double photon_number(const StateVector& psi, const SpaceSpec& spec) {
    const int fd = spec.field_dim();
    double n = 0.0;
    for (int atom = 0; atom < 2; ++atom)
        for (int k = 1; k < fd; ++k)
            n += k * std::norm(psi(atom * fd + k));
    return n;
}

} // namespace detail

inline TrajectoryResult evolve_trajectory(const StateVector& psi0,
                                          const dynamics::SystemParams& p,
                                          const SpaceSpec& spec,
                                          const TrajectoryOptions& opt,
                                          std::uint64_t seed,
                                          std::uint64_t trajectory_index = 0) {
    p.validate();
    spec.validate();
    dynamics::check_step_size(opt.dt, p, spec);
    if (opt.t_final < 0.0) throw ConfigError("evolve_trajectory: t_final must be >= 0");
    if (opt.sample_stride < 1)
        throw ConfigError("evolve_trajectory: sample_stride must be >= 1");
    if (psi0.size() != spec.dim())
        throw DimensionError("evolve_trajectory: psi0 dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw NormalizationError("evolve_trajectory: psi0 must be normalized");

    const hilbert::CavityOperators ops = hilbert::build_operators(spec);
    const OperatorMatrix g_mat = dynamics::drift_generator(p, ops);
    const auto rhs = [&](const StateVector& v) -> StateVector { return g_mat * v; };

    SplitMix64 rng = trajectory_rng(seed, trajectory_index);
    const long n_steps = std::lround(std::ceil(opt.t_final / opt.dt - 1e-9));
    const int fd = spec.field_dim();

    TrajectoryResult res;
    res.seed = seed;
    StateVector psi = psi0;
    res.samples.push_back({0.0, psi, false});

    for (long s = 1; s <= n_steps; ++s) {
        const double rate_cavity = 2.0 * p.kappa * detail::photon_number(psi, spec);
        const double rate_spont = p.gamma * detail::excited_population(psi, spec);
        const double dp = opt.dt * (rate_cavity + rate_spont);
        if (dp > 0.1)
            throw StepSizeError("evolve_trajectory: jump probability per step " +
                                std::to_string(dp) + " exceeds 0.1");
        const double u = rng.next_double();
        bool jumped = false;
        if (u < dp) {
            jumped = true;
            const double t_jump = s * opt.dt;
            if (u < opt.dt * rate_cavity) {
                psi = ops.a * psi;
                res.jumps.push_back({t_jump, JumpChannel::cavity_emission});
            } else {
                StateVector collapsed = StateVector::Zero(spec.dim());
                collapsed.segment(fd, fd) = psi.segment(0, fd);
                psi = collapsed;
                res.jumps.push_back({t_jump, JumpChannel::spontaneous_emission});
            }
            psi = hilbert::normalized(psi);
        } else {
            psi = drivencavity::detail::rk4_step(psi, opt.dt, rhs);
            psi.normalize();
        }
        if (jumped || s % opt.sample_stride == 0 || s == n_steps)
            res.samples.push_back({s * opt.dt, psi, jumped});
    }
    return res;
}

namespace detail {

// Index-ordered pairwise reduction; the summation tree depends only on the
// number of terms, so the result is independent of evaluation order.
inline DensityOperator pairwise_mean(const std::vector<const StateVector*>& states,
                                     std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        const StateVector& v = *states[lo];
        return v * v.adjoint();
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_mean(states, lo, mid) + pairwise_mean(states, mid, hi);
}

} // namespace detail

// Ensemble-averaged density operator at each requested grid time. Every
// result must contain a sample at every grid time (stride samples land on
// the same s*dt doubles in every trajectory, so matching is exact).
inline std::vector<DensityOperator> ensemble_density(
    const std::vector<TrajectoryResult>& results,
    const std::vector<double>& grid_times, const SpaceSpec& spec) {
    if (results.empty()) throw ConfigError("ensemble_density: empty ensemble");
    std::vector<DensityOperator> out;
    out.reserve(grid_times.size());
    for (double t : grid_times) {
        std::vector<const StateVector*> states;
        states.reserve(results.size());
        for (const auto& res : results) {
            const StateVector* found = nullptr;
            for (const auto& sample : res.samples) {
                if (std::abs(sample.time - t) < 1e-12) {
                    found = &sample.state; // keep the last match (post-jump)
                }
            }
            if (!found)
                throw ConfigError("ensemble_density: a trajectory has no sample at t=" +
                                  std::to_string(t));
            states.push_back(found);
        }
        out.push_back(detail::pairwise_mean(states, 0, states.size()) /
                      double(states.size()));
    }
    return out;
}

// Entropy of entanglement at every sample of a single trajectory. Samples
// forced by spontaneous emission evaluate to exactly zero because the state
// factorizes with the atom in |g>.
inline TimeSeries entanglement_series(const TrajectoryResult& result,
                                      const SpaceSpec& spec) {
    TimeSeries out;
    out.times.reserve(result.samples.size());
    out.values.reserve(result.samples.size());
    for (const auto& sample : result.samples) {
        out.times.push_back(sample.time);
        out.values.push_back(
            entanglement::entropy_of_entanglement(sample.state, spec));
    }
    return out;
}

} // namespace drivencavity::trajectories
