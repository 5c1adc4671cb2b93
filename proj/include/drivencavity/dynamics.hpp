#pragma once

// Open-system dynamics on resonance:
//
//   drho/dt = -i g [a^+ s- + a s+, rho] + E [a^+ - a, rho]
//             + kappa (2 a rho a^+ - a^+a rho - rho a^+a)
//             + (gamma/2) (2 s- rho s+ - s+s- rho - rho s+s-)
//
// The drive commutator has no -i because the drive Hamiltonian is
// i E (a^+ - a), which is Hermitian. Grouping the coherent part and the
// anticommutator halves of both dissipators into one non-Hermitian
// generator G = -iH - kappa a^+a - (gamma/2) s+s- gives
//   L(rho) = G rho + rho G^+ + 2 kappa a rho a^+ + gamma s- rho s+,
// which is what the integrator applies (6 dense products per call).

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "hilbert.hpp"

namespace drivencavity {

namespace detail {

// Classic RK4 over a generic right-hand side; shared by the density matrix
// propagator and the trajectory drift (hence the template).
template <typename State, typename Rhs>
State rk4_step(const State& y, double dt, Rhs&& rhs) {
    State k1 = rhs(y);
    State k2 = rhs(y + (0.5 * dt) * k1);
    State k3 = rhs(y + (0.5 * dt) * k2);
    State k4 = rhs(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double top_level_population(const DensityOperator& rho, const SpaceSpec& spec) {
    const int n = spec.n_max;
    return std::abs(rho(spec.index(0, n), spec.index(0, n))) +
           std::abs(rho(spec.index(1, n), spec.index(1, n)));
}

} // namespace detail

namespace dynamics {

struct SystemParams {
    double g = 1.0;      // atom-field coupling; also the unit of rate
    double drive = 0.0;  // coherent drive amplitude E
    double kappa = 0.0;  // cavity field decay rate
    double gamma = 0.0;  // atomic spontaneous emission rate

    void validate() const {
        if (!(g > 0.0)) throw ConfigError("SystemParams: g must be > 0");
        if (drive < 0.0) throw ConfigError("SystemParams: drive must be >= 0");
        if (kappa < 0.0) throw ConfigError("SystemParams: kappa must be >= 0");
        if (gamma < 0.0) throw ConfigError("SystemParams: gamma must be >= 0");
    }
};

// Non-Hermitian drift generator G (see header comment).
inline OperatorMatrix drift_generator(const SystemParams& p, const hilbert::CavityOperators& ops) {
    const Complex i(0.0, 1.0);
    OperatorMatrix h = p.g * (ops.a_dagger * ops.sigma_minus + ops.a * ops.sigma_plus);
    h += i * p.drive * (ops.a_dagger - ops.a);
    OperatorMatrix g_mat = -i * h;
    g_mat -= p.kappa * ops.number;
    g_mat -= 0.5 * p.gamma * (ops.sigma_plus * ops.sigma_minus);
    return g_mat;
}

// One application of the Liouvillian. Trace-free and linear by construction.
inline DensityOperator liouvillian_apply(const DensityOperator& rho,
                                         const SystemParams& p,
                                         const hilbert::CavityOperators& ops) {
    if (rho.rows() != ops.spec.dim() || rho.cols() != ops.spec.dim())
        throw DimensionError("liouvillian_apply: dimension mismatch");
    const OperatorMatrix g_mat = drift_generator(p, ops);
    DensityOperator out = g_mat * rho;
    out.noalias() += rho * g_mat.adjoint();
    if (p.kappa != 0.0) out.noalias() += (2.0 * p.kappa) * (ops.a * rho * ops.a_dagger);
    if (p.gamma != 0.0) out.noalias() += p.gamma * (ops.sigma_minus * rho * ops.sigma_plus);
    return out;
}

// Step-size guard. Couplings act on amplitudes ~ sqrt(n_max), decay rates on
// populations ~ n_max; both products must stay well under the RK4 stability
// limit. The 0.1 bound keeps the per-step local error near roundoff.
inline void check_step_size(double dt, const SystemParams& p, const SpaceSpec& spec) {
    if (!(dt > 0.0)) throw StepSizeError("dt must be > 0");
    const double nd = spec.n_max + 1.0;
    const double stiffness = std::max(std::max(p.kappa, p.gamma) * nd,
                                      std::max(p.g, p.drive) * std::sqrt(nd));
    if (dt * stiffness >= 0.1)
        throw StepSizeError("dt too large: dt * stiffest rate = " +
                            std::to_string(dt * stiffness) + " (limit 0.1)");
}

struct MasterOptions {
    double t_final = 1.0;
    double dt = 0.002;
    int sample_stride = 10;        // store every sample_stride-th step
    double truncation_limit = 1e-6; // max tolerated top-Fock-level population
};

struct MasterResult {
    std::vector<double> times;
    std::vector<DensityOperator> states;
    double max_trace_drift = 0.0;
    int renormalizations = 0;
    bool truncation_warning = false;
};

// Fixed-step RK4 master-equation propagation. Samples (including t=0) are
// stored every sample_stride steps plus at t_final. The trace is monitored at
// every sample and renormalized only when it drifts beyond 1e-8.
inline MasterResult integrate_master(const DensityOperator& rho0,
                                     const SystemParams& p,
                                     const SpaceSpec& spec,
                                     const MasterOptions& opt) {
    p.validate();
    spec.validate();
    check_step_size(opt.dt, p, spec);
    if (opt.t_final < 0.0) throw ConfigError("integrate_master: t_final must be >= 0");
    if (opt.sample_stride < 1) throw ConfigError("integrate_master: sample_stride must be >= 1");
    hilbert::validate_density(rho0);

    const hilbert::CavityOperators ops = hilbert::build_operators(spec);
    const OperatorMatrix g_mat = drift_generator(p, ops);
    const OperatorMatrix g_adj = g_mat.adjoint();
    const auto rhs = [&](const DensityOperator& r) {
        DensityOperator out = g_mat * r;
        out.noalias() += r * g_adj;
        if (p.kappa != 0.0) out.noalias() += (2.0 * p.kappa) * (ops.a * r * ops.a_dagger);
        if (p.gamma != 0.0) out.noalias() += p.gamma * (ops.sigma_minus * r * ops.sigma_plus);
        return out;
    };

    const long n_steps = std::lround(std::ceil(opt.t_final / opt.dt - 1e-9));
    MasterResult res;
    DensityOperator rho = rho0;

    const auto sample = [&](long step) {
        const double tr = rho.trace().real();
        res.max_trace_drift = std::max(res.max_trace_drift, std::abs(tr - 1.0));
        if (std::abs(tr - 1.0) > 1e-8) {
            rho /= tr;
            ++res.renormalizations;
        }
        const double top = detail::top_level_population(rho, spec);
        if (top > opt.truncation_limit)
            throw TruncationError("integrate_master: population reached the Fock cutoff");
        if (top > 0.01 * opt.truncation_limit) res.truncation_warning = true;
        res.times.push_back(step * opt.dt);
        res.states.push_back(rho);
    };

    sample(0);
    for (long s = 1; s <= n_steps; ++s) {
        rho = detail::rk4_step(rho, opt.dt, rhs);
        if (s % opt.sample_stride == 0 || s == n_steps) sample(s);
    }
    return res;
}

// --- semiclassical (factorized) description, gamma = 0 -------------------

struct SemiclassicalPoint {
    double r = 0.0;    // field amplitude, <a> = r e^{-i phi}
    double phi = 0.0;  // phase parameter; the field mean carries e^{-i phi}
    Eigen::Vector3d bloch = Eigen::Vector3d::Zero(); // (<sx>, <sy>, <sz>)
};

struct SteadyStatePair {
    double phi_ss = 0.0;
    double r_ss = 0.0;
    SemiclassicalPoint upper; // Im<a> > 0, phi = -phi_ss, dipole sign -
    SemiclassicalPoint lower; // Im<a> < 0, phi = +phi_ss, dipole sign +
};

// phi_ss = arcsin(g / 2E), r_ss = (E/kappa) cos(phi_ss). Requires E > g/2.
// Fixed points of d<a>/dt: E - kappa alpha - i g <s-> = 0 with <s-> on the
// equator. upper has <a> in the upper half plane and dipole <s-> = -e^{+i
// phi_ss}/2; lower mirrors it. branches.hpp builds the matching pure states.
inline SteadyStatePair semiclassical_steady_state(const SystemParams& p) {
    p.validate();
    if (!(p.kappa > 0.0)) throw ConfigError("semiclassical_steady_state: kappa must be > 0");
    const double s = p.g / (2.0 * p.drive);
    if (!(p.drive > 0.0) || s >= 1.0)
        throw WeakDrivingError("semiclassical_steady_state: needs drive > g/2");
    SteadyStatePair out;
    out.phi_ss = std::asin(s);
    out.r_ss = (p.drive / p.kappa) * std::cos(out.phi_ss);
    const double c = std::cos(out.phi_ss), sn = std::sin(out.phi_ss);
    out.upper = {out.r_ss, -out.phi_ss, Eigen::Vector3d(-c, sn, 0.0)};
    out.lower = {out.r_ss, +out.phi_ss, Eigen::Vector3d(+c, sn, 0.0)};
    return out;
}

// Factorized Maxwell-Bloch derivatives on resonance with gamma = 0
// (spontaneous emission enters only the full quantum dynamics):
//   d<a>/dt  = E - kappa <a> - i g <s->
//   d<s->/dt = i g <a> <sz>
//   d<sz>/dt = 2 i g (<a*><s-> - <a><s+>)
struct SemiclassicalDerivs {
    double dr = 0.0;
    double dphi = 0.0;
    Eigen::Vector3d dbloch = Eigen::Vector3d::Zero();
};

inline SemiclassicalDerivs semiclassical_rhs(const SemiclassicalPoint& pt,
                                             const SystemParams& p) {
    p.validate();
    const Complex i(0.0, 1.0);
    const Complex alpha = pt.r * std::exp(-i * pt.phi);
    const Complex sm = 0.5 * Complex(pt.bloch.x(), -pt.bloch.y());
    const double sz = pt.bloch.z();

    const Complex dalpha = p.drive - p.kappa * alpha - i * p.g * sm;
    const Complex dsm = i * p.g * alpha * sz;
    const double dsz = 2.0 * p.g * (alpha.real() * pt.bloch.y() + alpha.imag() * pt.bloch.x());

    SemiclassicalDerivs d;
    // d/dt (r e^{-i phi}) = (dr - i r dphi') e^{-i phi} with dphi' = -dphi on
    // the phi parameter: project dalpha back onto the (r, phi) chart.
    const Complex rot = dalpha * std::exp(i * pt.phi);
    d.dr = rot.real();
    d.dphi = (pt.r > 1e-12) ? -rot.imag() / pt.r : 0.0;
    d.dbloch.x() = 2.0 * dsm.real();
    d.dbloch.y() = -2.0 * dsm.imag();
    d.dbloch.z() = dsz;
    return d;
}

// Trace distance (1/2)||r1 - r2||_1 between density operators.
inline double trace_distance(const DensityOperator& r1, const DensityOperator& r2) {
    if (r1.rows() != r2.rows() || r1.cols() != r2.cols())
        throw DimensionError("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<DensityOperator> es(r1 - r2, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Fidelity <psi|rho|psi> of a mixed state against a pure target.
inline double fidelity(const StateVector& psi, const DensityOperator& rho) {
    if (psi.size() != rho.rows())
        throw DimensionError("fidelity: dimension mismatch");
    return std::real(psi.dot(rho * psi));
}

} // namespace dynamics
} // namespace drivencavity
