#pragma once

// Closed-form factorizable states and post-emission branch states.
//
// Building block (atom phase tied to field phase):
//   |Psi0_pm(r0, phi0)> = (1/sqrt2)(e^{-i phi0}|e> pm |g>) (x) |r0 e^{-i phi0}>
// with <sigma_-> = pm e^{-i phi0}/2 and <a> = r0 e^{-i phi0}.
//
// Which sign goes with which steady-state phase is fixed by stationarity of
// the field mean, E - kappa<a> - ig<sigma_-> = 0 with E real:
//   pm = -  at phi0 = -phi_ss  (field mean in the upper half plane, branch u)
//   pm = +  at phi0 = +phi_ss  (lower half plane, branch l)
// Any other (sign, phi0) combination drifts in phase at a rate close to g/r,
// toward that sign's own fixed point. A post-emission branch is therefore a
// stationary component plus a drifting one:
//   |Psi_u(t)> = (1/sqrt2)(e^{-i g r t/2}|Psi0_+(r, -phi + gt/r)>
//                          - e^{+i g r t/2}|Psi0_-(r, -phi)>)
//   |Psi_l(t)> = (1/sqrt2)(e^{-i g r t/2}|Psi0_+(r, +phi)>
//                          - e^{+i g r t/2}|Psi0_-(r, +phi - gt/r)>)
// At t=0 the atomic parts cancel to |g>, which is exactly the post-emission
// product state. The global phases e^{mp i g r t/2} make the cross term of
// the reduced atomic state rotate at 2gr, the Rabi beat the entropy and
// correlation approximations below rely on.

#include <array>
#include <cmath>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "dynamics.hpp"
#include "errors.hpp"
#include "hilbert.hpp"

namespace drivencavity::branches {

enum class Sign { plus, minus };
enum class Branch { u, l };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

struct FactorizableState {
    Sign sign = Sign::plus;
    double r = 0.0;            // field amplitude, >= 0
    double phi = 0.0;          // phi0 above; both factors carry e^{-i phi0}
    double global_phase = 0.0; // Phi; the realized vector carries e^{i Phi}
};

// Concrete vector for |Psi0_pm(r0, phi0)>, global phase 0.
inline StateVector special_state(Sign sign, double r0, double phi0,
                                 const SpaceSpec& spec) {
    if (r0 < 0.0) throw DomainError("special_state: r0 must be >= 0");
    const Complex i(0.0, 1.0);
    Eigen::Vector2cd atom;
    atom << std::exp(-i * phi0) / std::sqrt(2.0), sign_value(sign) / std::sqrt(2.0);
    const FieldVector field =
        hilbert::coherent_state(r0 * std::exp(-i * phi0), spec);
    return hilbert::atom_field_product(atom, field, spec);
}

inline StateVector realize(const FactorizableState& f, const SpaceSpec& spec) {
    const Complex i(0.0, 1.0);
    return std::exp(i * f.global_phase) * special_state(f.sign, f.r, f.phi, spec);
}

struct BranchTerm {
    Complex weight{0.0, 0.0};
    FactorizableState state;
};

struct BranchState {
    Branch branch = Branch::u;
    // terms[0] is the + component, terms[1] the - component; exactly one of
    // them is the stationary one (see file comment).
    std::array<BranchTerm, 2> terms;
    // Phase this branch carries when entering the u/l superposition; 0 for a
    // branch used alone.
    double relative_phase = 0.0;
};

// Instantaneous operating point override for emissions away from the
// semiclassical steady state. phi follows the same convention as phi_ss:
// branch u starts with the field at r e^{+i phi}, branch l at r e^{-i phi}.
struct BranchGeometry {
    double r = 0.0;
    double phi = 0.0;
};

// True when the short-time branch construction is degrading (phase drift no
// longer small compared to the component separation).
inline bool short_time_warning(double t, const dynamics::SystemParams& p,
                               double r) {
    return r > 0.0 && p.g * t / r > 0.5;
}

// True when the two steady-state field components overlap too much for the
// orthogonality assumptions behind the branch picture.
inline bool weak_orthogonality_warning(const dynamics::SystemParams& p) {
    const auto ss = dynamics::semiclassical_steady_state(p);
    return ss.r_ss * std::sin(ss.phi_ss) < 3.0;
}

inline BranchState describe_branch(Branch b, double t,
                                   const dynamics::SystemParams& p,
                                   std::optional<BranchGeometry> geom = {}) {
    p.validate();
    if (t < 0.0) throw DomainError("describe_branch: t must be >= 0");
    double r, phi;
    if (geom) {
        if (geom->r <= 0.0) throw DomainError("describe_branch: r must be > 0");
        r = geom->r;
        phi = geom->phi;
    } else {
        const auto ss = dynamics::semiclassical_steady_state(p);
        r = ss.r_ss;
        phi = ss.phi_ss;
    }
    const double w = 1.0 / std::sqrt(2.0);
    const double half_rabi = 0.5 * p.g * r * t; // magnitude of Phi_pm
    const double drift = p.g * t / r;

    BranchState out;
    out.branch = b;
    if (b == Branch::u) {
        out.terms[0] = {Complex(+w, 0.0),
                        {Sign::plus, r, -phi + drift, -half_rabi}};
        out.terms[1] = {Complex(-w, 0.0), {Sign::minus, r, -phi, +half_rabi}};
    } else {
        out.terms[0] = {Complex(+w, 0.0), {Sign::plus, r, +phi, -half_rabi}};
        out.terms[1] = {Complex(-w, 0.0),
                        {Sign::minus, r, +phi - drift, +half_rabi}};
    }
    return out;
}

// Sum of the two terms, renormalized exactly on the truncated space (the
// components are not orthogonal, so the nominal 1/sqrt2 weights do not give
// unit norm by themselves).
inline StateVector realize(const BranchState& bs, const SpaceSpec& spec) {
    StateVector psi = bs.terms[0].weight * realize(bs.terms[0].state, spec);
    psi += bs.terms[1].weight * realize(bs.terms[1].state, spec);
    return hilbert::normalized(psi);
}

inline StateVector branch_state(Branch b, double t,
                                const dynamics::SystemParams& p,
                                const SpaceSpec& spec,
                                std::optional<BranchGeometry> geom = {}) {
    return realize(describe_branch(b, t, p, geom), spec);
}

// (1/sqrt2)(|Psi_u(t)> + e^{-i Phi'}|Psi_l(t)>), renormalized exactly.
inline StateVector branch_superposition(double t,
                                        const dynamics::SystemParams& p,
                                        double relative_phase,
                                        const SpaceSpec& spec,
                                        std::optional<BranchGeometry> geom = {}) {
    const Complex i(0.0, 1.0);
    StateVector psi = branch_state(Branch::u, t, p, spec, geom);
    psi += std::exp(-i * relative_phase) * branch_state(Branch::l, t, p, spec, geom);
    return hilbert::normalized(psi);
}

// The conditionally pure steady state: an equal superposition of the two
// stationary components with a random relative phase Phi',
//   (1/sqrt2)(|Psi0_-(r_ss, -phi_ss)> + e^{-i Phi'}|Psi0_+(r_ss, +phi_ss)>).
inline StateVector conditional_steady_superposition(
    const dynamics::SystemParams& p, double relative_phase,
    const SpaceSpec& spec) {
    const auto ss = dynamics::semiclassical_steady_state(p);
    const Complex i(0.0, 1.0);
    StateVector psi = special_state(Sign::minus, ss.r_ss, -ss.phi_ss, spec);
    psi += std::exp(-i * relative_phase) *
           special_state(Sign::plus, ss.r_ss, +ss.phi_ss, spec);
    return hilbert::normalized(psi);
}

// Spontaneous-emission collapse: apply sigma_- and renormalize. The excited
// block moves to the ground block unchanged, so the atom factor is exactly
// |g> afterwards.
inline StateVector post_emission_collapse(const StateVector& psi,
                                          const SpaceSpec& spec) {
    if (psi.size() != spec.dim())
        throw DimensionError("post_emission_collapse: dimension mismatch");
    const int fd = spec.field_dim();
    const double excited = psi.segment(0, fd).squaredNorm();
    if (excited <= 1e-12)
        throw ZeroAmplitudeError("post_emission_collapse: no excited amplitude");
    StateVector out = StateVector::Zero(spec.dim());
    out.segment(fd, fd) = psi.segment(0, fd);
    return hilbert::normalized(out);
}

// Within-branch coherence decay between the two field components while the
// cavity leaks which-path information, exp(-g^2 kappa t^3 / 3).
inline double decoherence_factor(double t, const dynamics::SystemParams& p) {
    if (t < 0.0) throw DomainError("decoherence_factor: t must be >= 0");
    return std::exp(-p.g * p.g * p.kappa * t * t * t / 3.0);
}

// |<r e^{i phi_a} | r e^{i phi_b}>| = exp(-r^2 (1 - cos(phi_a - phi_b))).
inline double field_orthogonality(double r, double phi_a, double phi_b) {
    if (r < 0.0) throw DomainError("field_orthogonality: r must be >= 0");
    return std::exp(-r * r * (1.0 - std::cos(phi_a - phi_b)));
}

} // namespace drivencavity::branches

namespace drivencavity::dynamics {

// Incoherent mixture of the two stationary components; the approximate
// steady state of the full master equation for gamma = 0. Lives here with
// the deterministic-evolution API but is assembled from the branch states.
inline DensityOperator steady_state_mixture(const SystemParams& p,
                                            const SpaceSpec& spec) {
    const auto ss = semiclassical_steady_state(p);
    const StateVector upper =
        branches::special_state(branches::Sign::minus, ss.r_ss, -ss.phi_ss, spec);
    const StateVector lower =
        branches::special_state(branches::Sign::plus, ss.r_ss, +ss.phi_ss, spec);
    return 0.5 * (upper * upper.adjoint()) + 0.5 * (lower * lower.adjoint());
}

} // namespace drivencavity::dynamics
