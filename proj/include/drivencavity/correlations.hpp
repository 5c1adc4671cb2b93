#pragma once

// Intensity-field correlation h^FT(tau): the mean transmitted-field
// quadrature conditioned on a fluorescence detection at tau = 0, normalized
// by the unconditioned mean,
//   h^FT(tau) = <sigma_+(0) a_theta(tau) sigma_-(0)> / (<sigma_+sigma_-><a_theta>).
//
// Three computations of the same quantity:
//   hft_numeric        condition the density operator once (sigma_- rho
//                      sigma_+, renormalized) and propagate it with the full
//                      master equation; the reference the others are judged
//                      against.
//   hft_from_branches  evaluate <a_theta> on the closed-form branch states.
//                      The u and l contributions are always averaged
//                      incoherently (cross-branch coherence carries no mean
//                      field once the branch fields are near-orthogonal, and
//                      averaging keeps h(0) = 1 exact); the coherent flag
//                      controls only whether each branch's two components
//                      keep their relative phase or are mixed 50/50.
//   hft_approx         the small-gt/r closed form
//                      h - 1 = (tan(phi_ss) + u sin(2 g r t)) gt/(2r) - (gt/r)^2/4.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "branches.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "hilbert.hpp"

namespace drivencavity::correlations {

struct QuadratureSpec {
    double theta = 0.0; // a_theta = (a e^{-i theta} + a^+ e^{+i theta}) / 2
};

struct HftSeries {
    std::vector<double> taus;
    std::vector<double> values;
    double excitation_norm = 0.0; // <sigma_+ sigma_-> of the conditioning state
    double quadrature_norm = 0.0; // unconditioned <a_theta> in the denominator
};

namespace detail {

inline double quadrature_mean(Complex a_mean, double theta) {
    return std::real(std::exp(Complex(0.0, -theta)) * a_mean);
}

} // namespace detail

// Conditioned master-equation computation. taus must be nondecreasing; each
// is snapped to the integration step grid (the returned taus are the snapped
// values). dt is the master-equation step.
inline HftSeries hft_numeric(const DensityOperator& rho_init,
                             const dynamics::SystemParams& p,
                             const SpaceSpec& spec, const QuadratureSpec& quad,
                             const std::vector<double>& taus,
                             double dt = 0.002) {
    p.validate();
    spec.validate();
    dynamics::check_step_size(dt, p, spec);
    hilbert::validate_density(rho_init);
    if (taus.empty()) throw ConfigError("hft_numeric: empty tau grid");
    for (std::size_t k = 1; k < taus.size(); ++k)
        if (taus[k] < taus[k - 1])
            throw ConfigError("hft_numeric: taus must be nondecreasing");
    if (taus.front() < 0.0) throw ConfigError("hft_numeric: taus must be >= 0");

    const hilbert::CavityOperators ops = hilbert::build_operators(spec);
    const double excitation =
        std::real(hilbert::expectation(ops.sigma_plus * ops.sigma_minus, rho_init));
    if (excitation <= 1e-10)
        throw NormalizationError("hft_numeric: no excited population to condition on");
    const double denom = detail::quadrature_mean(
        hilbert::expectation(ops.a, rho_init), quad.theta);
    if (std::abs(denom) < 1e-10)
        throw NormalizationError("hft_numeric: unconditioned <a_theta> is zero");

    // sigma_- rho sigma_+ / Tr(...): the excited-excited block dropped into
    // the ground-ground slot.
    const int fd = spec.field_dim();
    DensityOperator rho_c = DensityOperator::Zero(spec.dim(), spec.dim());
    rho_c.block(fd, fd, fd, fd) = rho_init.block(0, 0, fd, fd);
    rho_c /= rho_c.trace();

    const OperatorMatrix g_mat = dynamics::drift_generator(p, ops);
    const OperatorMatrix g_adj = g_mat.adjoint();
    const auto rhs = [&](const DensityOperator& r) {
        DensityOperator out = g_mat * r;
        out.noalias() += r * g_adj;
        if (p.kappa != 0.0) out.noalias() += (2.0 * p.kappa) * (ops.a * r * ops.a_dagger);
        if (p.gamma != 0.0) out.noalias() += p.gamma * (ops.sigma_minus * r * ops.sigma_plus);
        return out;
    };

    HftSeries out;
    out.excitation_norm = excitation;
    out.quadrature_norm = denom;
    long step = 0;
    for (double tau : taus) {
        const long target = std::lround(tau / dt);
        for (; step < target; ++step)
            rho_c = drivencavity::detail::rk4_step(rho_c, dt, rhs);
        const double tr = std::real(rho_c.trace());
        if (std::abs(tr - 1.0) > 1e-8) rho_c /= tr;
        out.taus.push_back(target * dt);
        out.values.push_back(
            detail::quadrature_mean(hilbert::expectation(ops.a, rho_c), quad.theta) /
            denom);
    }
    return out;
}

// Closed-form branch-state computation (see file comment for how the
// coherent flag and the cross-branch average are meant).
inline HftSeries hft_from_branches(const std::vector<double>& ts,
                                   const dynamics::SystemParams& p,
                                   const SpaceSpec& spec,
                                   const QuadratureSpec& quad, bool coherent) {
    p.validate();
    spec.validate();
    const hilbert::CavityOperators ops = hilbert::build_operators(spec);
    const DensityOperator rho_ss = dynamics::steady_state_mixture(p, spec);
    const double denom = detail::quadrature_mean(
        hilbert::expectation(ops.a, rho_ss), quad.theta);
    if (std::abs(denom) < 1e-10)
        throw NormalizationError("hft_from_branches: unconditioned <a_theta> is zero");

    HftSeries out;
    out.excitation_norm =
        std::real(hilbert::expectation(ops.sigma_plus * ops.sigma_minus, rho_ss));
    out.quadrature_norm = denom;
    for (double t : ts) {
        double numer = 0.0;
        for (auto b : {branches::Branch::u, branches::Branch::l}) {
            if (coherent) {
                const StateVector psi = branches::branch_state(b, t, p, spec);
                numer += 0.5 * detail::quadrature_mean(
                                   hilbert::expectation(ops.a, psi), quad.theta);
            } else {
                const branches::BranchState bs = branches::describe_branch(b, t, p);
                for (const auto& term : bs.terms) {
                    const StateVector psi = branches::realize(term.state, spec);
                    numer += 0.25 * detail::quadrature_mean(
                                        hilbert::expectation(ops.a, psi), quad.theta);
                }
            }
        }
        out.taus.push_back(t);
        out.values.push_back(numer / denom);
    }
    return out;
}

// The small-gt/r closed form. with_oscillation=false drops the u sin(2grt)
// term (the u -> 0 reading used against the incoherent branch computation).
inline HftSeries hft_approx(const std::vector<double>& ts,
                            const dynamics::SystemParams& p,
                            bool with_oscillation = true) {
    const auto ss = dynamics::semiclassical_steady_state(p);
    HftSeries out;
    out.quadrature_norm = ss.r_ss * std::cos(ss.phi_ss);
    for (double t : ts) {
        if (t < 0.0) throw DomainError("hft_approx: t must be >= 0");
        const double gt = p.g * t;
        const double u =
            with_oscillation ? std::exp(-0.5 * gt * gt) : 0.0;
        const double x = gt / ss.r_ss;
        const double h = 1.0 +
                         (std::tan(ss.phi_ss) +
                          u * std::sin(2.0 * p.g * ss.r_ss * t)) *
                             0.5 * x -
                         0.25 * x * x;
        out.taus.push_back(t);
        out.values.push_back(h);
    }
    return out;
}

} // namespace drivencavity::correlations
