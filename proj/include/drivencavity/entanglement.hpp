#pragma once

// Entanglement measures: entropy of entanglement for the atom-field split,
// the closed-form short-time approximation for a post-emission branch, and
// the realignment separability criterion.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dynamics.hpp"
#include "errors.hpp"
#include "hilbert.hpp"

namespace drivencavity::entanglement {

// Entropy in bits; at most 1 for a qubit subsystem.
using EntropyValue = double;

namespace detail {

// -sum lambda log2 lambda with eigenvalues below 1e-12 treated as exact
// zeros (they are truncation noise, not physics).
inline EntropyValue entropy_of_eigenvalues(const Eigen::VectorXd& ev) {
    double bits = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double lam = ev(i);
        if (lam > 1e-12) bits -= lam * std::log2(lam);
    }
    return bits < 0.0 ? 0.0 : bits;
}

} // namespace detail

// E = -Tr(rho log2 rho) of the reduced atomic state.
inline EntropyValue entropy_of_entanglement(const Eigen::Matrix2cd& rho_atom) {
    hilbert::validate_density(rho_atom, /*check_positivity=*/true);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho_atom,
                                                       Eigen::EigenvaluesOnly);
    return detail::entropy_of_eigenvalues(es.eigenvalues());
}

// Same measure from any reduced density operator (used for the field-side
// reduction, whose rank stays small even though its dimension does not).
inline EntropyValue entropy_of_entanglement(const DensityOperator& rho) {
    hilbert::validate_density(rho, /*check_positivity=*/true);
    Eigen::SelfAdjointEigenSolver<DensityOperator> es(rho, Eigen::EigenvaluesOnly);
    return detail::entropy_of_eigenvalues(es.eigenvalues());
}

// Entropy straight from a pure composite state via the atomic reduction.
inline EntropyValue entropy_of_entanglement(const StateVector& psi,
                                            const SpaceSpec& spec) {
    Eigen::Matrix2cd rho = hilbert::partial_trace_field(psi, spec);
    // A pure state's reduction is Hermitian PSD up to roundoff; symmetrize
    // instead of re-validating.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return detail::entropy_of_eigenvalues(ev);
}

struct CollapseFunctions {
    double u = 0.0;  // field-component overlap, e^{-g^2 t^2 / 2}
    double f1 = 0.0; // corrected variant (see below)
    double f2 = 0.0;
};

// f1 exactly as printed in the source expression,
//   (u ln((1-u)/(1+u)) - ln(1-u^2)) / ln 4,
// which evaluates to -1 at u=1 and 0 at u=0. Kept callable because the
// corrected variant is defined against it.
inline double collapse_f1_printed(double u) {
    if (u < 0.0 || u > 1.0)
        throw DomainError("collapse_f1_printed: u must be in [0, 1]");
    if (u == 1.0) return -1.0;
    if (u == 0.0) return 0.0;
    const double l1m = std::log1p(-u), l1p = std::log1p(u);
    return ((u - 1.0) * l1m - (u + 1.0) * l1p) / std::log(4.0);
}

// The printed f1 is the binary entropy of the Schmidt weights (1 pm u)/2
// minus one; the stated limits (f1 = 0 at t=0, f1 -> 1 after the collapse)
// match the entropy itself, so the +1 offset is restored here.
inline CollapseFunctions collapse_functions(double u) {
    if (u < 0.0 || u > 1.0)
        throw DomainError("collapse_functions: u must be in [0, 1]");
    CollapseFunctions out;
    out.u = u;
    out.f1 = 1.0 + collapse_f1_printed(u);
    if (u == 1.0) {
        out.f2 = 1.0 / (2.0 * std::log(2.0));
    } else if (u == 0.0) {
        out.f2 = 0.0;
    } else {
        const double l1m = std::log1p(-u), l1p = std::log1p(u);
        out.f2 = (2.0 * u * (1.0 - std::log(2.0)) + u * (l1m + l1p) +
                  (l1p - l1m)) /
                 std::log(16.0);
    }
    return out;
}

// Short-time branch entropy approximation:
//   E ~ f1(u) - f2(u) sin(2 g r t) (g t / r) - (g t / r)^2 / (8 ln 2),
// u = e^{-g^2 t^2/2}, clamped to [0, 1]. phi_ss does not enter the formula;
// it is accepted so callers can pass the full operating point symmetrically
// with the correlation approximation.
inline EntropyValue approx_entropy(double t, const dynamics::SystemParams& p,
                                   double r, [[maybe_unused]] double phi_ss) {
    if (t < 0.0) throw DomainError("approx_entropy: t must be >= 0");
    if (r <= 0.0) throw DomainError("approx_entropy: r must be > 0");
    const double gt = p.g * t;
    const double u = std::exp(-0.5 * gt * gt);
    const CollapseFunctions cf = collapse_functions(u);
    const double x = gt / r;
    double e = cf.f1 - cf.f2 * std::sin(2.0 * p.g * r * t) * x -
               x * x / (8.0 * std::log(2.0));
    if (e < 0.0) e = 0.0;
    if (e > 1.0) e = 1.0;
    return e;
}

// Trace norm of the realignment R[(i,j),(k,l)] = rho[(i,k),(j,l)] of a
// density operator on a dim_a x dim_b product space; > 1 certifies
// entanglement, every separable state stays <= 1.
inline double realignment_trace_norm(const DensityOperator& rho, int dim_a,
                                     int dim_b) {
    if (dim_a < 1 || dim_b < 1 || rho.rows() != rho.cols() ||
        rho.rows() != static_cast<Eigen::Index>(dim_a) * dim_b)
        throw DimensionError("realignment_trace_norm: dim_a*dim_b != matrix size");
    Eigen::MatrixXcd r(dim_a * dim_a, dim_b * dim_b);
    for (int i = 0; i < dim_a; ++i)
        for (int j = 0; j < dim_a; ++j)
            for (int k = 0; k < dim_b; ++k)
                for (int l = 0; l < dim_b; ++l)
                    r(i * dim_a + j, k * dim_b + l) =
                        rho(i * dim_b + k, j * dim_b + l);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r);
    return svd.singularValues().sum();
}

// The post-collapse-time mixture written with four orthonormal field states
// |1>..|4>, atom-major on a 2x4 space. Each branch is (moving - stationary)
// component with the drifted atomic phase still at its starting value:
//   |Psi_u> = -1/2 |1>(e^{+i phi}|e> - |g>) + 1/2 |2>(e^{+i phi}|e> + |g>)
//   |Psi_l> = +1/2 |3>(e^{-i phi}|e> + |g>) - 1/2 |4>(e^{-i phi}|e> - |g>)
// as_printed=true restores the source's |4> atomic factor e^{+i phi}|e> - |g>,
// which breaks the sqrt(2) realignment value; the corrected e^{-i phi}
// version is the one consistent with the l-branch structure (both l
// components carry the lower atomic phase) and reproduces sqrt(2) exactly.
inline DensityOperator schematic_post_collapse_mixture(double phi_ss,
                                                       bool as_printed = false) {
    if (!(phi_ss > 0.0) || !(phi_ss < std::numbers::pi / 2.0))
        throw DomainError("schematic_post_collapse_mixture: need 0 < phi_ss < pi/2");
    const Complex i(0.0, 1.0);
    const Complex eu = std::exp(i * phi_ss);  // upper-branch atomic phase
    const Complex el = std::exp(-i * phi_ss); // lower-branch atomic phase

    // index = atom*4 + field, atom 0 = |e>, 1 = |g>, field slots 0..3 = |1>..|4>
    Eigen::VectorXcd psi_u = Eigen::VectorXcd::Zero(8);
    psi_u(0) = -0.5 * eu; // |e>|1>
    psi_u(4) = +0.5;      // |g>|1>
    psi_u(1) = +0.5 * eu; // |e>|2>
    psi_u(5) = +0.5;      // |g>|2>

    Eigen::VectorXcd psi_l = Eigen::VectorXcd::Zero(8);
    psi_l(2) = +0.5 * el; // |e>|3>
    psi_l(6) = +0.5;      // |g>|3>
    psi_l(3) = -0.5 * (as_printed ? eu : el); // |e>|4>
    psi_l(7) = +0.5;      // |g>|4>

    return 0.5 * (psi_u * psi_u.adjoint()) + 0.5 * (psi_l * psi_l.adjoint());
}

} // namespace drivencavity::entanglement
