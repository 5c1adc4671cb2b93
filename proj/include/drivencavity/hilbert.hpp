#pragma once

// Truncated Hilbert space for one two-level atom coupled to one cavity mode.
//
// Conventions used everywhere in this library:
//   * atom basis index 0 = |e>, index 1 = |g>
//   * composite index = atom * (n_max + 1) + n   (atom-major, Fock fast)
//   * sigma_minus = |g><e| lowers the atom; a|alpha> = alpha|alpha>
// Tests pin these conventions; do not change one without the others.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace drivencavity {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using FieldVector = Eigen::VectorXcd;
using DensityOperator = Eigen::MatrixXcd;
using OperatorMatrix = Eigen::MatrixXcd;

inline constexpr double kCoherentTailLimit = 1e-8;

struct SpaceSpec {
    int n_max = 60;

    int field_dim() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }

    // composite index of |atom> (x) |n>
    int index(int atom, int n) const { return atom * field_dim() + n; }

    void validate() const {
        if (n_max < 0) throw DimensionError("SpaceSpec: n_max must be >= 0");
    }
};

namespace hilbert {

// Poisson weight the truncated basis misses for |alpha|^2 = nbar.
// Summed in log space so nbar ~ 10^3 does not underflow.
inline double coherent_tail_weight(double nbar, int n_max) {
    if (nbar == 0.0) return 0.0;
    double kept = 0.0;
    const double log_nbar = std::log(nbar);
    for (int n = 0; n <= n_max; ++n) {
        const double log_p = -nbar + n * log_nbar - std::lgamma(n + 1.0);
        kept += std::exp(log_p);
    }
    return kept >= 1.0 ? 0.0 : 1.0 - kept;
}

// Normalized truncated coherent state |alpha> on the field space alone.
// Amplitudes are exp(-|a|^2/2) a^n / sqrt(n!), magnitude built in log space.
inline FieldVector coherent_state(Complex alpha, const SpaceSpec& spec) {
    spec.validate();
    const double nbar = std::norm(alpha);
    const double tail = coherent_tail_weight(nbar, spec.n_max);
    if (tail > kCoherentTailLimit) {
        throw TruncationError("coherent_state: tail weight " + std::to_string(tail) +
                              " beyond n_max=" + std::to_string(spec.n_max));
    }
    FieldVector v(spec.field_dim());
    if (nbar == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    const double r = std::abs(alpha);
    const double theta = std::arg(alpha);
    const double log_r = std::log(r);
    for (int n = 0; n <= spec.n_max; ++n) {
        const double log_mag = -0.5 * nbar + n * log_r - 0.5 * std::lgamma(n + 1.0);
        v(n) = std::polar(std::exp(log_mag), n * theta);
    }
    v.normalize();
    return v;
}

// Closed-form overlap of untruncated coherent states, <alpha|beta>.
inline Complex coherent_overlap(Complex alpha, Complex beta) {
    return std::exp(-0.5 * std::norm(alpha) - 0.5 * std::norm(beta) +
                    std::conj(alpha) * beta);
}

struct CavityOperators {
    SpaceSpec spec;
    OperatorMatrix a;
    OperatorMatrix a_dagger;
    OperatorMatrix sigma_minus;
    OperatorMatrix sigma_plus;
    OperatorMatrix sigma_z;
    OperatorMatrix number;
    OperatorMatrix identity;
};

// Composite-space operators. a_dagger is a.adjoint() bitwise, so adjointness
// holds exactly; [a, a_dagger] = 1 only below the truncation corner.
inline CavityOperators build_operators(const SpaceSpec& spec) {
    spec.validate();
    const int fd = spec.field_dim();
    const int d = spec.dim();

    OperatorMatrix af = OperatorMatrix::Zero(fd, fd);
    for (int n = 1; n < fd; ++n) af(n - 1, n) = std::sqrt(double(n));

    CavityOperators ops;
    ops.spec = spec;
    ops.a = OperatorMatrix::Zero(d, d);
    ops.a.topLeftCorner(fd, fd) = af;
    ops.a.bottomRightCorner(fd, fd) = af;
    ops.a_dagger = ops.a.adjoint();

    ops.sigma_minus = OperatorMatrix::Zero(d, d);
    // |g><e| : block (atom=1, atom=0)
    ops.sigma_minus.block(fd, 0, fd, fd) = OperatorMatrix::Identity(fd, fd);
    ops.sigma_plus = ops.sigma_minus.adjoint();

    ops.sigma_z = OperatorMatrix::Zero(d, d);
    ops.sigma_z.topLeftCorner(fd, fd) = OperatorMatrix::Identity(fd, fd);
    ops.sigma_z.bottomRightCorner(fd, fd) = -OperatorMatrix::Identity(fd, fd);

    ops.number = ops.a_dagger * ops.a;
    ops.identity = OperatorMatrix::Identity(d, d);
    return ops;
}

// Kronecker product |atom> (x) |field| in the atom-major layout.
// Both inputs must already be normalized; the product is renormalized to
// absorb rounding only.
inline StateVector atom_field_product(const Eigen::Vector2cd& atom,
                                      const FieldVector& field,
                                      const SpaceSpec& spec) {
    if (field.size() != spec.field_dim())
        throw DimensionError("atom_field_product: field length != n_max+1");
    if (std::abs(atom.norm() - 1.0) > 1e-6 || std::abs(field.norm() - 1.0) > 1e-6)
        throw NormalizationError("atom_field_product: inputs must be normalized");
    StateVector out(spec.dim());
    out.segment(0, spec.field_dim()) = atom(0) * field;
    out.segment(spec.field_dim(), spec.field_dim()) = atom(1) * field;
    out.normalize();
    return out;
}

// Reduced 2x2 atomic state of a composite density operator.
inline Eigen::Matrix2cd partial_trace_field(const DensityOperator& rho,
                                            const SpaceSpec& spec) {
    if (rho.rows() != spec.dim() || rho.cols() != spec.dim())
        throw DimensionError("partial_trace_field: dimension mismatch");
    const int fd = spec.field_dim();
    Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho.block(i * fd, j * fd, fd, fd).trace();
    return out;
}

// Same reduction straight from a pure state, without forming the projector.
inline Eigen::Matrix2cd partial_trace_field(const StateVector& psi,
                                            const SpaceSpec& spec) {
    if (psi.size() != spec.dim())
        throw DimensionError("partial_trace_field: dimension mismatch");
    const int fd = spec.field_dim();
    Eigen::Matrix2cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = psi.segment(i * fd, fd).dot(psi.segment(j * fd, fd));
    // VectorXcd::dot conjugates its *this* argument, giving <seg_i* . seg_j>;
    // rho_A[i][j] = sum_n psi[i,n] conj(psi[j,n]) is the transpose of that.
    out = out.transpose().eval();
    return out;
}

// Reduced field state (traces out the atom).
inline DensityOperator partial_trace_atom(const DensityOperator& rho,
                                          const SpaceSpec& spec) {
    if (rho.rows() != spec.dim() || rho.cols() != spec.dim())
        throw DimensionError("partial_trace_atom: dimension mismatch");
    const int fd = spec.field_dim();
    return rho.block(0, 0, fd, fd) + rho.block(fd, fd, fd, fd);
}

inline DensityOperator partial_trace_atom(const StateVector& psi,
                                          const SpaceSpec& spec) {
    if (psi.size() != spec.dim())
        throw DimensionError("partial_trace_atom: dimension mismatch");
    const int fd = spec.field_dim();
    DensityOperator out = DensityOperator::Zero(fd, fd);
    for (int i = 0; i < 2; ++i) {
        const auto seg = psi.segment(i * fd, fd);
        out.noalias() += seg * seg.adjoint();
    }
    return out;
}

inline Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
    if (op.rows() != psi.size() || op.cols() != psi.size())
        throw DimensionError("expectation: dimension mismatch");
    return psi.dot(op * psi); // <psi|O|psi>
}

// Tr(O rho) = sum_ij O_ij rho_ji, computed without the full matrix product.
inline Complex expectation(const OperatorMatrix& op, const DensityOperator& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols())
        throw DimensionError("expectation: dimension mismatch");
    return op.cwiseProduct(rho.transpose()).sum();
}

inline StateVector normalized(const StateVector& psi) {
    const double n = psi.norm();
    if (n < 1e-300) throw NormalizationError("normalized: zero vector");
    return psi / n;
}

// Checks a density operator is Hermitian, unit trace and (optionally) PSD.
inline void validate_density(const DensityOperator& rho,
                             bool check_positivity = false,
                             double tol = 1e-7) {
    if (rho.rows() != rho.cols())
        throw InvalidDensityMatrix("density matrix must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw InvalidDensityMatrix("density matrix not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0)) > tol)
        throw InvalidDensityMatrix("density matrix trace != 1");
    if (check_positivity) {
        Eigen::SelfAdjointEigenSolver<DensityOperator> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol)
            throw InvalidDensityMatrix("density matrix has a negative eigenvalue");
    }
}

} // namespace hilbert
} // namespace drivencavity
