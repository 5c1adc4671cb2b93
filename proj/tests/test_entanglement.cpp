#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "drivencavity/branches.hpp"
#include "drivencavity/entanglement.hpp"

using namespace drivencavity;
using Catch::Approx;

namespace {

const dynamics::SystemParams kFig1{1.0, 0.7, 0.125, 0.0};
constexpr double kPhiSS = 0.7956029534845354;

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

Eigen::MatrixXcd random_unitary(int n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(dist(gen), dist(gen));
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

} // namespace

TEST_CASE("entropy limits and closed form", "[entanglement]") {
    Eigen::Matrix2cd pure = Eigen::Matrix2cd::Zero();
    pure(0, 0) = 1.0;
    REQUIRE(entanglement::entropy_of_entanglement(pure) == 0.0);

    REQUIRE(entanglement::entropy_of_entanglement(
                Eigen::Matrix2cd(0.5 * Eigen::Matrix2cd::Identity())) ==
            Approx(1.0).margin(1e-12));

    for (double p : {0.1, 0.25, 0.5, 0.9}) {
        Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
        rho(0, 0) = p;
        rho(1, 1) = 1.0 - p;
        REQUIRE(entanglement::entropy_of_entanglement(rho) ==
                Approx(binary_entropy(p)).margin(1e-12));
    }
}

TEST_CASE("entropy input validation", "[entanglement]") {
    Eigen::Matrix2cd bad_trace = Eigen::Matrix2cd::Identity();
    REQUIRE_THROWS_AS(entanglement::entropy_of_entanglement(bad_trace),
                      InvalidDensityMatrix);

    Eigen::Matrix2cd not_herm = Eigen::Matrix2cd::Zero();
    not_herm(0, 0) = 1.0;
    not_herm(0, 1) = 0.2;
    REQUIRE_THROWS_AS(entanglement::entropy_of_entanglement(not_herm),
                      InvalidDensityMatrix);

    // eigenvalue at -1e-8 is within tolerance and clamps to zero
    Eigen::Matrix2cd tiny_neg = Eigen::Matrix2cd::Zero();
    tiny_neg(0, 0) = 1.0 + 1e-8;
    tiny_neg(1, 1) = -1e-8;
    const double e = entanglement::entropy_of_entanglement(tiny_neg);
    REQUIRE(std::isfinite(e));
    REQUIRE(e < 1e-6);

    Eigen::Matrix2cd too_neg = Eigen::Matrix2cd::Zero();
    too_neg(0, 0) = 1.2;
    too_neg(1, 1) = -0.2;
    REQUIRE_THROWS_AS(entanglement::entropy_of_entanglement(too_neg),
                      InvalidDensityMatrix);
}

TEST_CASE("mixture of two pure states has the chord spectrum", "[entanglement]") {
    // eigenvalues of (P1 + P2)/2 are (1 +- |<psi1|psi2>|)/2
    Eigen::Vector2cd a, b;
    a << 0.8, Complex(0.0, 0.6);
    b << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    const double ov = std::abs(a.dot(b));
    Eigen::Matrix2cd rho =
        0.5 * (a * a.adjoint()) + 0.5 * (b * b.adjoint());
    REQUIRE(entanglement::entropy_of_entanglement(rho) ==
            Approx(binary_entropy(0.5 * (1.0 + ov))).margin(1e-12));
}

TEST_CASE("entropy is invariant under local unitaries", "[entanglement]") {
    SpaceSpec spec{15};
    StateVector psi = StateVector::Random(spec.dim());
    psi.normalize();
    const double base = entanglement::entropy_of_entanglement(psi, spec);

    const Eigen::MatrixXcd ua = random_unitary(2, 7);
    const Eigen::MatrixXcd uf = random_unitary(spec.field_dim(), 8);
    StateVector rotated(spec.dim());
    const int fd = spec.field_dim();
    // (U_atom (x) U_field) psi in the atom-major layout
    for (int i = 0; i < 2; ++i) {
        rotated.segment(i * fd, fd).setZero();
        for (int j = 0; j < 2; ++j)
            rotated.segment(i * fd, fd) += ua(i, j) * (uf * psi.segment(j * fd, fd));
    }
    REQUIRE(entanglement::entropy_of_entanglement(rotated, spec) ==
            Approx(base).margin(1e-9));

    // conjugating the reduced state alone also leaves the value alone
    const Eigen::Matrix2cd rho_a = hilbert::partial_trace_field(psi, spec);
    const Eigen::Matrix2cd u2 = random_unitary(2, 9);
    REQUIRE(entanglement::entropy_of_entanglement(
                Eigen::Matrix2cd(u2 * rho_a * u2.adjoint())) ==
            Approx(base).margin(1e-9));
}

TEST_CASE("both reductions of a pure state carry the same entropy",
          "[entanglement]") {
    SpaceSpec spec{10};
    StateVector psi = StateVector::Random(spec.dim());
    psi.normalize();
    const double from_atom = entanglement::entropy_of_entanglement(psi, spec);
    const double from_field = entanglement::entropy_of_entanglement(
        hilbert::partial_trace_atom(psi, spec));
    REQUIRE(from_atom == Approx(from_field).margin(1e-8));
}

TEST_CASE("conditional superposition entropy value", "[entanglement]") {
    // spectrum (1 +- sin phi)/2
    const double expected = binary_entropy(0.5 * (1.0 + std::sin(kPhiSS)));
    REQUIRE(expected == Approx(0.5916727785823273).margin(1e-12));

    SpaceSpec spec{60};
    const StateVector psi =
        branches::conditional_steady_superposition(kFig1, 2.1, spec);
    REQUIRE(entanglement::entropy_of_entanglement(psi, spec) ==
            Approx(expected).margin(1e-5));
}

TEST_CASE("collapse functions and their limits", "[entanglement]") {
    using entanglement::collapse_f1_printed;
    using entanglement::collapse_functions;

    // printed expression really does evaluate to -1 and 0 at the ends
    REQUIRE(collapse_f1_printed(1.0) == Approx(-1.0).margin(1e-12));
    REQUIRE(collapse_f1_printed(0.0) == Approx(0.0).margin(1e-12));

    // corrected f1 is the binary entropy of the Schmidt weights (1+-u)/2
    for (double u : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        auto cf = collapse_functions(u);
        REQUIRE(cf.f1 == Approx(binary_entropy(0.5 * (1.0 + u))).margin(1e-12));
        REQUIRE(cf.f1 == Approx(1.0 + collapse_f1_printed(u)).margin(1e-12));
    }
    REQUIRE(collapse_functions(1.0).f1 == Approx(0.0).margin(1e-12));
    REQUIRE(collapse_functions(0.0).f1 == Approx(1.0).margin(1e-12));

    REQUIRE(collapse_functions(1.0).f2 ==
            Approx(0.7213475204444817).margin(1e-12)); // 1/(2 ln 2)
    REQUIRE(collapse_functions(0.0).f2 == Approx(0.0).margin(1e-12));
    // f2 decays monotonically between the limits on a coarse grid
    REQUIRE(collapse_functions(0.9).f2 > collapse_functions(0.5).f2);
    REQUIRE(collapse_functions(0.5).f2 > collapse_functions(0.1).f2);

    REQUIRE_THROWS_AS(collapse_functions(-0.01), DomainError);
    REQUIRE_THROWS_AS(collapse_functions(1.01), DomainError);
}

TEST_CASE("short-time entropy approximation tracks the exact construction",
          "[entanglement]") {
    SpaceSpec spec{60};
    auto ss = dynamics::semiclassical_steady_state(kFig1);

    REQUIRE(entanglement::approx_entropy(0.0, kFig1, ss.r_ss, ss.phi_ss) == 0.0);

    double max_dev = 0.0, max_dev_printed = 0.0;
    for (int k = 0; k <= 30; ++k) {
        const double t = 0.1 * k;
        const double exact = entanglement::entropy_of_entanglement(
            branches::branch_state(branches::Branch::u, t, kFig1, spec), spec);
        const double approx =
            entanglement::approx_entropy(t, kFig1, ss.r_ss, ss.phi_ss);
        REQUIRE(approx >= 0.0);
        REQUIRE(approx <= 1.0);
        max_dev = std::max(max_dev, std::abs(approx - exact));

        // same series with the printed f1: off by about the missing unit
        const double u = std::exp(-t * t / 2.0);
        auto cf = entanglement::collapse_functions(u);
        const double gtr = t / ss.r_ss;
        const double printed = entanglement::collapse_f1_printed(u) -
                               cf.f2 * std::sin(2.0 * ss.r_ss * t) * gtr -
                               gtr * gtr / (8.0 * std::log(2.0));
        max_dev_printed = std::max(max_dev_printed, std::abs(printed - exact));
    }
    REQUIRE(max_dev < 0.08);
    REQUIRE(max_dev_printed > 0.5); // regression pin for the offset erratum

    // far side of the collapse at large r: approximation saturates near 1
    REQUIRE(entanglement::approx_entropy(3.0, kFig1, 31.0, 0.25) > 0.99);

    REQUIRE_THROWS_AS(entanglement::approx_entropy(-1.0, kFig1, 3.9, 0.8),
                      DomainError);
    REQUIRE_THROWS_AS(entanglement::approx_entropy(1.0, kFig1, 0.0, 0.8),
                      DomainError);
}

TEST_CASE("realignment trace norm", "[entanglement]") {
    SECTION("pure product state gives 1") {
        Eigen::VectorXcd a(3), b(4);
        a << 0.6, Complex(0.0, 0.8), 0.0;
        b << 0.5, 0.5, 0.5, 0.5;
        Eigen::VectorXcd psi(12);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) psi(i * 4 + j) = a(i) * b(j);
        const DensityOperator rho = psi * psi.adjoint();
        REQUIRE(entanglement::realignment_trace_norm(rho, 3, 4) ==
                Approx(1.0).margin(1e-9));
    }

    SECTION("Bell projector gives 2") {
        Eigen::VectorXcd bell(4);
        bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
        const DensityOperator rho = bell * bell.adjoint();
        REQUIRE(entanglement::realignment_trace_norm(rho, 2, 2) ==
                Approx(2.0).margin(1e-10));
    }

    SECTION("pure states give the squared sum of Schmidt values") {
        std::mt19937 gen(41);
        std::normal_distribution<double> dist;
        Eigen::VectorXcd psi(12);
        for (int k = 0; k < 12; ++k) psi(k) = Complex(dist(gen), dist(gen));
        psi.normalize();
        Eigen::MatrixXcd m(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) m(i, j) = psi(i * 4 + j);
        const double schmidt_sum =
            Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues().sum();
        REQUIRE(entanglement::realignment_trace_norm(
                    DensityOperator(psi * psi.adjoint()), 3, 4) ==
                Approx(schmidt_sum * schmidt_sum).margin(1e-10));
    }

    SECTION("random separable mixtures never exceed 1") {
        std::mt19937 gen(1234);
        std::normal_distribution<double> dist;
        std::uniform_int_distribution<int> n_terms(2, 6);
        for (int trial = 0; trial < 20; ++trial) {
            DensityOperator rho = DensityOperator::Zero(8, 8);
            const int terms = n_terms(gen);
            double wsum = 0.0;
            std::vector<double> w(terms);
            for (auto& x : w) {
                x = std::abs(dist(gen)) + 0.05;
                wsum += x;
            }
            for (int t = 0; t < terms; ++t) {
                Eigen::Vector2cd a;
                Eigen::VectorXcd b(4);
                for (int k = 0; k < 2; ++k) a(k) = Complex(dist(gen), dist(gen));
                for (int k = 0; k < 4; ++k) b(k) = Complex(dist(gen), dist(gen));
                a.normalize();
                b.normalize();
                Eigen::VectorXcd prod(8);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 4; ++j) prod(i * 4 + j) = a(i) * b(j);
                rho += (w[t] / wsum) * (prod * prod.adjoint());
            }
            REQUIRE(entanglement::realignment_trace_norm(rho, 2, 4) <=
                    1.0 + 1e-6);
        }
    }

    SECTION("dimension mismatch is rejected") {
        REQUIRE_THROWS_AS(entanglement::realignment_trace_norm(
                              DensityOperator::Identity(8, 8), 3, 3),
                          DimensionError);
    }
}

TEST_CASE("schematic post-collapse mixture", "[entanglement]") {
    SECTION("well formed for any angle") {
        for (double phi : {0.2, kPhiSS, 1.2, 1.4}) {
            const DensityOperator rho =
                entanglement::schematic_post_collapse_mixture(phi);
            REQUIRE(rho.rows() == 8);
            REQUIRE(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
            REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<DensityOperator> es(rho,
                                                              Eigen::EigenvaluesOnly);
            REQUIRE(es.eigenvalues().minCoeff() > -1e-12);
        }
    }

    SECTION("realigned trace norm is sqrt 2, angle independent") {
        for (double phi : {0.2, kPhiSS, 1.2, 1.4})
            REQUIRE(entanglement::realignment_trace_norm(
                        entanglement::schematic_post_collapse_mixture(phi), 2, 4) ==
                    Approx(std::sqrt(2.0)).margin(1e-12));
    }

    SECTION("reduced atom is maximally mixed") {
        const DensityOperator rho =
            entanglement::schematic_post_collapse_mixture(kPhiSS);
        const Eigen::Matrix2cd atom =
            hilbert::partial_trace_field(rho, SpaceSpec{3});
        REQUIRE((atom - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
                1e-12);
        REQUIRE(entanglement::entropy_of_entanglement(atom) ==
                Approx(1.0).margin(1e-12));
    }

    SECTION("the variant transcribed verbatim behaves differently") {
        // one atomic factor breaks the mirror symmetry: the trace norm drops
        // below sqrt 2 and becomes angle dependent, the atom entropy dips
        const DensityOperator rho =
            entanglement::schematic_post_collapse_mixture(kPhiSS, true);
        REQUIRE(entanglement::realignment_trace_norm(rho, 2, 4) ==
                Approx(1.3664486203344783).margin(1e-9));
        const Eigen::Matrix2cd atom =
            hilbert::partial_trace_field(rho, SpaceSpec{3});
        REQUIRE(entanglement::entropy_of_entanglement(atom) ==
                Approx(0.9059282160429991).margin(1e-9));
    }

    SECTION("angle domain") {
        REQUIRE_THROWS_AS(entanglement::schematic_post_collapse_mixture(0.0),
                          DomainError);
        REQUIRE_THROWS_AS(
            entanglement::schematic_post_collapse_mixture(1.5707963267948966),
            DomainError);
    }
}
