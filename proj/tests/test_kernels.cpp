#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sevo/kernels.hpp"
#include "sevo/ode_reference.hpp"

using namespace sevo;

namespace {
ModelParams params(double s, double s1, double s2) {
    ModelParams q;
    q.n = 1;
    q.sigma = s;
    q.sigma1 = s1;
    q.sigma2 = s2;
    q.p = 2.0;
    q.eps = 1.0;
    return q;
}
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-280}); }
}  // namespace

TEST_CASE("canonical triple has an exact double root at |xi| = 1") {
    auto c = mode_coeffs(1.0, params(1, 0, 1));
    CHECK(c.a == doctest::Approx(2.0));
    CHECK(c.b == doctest::Approx(1.0));
    CHECK(c.regime == ModeRegime::DoubleRoot);
    CHECK(c.lambda1.real() == doctest::Approx(-1.0));
    CHECK(c.lambda1 == c.lambda2);
}

TEST_CASE("overdamped roots are exact at |xi| = 0.1 for (1,0,1)") {
    auto c = mode_coeffs(0.1, params(1, 0, 1));
    CHECK(c.regime == ModeRegime::Overdamped);
    CHECK(c.lambda1.real() == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(c.lambda2.real() == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("r = 1 gives a = 2, b = 1 for every balanced pair") {
    auto c = mode_coeffs(1.0, params(1, 0.25, 0.75));
    CHECK(c.a == doctest::Approx(2.0));
    CHECK(c.b == doctest::Approx(1.0));
    CHECK(c.regime == ModeRegime::DoubleRoot);
}

TEST_CASE("zero-mode symbol conventions") {
    CHECK(damping_symbol(0.0, params(1, 0, 1)) == doctest::Approx(1.0));  // |0|^0 = 1
    CHECK(damping_symbol(0.0, params(1, 0.25, 0.75)) == doctest::Approx(0.0));
    CHECK(dispersion_symbol(0.0, params(1, 0, 1)) == doctest::Approx(0.0));
}

TEST_CASE("unbalanced pair has an oscillatory band near r = 1") {
    auto q = params(1, 0, 0.8);
    auto c = mode_coeffs(1.05, q);
    CHECK(c.regime == ModeRegime::Oscillatory);
    CHECK(c.lambda1.imag() > 0.0);
    CHECK(c.lambda2 == std::conj(c.lambda1));
    // Vieta
    CHECK(rel(c.lambda1 + c.lambda2, cplx(-c.a)) < 1e-14);
    CHECK(rel(c.lambda1 * c.lambda2, cplx(c.b)) < 1e-14);
}

TEST_CASE("double-root propagator matches the confluent limits") {
    ModeCoeffs c;
    c.a = 2.0;
    c.b = 1.0;
    c.regime = ModeRegime::DoubleRoot;
    c.lambda1 = c.lambda2 = -1.0;
    auto P = build_propagator(c, 1.0);
    // K1 = t e^{lambda t}, K0 = (1 - lambda t) e^{lambda t}, dK1 = (1 + lambda t) e^{lambda t}
    CHECK(P.K1.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(P.K0.real() == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(std::abs(P.dK1) < 1e-15);
}

TEST_CASE("zero mode with sigma1 > 0 degenerates to free streaming") {
    ModeCoeffs c;
    c.a = 0.0;
    c.b = 0.0;
    c.regime = ModeRegime::DoubleRoot;
    c.lambda1 = c.lambda2 = 0.0;
    const double h = 0.7;
    auto P = build_propagator(c, h);
    CHECK(P.K0.real() == doctest::Approx(1.0));
    CHECK(P.K1.real() == doctest::Approx(h));
    CHECK(P.dK1.real() == doctest::Approx(1.0));
    CHECK(P.M0.real() == doctest::Approx(0.5 * h * h).epsilon(1e-14));
    CHECK(P.M1.real() == doctest::Approx(h * h / 6.0).epsilon(1e-14));
}

TEST_CASE("distinct-root kernel matches the printed formula") {
    ModeCoeffs c;
    c.a = 1.01;
    c.b = 0.01;
    c.regime = ModeRegime::Overdamped;
    c.lambda1 = -0.01;
    c.lambda2 = -1.0;
    const double h = 0.5;
    auto P = build_propagator(c, h);
    const double k1 = (std::exp(-0.005) - std::exp(-0.5)) / 0.99;
    CHECK(P.K1.real() == doctest::Approx(k1).epsilon(1e-14));
    // cross-check all six coefficients against the reference integration
    auto ref = reference_coeffs(c.a, c.b, h);
    CHECK(rel(P.K0, cplx(ref.K0)) < 1e-10);
    CHECK(rel(P.K1, cplx(ref.K1)) < 1e-10);
    CHECK(rel(P.dK0, cplx(ref.dK0)) < 1e-10);
    CHECK(rel(P.dK1, cplx(ref.dK1)) < 1e-10);
    CHECK(rel(P.M0, cplx(ref.M0)) < 1e-10);
    CHECK(rel(P.M1, cplx(ref.M1)) < 1e-10);
}

TEST_CASE("kernel limits as h -> 0") {
    auto c = mode_coeffs(0.7, params(1, 0, 1));
    for (double h : {1e-3, 1e-5}) {
        auto P = build_propagator(c, h);
        CHECK(rel(P.K0, cplx(1.0)) < 10 * h);
        CHECK(std::abs(P.K1 - cplx(h)) < 2 * h * h);
        CHECK(rel(P.dK1, cplx(1.0)) < 10 * h);
    }
}

TEST_CASE("divided differences are symmetric and confluent-safe") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 0.0);
    for (int it = 0; it < 50; ++it) {
        cplx z1(u(rng), u(rng));
        cplx z2(u(rng), u(rng));
        CHECK(rel(dd_exp(z1, z2), dd_exp(z2, z1)) < 1e-14);
        CHECK(rel(dd_phi1(z1, z2), dd_phi1(z2, z1)) < 1e-13);
        // near-coincident pair agrees with the derivative limit
        cplx z3 = z1 * (1.0 + 1e-13);
        CHECK(std::abs(dd_exp(z1, z3) - std::exp(z1)) < 1e-10 * std::abs(std::exp(z1)));
    }
}

TEST_CASE("phi functions match their defining formulas away from zero") {
    for (cplx z : {cplx(-2.0, 0.0), cplx(-1.0, 3.0), cplx(0.0, 5.0)}) {
        CHECK(rel(phi1(z), (std::exp(z) - 1.0) / z) < 1e-13);
        CHECK(rel(phi2(z), (std::exp(z) - 1.0 - z) / (z * z)) < 1e-12);
    }
    CHECK(std::abs(phi1(cplx(0, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(phi2(cplx(0, 0)) - 0.5) < 1e-15);
}

TEST_CASE("widely separated stiff roots stay finite and accurate") {
    ModeCoeffs c;
    c.a = 1e6 + 1.0;
    c.b = 1e6;  // lambda1 = -1, lambda2 = -1e6 roughly
    c.regime = ModeRegime::Overdamped;
    const double s = std::sqrt(c.a * c.a - 4.0 * c.b);
    c.lambda2 = -0.5 * (c.a + s);
    c.lambda1 = -2.0 * c.b / (c.a + s);
    auto P = build_propagator(c, 0.5);
    CHECK(std::isfinite(P.K0.real()));
    CHECK(std::isfinite(P.M1.real()));
    // the slow root dominates: K1 ~ e^{lambda1 h}/(lambda1 - lambda2)
    const double expect = std::exp(c.lambda1.real() * 0.5) / (c.lambda1.real() - c.lambda2.real());
    CHECK(P.K1.real() == doctest::Approx(expect).epsilon(1e-9));
    // identity K0 = a K1 + dK1 under extreme stiffness
    CHECK(rel(P.K0, c.a * P.K1 + P.dK1) < 1e-10);
}

TEST_CASE("asymptotic probes sit within 10% and converge monotonically") {
    for (auto [s, s1, s2] : {std::tuple{1.0, 0.0, 1.0}, {1.0, 0.25, 0.75}, {2.0, 0.5, 1.5}}) {
        auto rep = asymptotic_check(params(s, s1, s2));
        CHECK(rep.all_within_10_percent);
        CHECK(rep.monotone_convergence);
        CHECK_FALSE(rep.regime_boundary_warning);
    }
}

TEST_CASE("small-frequency ratio for the canonical triple is razor sharp") {
    auto rep = asymptotic_check(params(1, 0, 1));
    CHECK(std::abs(rep.small_xi[0].ratio1 - 1.0) < 1e-3);  // lambda1 / -|xi|^2 at 1e-3
    CHECK(std::abs(rep.large_xi[0].ratio2 - 1.0) < 1e-3);  // lambda2 / -|xi|^2 at 1e3
}
