#include <doctest.h>

#include <boost/multiprecision/float128.hpp>
#include <cmath>

#include "tdrc/kernels.hpp"
#include "tdrc/rng.hpp"

using namespace tdrc;
using quad = boost::multiprecision::float128;

namespace {

// Independent oracle: central finite differences for d/dx f.
double fd_x_derivative(const KernelParams& k, double x, double I, double h = 1e-5) {
    return (eval_kernel(k, x + h, I) - eval_kernel(k, x - h, I)) / (2.0 * h);
}

// Closed-form i-th input derivative of the Ikeda kernel:
// eta * gamma^i * 2^(i-1) * sin(2(x0 + phi) + (i-1) pi/2).
double ikeda_input_derivative(const KernelParams& k, double x0, int i) {
    return k.eta * std::pow(k.gamma, i) * std::pow(2.0, i - 1) *
           std::sin(2.0 * (x0 + k.phi) + (i - 1) * M_PI / 2.0);
}

bool has_certificate(const Equilibrium& e, StabilityCertificate c) { return e.certificate == c; }

}  // namespace

TEST_CASE("kernel evaluation matches the defining formulas") {
    const auto mg = KernelParams::mackey_glass(2.0, 1.0, 2.0);
    CHECK(eval_kernel(mg, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));  // eta x/(1+x^2) at x=1

    const auto ik = KernelParams::ikeda(2.0, 1.0, -0.3);
    CHECK(eval_kernel(ik, 0.088, 0.0) == doctest::Approx(0.088).epsilon(1e-2));

    const auto zero_gain = KernelParams::mackey_glass(0.0, 1.3, 2.0);
    CHECK(eval_kernel(zero_gain, 0.7, 0.4) == 0.0);

    // input enters through x + gamma I
    CHECK(eval_kernel(mg, 0.3, 0.5) == doctest::Approx(eval_kernel(mg, 0.8, 0.0)).epsilon(1e-14));
}

TEST_CASE("domain errors for fractional exponents with negative base") {
    const auto mg = KernelParams::mackey_glass(1.5, 1.0, 2.5);
    CHECK_THROWS_AS(eval_kernel(mg, -0.5, 0.0), DomainError);
    CHECK_NOTHROW(eval_kernel(mg, 0.5, 0.0));
}

TEST_CASE("analytic x-derivative agrees with central differences") {
    const auto mg09 = KernelParams::mackey_glass(0.9, 0.8, 2.0);
    CHECK(kernel_x_derivative(mg09, 0.0, 0.0) == doctest::Approx(0.9).epsilon(1e-14));

    const auto mg2 = KernelParams::mackey_glass(2.0, 1.0, 2.0);
    CHECK(kernel_x_derivative(mg2, 1.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));

    const auto ik = KernelParams::ikeda(1.1, 0.9, 0.35);
    CHECK(kernel_x_derivative(ik, 0.2, 0.0) ==
          doctest::Approx(1.1 * std::sin(2.0 * (0.2 + 0.35))).epsilon(1e-14));

    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const bool use_mg = trial % 2 == 0;
        const KernelParams k =
            use_mg ? KernelParams::mackey_glass(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                                trial % 4 == 0 ? 2.0 : 4.0)
                   : KernelParams::ikeda(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                                         rng.uniform(-1.5, 1.5));
        const double x = rng.uniform(-1.5, 1.5);
        const double I = rng.uniform(-0.5, 0.5);
        const double exact = kernel_x_derivative(k, x, I);
        const double approx = fd_x_derivative(k, x, I);
        CHECK(exact == doctest::Approx(approx).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("jet input derivatives match the Ikeda closed form to high order") {
    const auto ik = KernelParams::ikeda(1.2443, 1.4762, 0.1161);
    const double x0 = 0.0244;
    const auto jets = kernel_input_derivatives(ik, x0, 8);
    for (int i = 1; i <= 8; ++i) {
        const double closed = ikeda_input_derivative(ik, x0, i);
        CHECK(jets[i - 1] == doctest::Approx(closed).epsilon(1e-8));
    }
}

TEST_CASE("jet input derivatives: first order equals gamma-scaled x-derivative") {
    const auto mg = KernelParams::mackey_glass(1.3, 0.7, 2.0);
    const auto jets = kernel_input_derivatives(mg, 0.0, 3);
    // At x0 = 0 the first derivative reduces to eta * gamma.
    CHECK(jets[0] == doctest::Approx(1.3 * 0.7).epsilon(1e-14));

    const auto ik = KernelParams::ikeda(0.8, 1.1, 0.5);
    const auto ik_jets = kernel_input_derivatives(ik, 0.3, 2);
    CHECK(ik_jets[0] == doctest::Approx(0.8 * 1.1 * std::sin(2.0 * 0.8)).epsilon(1e-13));
}

TEST_CASE("jet derivatives agree with finite differences at low order") {
    const auto mg = KernelParams::mackey_glass(1.0781, 0.796, 2.0);
    const double x0 = std::sqrt(1.0781 - 1.0);
    const auto jets = kernel_input_derivatives(mg, x0, 4);
    const double h = 1e-2;
    auto f = [&](double I) { return eval_kernel(mg, x0, I); };
    const double d1 = (f(h) - f(-h)) / (2 * h);
    const double d2 = (f(h) - 2 * f(0) + f(-h)) / (h * h);
    const double d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
    const double d4 = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / (h * h * h * h);
    CHECK(jets[0] == doctest::Approx(d1).epsilon(1e-4));
    CHECK(jets[1] == doctest::Approx(d2).epsilon(1e-4));
    CHECK(jets[2] == doctest::Approx(d3).epsilon(1e-3));
    CHECK(jets[3] == doctest::Approx(d4).epsilon(1e-2));
}

TEST_CASE("quad-precision jet propagation matches the closed form to 1e-30") {
    const auto ik = KernelParams::ikeda(2.0, 0.9, -0.3);
    const quad x0("0.0885");
    const auto jets = kernel_input_derivatives_t<quad>(ik, x0, 8);
    using boost::multiprecision::pow;
    using boost::multiprecision::sin;
    const quad pi = 4 * boost::multiprecision::atan(quad(1));
    for (int i = 1; i <= 8; ++i) {
        const quad closed = quad(ik.eta) * pow(quad(ik.gamma), i) * pow(quad(2), i - 1) *
                            sin(2 * (x0 + quad(ik.phi)) + quad(i - 1) * pi / 2);
        CHECK(static_cast<double>(boost::multiprecision::abs(jets[i - 1] - closed)) < 1e-30);
    }
}

TEST_CASE("equilibria of the Results-section Ikeda kernel") {
    const auto ik = KernelParams::ikeda(1.2443, 1.4762, 0.1161);
    const auto eqs = find_equilibria(ik, -1.0, 3.0);
    REQUIRE(eqs.size() == 3);
    CHECK(std::abs(eqs[0].x0 - 0.0244) < 1e-3);
    CHECK(std::abs(eqs[1].x0 - 0.9075) < 1e-3);
    CHECK(std::abs(eqs[2].x0 - 1.063) < 1e-3);
    CHECK(has_certificate(eqs[0], StabilityCertificate::CertifiedAsymptoticallyStable));
    CHECK(has_certificate(eqs[1], StabilityCertificate::NotCertified));
    CHECK(has_certificate(eqs[2], StabilityCertificate::CertifiedAsymptoticallyStable));
}

TEST_CASE("equilibria of the appendix Ikeda example (A, B, C points)") {
    const auto ik = KernelParams::ikeda(2.0, 1.0, -0.3);
    const auto eqs = find_equilibria(ik, -1.0, 3.0);
    REQUIRE(eqs.size() == 3);
    CHECK(std::abs(eqs[0].x0 - 0.088) < 1e-3);
    CHECK(std::abs(eqs[1].x0 - 1.172) < 1e-3);
    CHECK(std::abs(eqs[2].x0 - 1.977) < 1e-3);
    CHECK(has_certificate(eqs[0], StabilityCertificate::CertifiedAsymptoticallyStable));
    CHECK(has_certificate(eqs[2], StabilityCertificate::CertifiedAsymptoticallyStable));
}

TEST_CASE("Mackey-Glass equilibrium families at p = 2") {
    // eta <= 1: only the origin.
    for (double eta : {0.2, 0.5, 0.9, 1.0}) {
        const auto eqs = find_equilibria(KernelParams::mackey_glass(eta, 1.0, 2.0), -2.0, 2.0);
        REQUIRE(eqs.size() == 1);
        CHECK(std::abs(eqs[0].x0) < 1e-9);
    }
    // eta > 1: origin plus +-sqrt(eta - 1).
    for (double eta : {1.2, 1.3541, 2.0, 2.8}) {
        const auto eqs = find_equilibria(KernelParams::mackey_glass(eta, 1.0, 2.0), -2.0, 2.0);
        REQUIRE(eqs.size() == 3);
        const double root = std::sqrt(eta - 1.0);
        CHECK(std::abs(eqs[0].x0 + root) < 1e-9);
        CHECK(std::abs(eqs[1].x0) < 1e-9);
        CHECK(std::abs(eqs[2].x0 - root) < 1e-9);
    }
    // the appendix value eta = 1.3541 -> -0.5951
    const auto eqs = find_equilibria(KernelParams::mackey_glass(1.3541, 4.7901, 2.0), -2.0, 2.0);
    CHECK(std::abs(eqs[0].x0 + 0.5951) < 1e-4);
}

TEST_CASE("every reported equilibrium satisfies the fixed-point residual bound") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const KernelParams k =
            trial % 2 == 0
                ? KernelParams::mackey_glass(rng.uniform(0.1, 2.9), rng.uniform(0.5, 2.0), 2.0)
                : KernelParams::ikeda(rng.uniform(0.2, 2.0), rng.uniform(0.5, 2.0),
                                      rng.uniform(0.05, 1.0));
        for (const auto& e : find_equilibria(k, -2.0, 3.0))
            CHECK(std::abs(eval_kernel(k, e.x0, 0.0) - e.x0) <= 1e-9);
    }
}

TEST_CASE("Ikeda with |eta| <= 1 has exactly one certified nontrivial equilibrium") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const double eta = rng.uniform(0.05, 1.0);
        const double phi = rng.uniform(0.05, 1.4);  // away from pi n
        const auto eqs = find_equilibria(KernelParams::ikeda(eta, 1.0, phi), -0.5, 1.6);
        std::vector<Equilibrium> nontrivial;
        for (const auto& e : eqs)
            if (std::abs(e.x0) > 1e-9) nontrivial.push_back(e);
        REQUIRE(nontrivial.size() == 1);
        CHECK(nontrivial[0].x0 > 0.0);
        CHECK(nontrivial[0].x0 <= std::abs(eta) + 1e-9);
        CHECK(has_certificate(nontrivial[0], StabilityCertificate::CertifiedAsymptoticallyStable));
    }
}

TEST_CASE("certificates follow the derivative magnitude") {
    CHECK(has_certificate(certify_stability(KernelParams::mackey_glass(0.9, 1.0, 2.0), 0.0),
                          StabilityCertificate::CertifiedAsymptoticallyStable));
    CHECK(has_certificate(certify_stability(KernelParams::mackey_glass(1.5, 1.0, 2.0), 0.0),
                          StabilityCertificate::NotCertified));
    CHECK(has_certificate(certify_stability(KernelParams::mackey_glass(1.0, 1.0, 2.0), 0.0),
                          StabilityCertificate::CertifiedStable));
    CHECK_THROWS_AS(certify_stability(KernelParams::mackey_glass(2.0, 1.0, 2.0), 0.4),
                    NotAnEquilibriumError);
}
