#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rcfcs/model.hpp"
#include "test_support.hpp"

using namespace rcfcs;

TEST_SUITE("model") {

TEST_CASE("parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.n_bath = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.omega_rabi = -1e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.lambda_coupling = -1e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.cutoff = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("residual rate and Ohmic density") {
    ModelParams p;
    CHECK(p.gamma() == doctest::Approx(0.04 * std::exp(-1.0 / 1000.0)).epsilon(1e-15));
    CHECK(std::abs(p.gamma() / 0.04 - 1.0) < 1e-3);
    CHECK(ohmic_residual(0.0, p) == 0.0);
    p.cutoff = 1e300;
    CHECK(ohmic_residual(2.5, p) == doctest::Approx(0.04 * 2.5));
}

TEST_CASE("Drude-Lorentz density") {
    ModelParams p;
    p.lambda_coupling = 0.02;
    p.alpha = 0.04;
    CHECK(drude_lorentz(0.0, p) == 0.0);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(drude_lorentz(1.0, p) == doctest::Approx(0.02 * 0.02 / (pi2 * 0.04)).epsilon(1e-14));

    ModelParams sharp = p, flat = p;
    sharp.alpha = 0.01;
    flat.alpha = 1.0;
    CHECK(drude_lorentz(1.0, sharp) > 50.0 * drude_lorentz(1.0, flat));

    double integral = 0.0, prev = 0.0;
    const int n = 200000;
    for (int i = 1; i <= n; ++i) {
        const double w = 10.0 * i / n;
        const double s = drude_lorentz(w, p);
        CHECK(s >= 0.0);
        integral += 0.5 * (s + prev) * (10.0 / n);
        prev = s;
    }
    CHECK(std::isfinite(integral));
    CHECK(integral > 0.0);
}

TEST_CASE("Markovian flatness for alpha omega_c >> lambda") {
    // Over [w_c - 10 lambda, w_c + 10 lambda] the relative variation is set by the
    // linear prefactor, |S(w)/S(w_c) - 1| ~ |w - w_c| / w_c, and stays within 10 lambda (1 + 10 %).
    for (double lambda : {0.001, 0.005, 0.01}) {
        ModelParams p;
        p.alpha = 1.0;
        p.lambda_coupling = lambda;
        const double s0 = drude_lorentz(1.0, p);
        for (int i = 0; i <= 40; ++i) {
            const double w = 1.0 - 10.0 * lambda + i * 0.5 * lambda;
            CHECK(std::abs(drude_lorentz(w, p) / s0 - 1.0) < 11.0 * lambda);
        }
    }
    ModelParams p;
    p.alpha = 1.0;
    p.lambda_coupling = 0.001;
    for (int i = 0; i <= 40; ++i) {
        const double w = 0.99 + i * 0.0005;
        CHECK(std::abs(drude_lorentz(w, p) / drude_lorentz(1.0, p) - 1.0) < 0.05);
    }
}

TEST_CASE("bath thermodynamics") {
    const BathThermo b = BathThermo::from_occupation(0.01);
    CHECK(b.affinity == doctest::Approx(std::log(101.0)).epsilon(1e-14));
    CHECK(b.temperature == doctest::Approx(1.0 / std::log(101.0)));
    CHECK(b.occupation(1.0) == doctest::Approx(0.01).epsilon(1e-12));
    for (double n : {1e-4, 0.3, 2.0, 50.0}) {
        const BathThermo t = BathThermo::from_occupation(n);
        CHECK(1.0 / std::expm1(t.affinity) == doctest::Approx(n).epsilon(1e-12));
    }
    const BathThermo zero = BathThermo::from_occupation(0.0);
    CHECK(std::isinf(zero.affinity));
    CHECK(zero.occupation(1.0) == 0.0);
}

TEST_CASE("extended Hamiltonian") {
    const Truncation t(5);
    ModelParams p;
    p.omega_rabi = 0.0;
    p.lambda_coupling = 0.0;
    p.delta_q = 0.3;
    p.delta_c = -0.7;
    const Matrix h0 = extended_hamiltonian(p, t);
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 5; ++n)
            CHECK(h0(s * 5 + n, s * 5 + n).real() == doctest::Approx(0.3 * s - 0.7 * n));
    CHECK(test::max_abs(h0 - Matrix(h0.diagonal().asDiagonal())) == 0.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 5; ++trial) {
        ModelParams r;
        r.delta_q = u(rng);
        r.delta_c = u(rng);
        r.omega_rabi = std::abs(u(rng));
        r.lambda_coupling = std::abs(u(rng));
        const Matrix h = extended_hamiltonian(r, t);
        CHECK(test::max_abs(h - h.adjoint()) < 1e-15);
        r.omega_rabi = 0.0;
        const Matrix hc = extended_hamiltonian(r, t);
        const Matrix n_es = excitation_number(t);
        CHECK(test::max_abs(hc * n_es - n_es * hc) < 1e-14);
    }
}

TEST_CASE("counting-field dressing of the coupling") {
    const Truncation t(4);
    ModelParams p;
    const Matrix h = extended_hamiltonian(p, t);
    CHECK(test::max_abs(extended_hamiltonian(p, t, 0.0) - h) == 0.0);
    const Matrix hp = extended_hamiltonian(p, t, 0.8);
    const Matrix hm = extended_hamiltonian(p, t, -0.8);
    CHECK(test::max_abs(hp.adjoint() - hp) < 1e-15);
    CHECK(test::max_abs(hp - hm) > 1e-3);
    // h(chi) = U h U^+ with U = exp(i chi a^+ a / 2)
    const ExtendedOps ops(t);
    Matrix u = Matrix::Zero(8, 8);
    for (int k = 0; k < 8; ++k) u(k, k) = std::exp(Complex(0.0, 0.4 * ops.n_rc(k, k).real()));
    CHECK(test::max_abs(u * extended_hamiltonian(p, t, 0.0) * u.adjoint() - hp) < 1e-15);
    CHECK(test::max_abs(extended_hamiltonian(p, t, 4.0 * std::numbers::pi) - h) < 1e-14);
}

}
