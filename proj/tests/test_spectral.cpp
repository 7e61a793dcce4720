#include "doctest.h"

#include "rcfcs/fcs.hpp"
#include "rcfcs/nonclassical.hpp"
#include "rcfcs/spectral.hpp"
#include "test_support.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace rcfcs;

TEST_SUITE("spectral") {

TEST_CASE("decoupled undriven qubit has a degenerate steady state") {
    ModelParams p;
    p.lambda_coupling = 0.0;
    p.omega_rabi = 0.0;
    const Generator g = rc_lme_generator(p, Truncation(6));
    CHECK_THROWS_AS(steady_state(g), DegenerateSteadyState);

    SteadyStateOptions relaxed;
    relaxed.require_unique = false;
    const SteadyState ss = steady_state(g, relaxed);
    CHECK(ss.null_dimension >= 2);
    CHECK(std::abs(ss.rho.trace() - 1.0) < 1e-12);
    CHECK(ss.residual_norm < 1e-12);
}

TEST_CASE("driven steady state is unique, normalized and positive") {
    ModelParams p; // lambda 0.03, Omega 0.005, n_B 0.01
    const Generator g = rc_lme_generator(p, Truncation(12));
    const SteadyState ss = steady_state(g);
    CHECK(ss.null_dimension == 1);
    CHECK(std::abs(ss.rho.trace() - 1.0) < 1e-10);
    CHECK(ss.trace_error < 1e-10);
    CHECK(ss.min_eigenvalue > -1e-8);
    CHECK(ss.residual_norm < 1e-10 * g.matrix.norm());
    CHECK(test::max_abs(ss.rho - ss.rho.adjoint()) == 0.0);

    SteadyStateOptions lu;
    lu.method = SteadyStateMethod::bordered_lu;
    const SteadyState ss2 = steady_state(g, lu);
    CHECK(test::max_abs(ss.rho - ss2.rho) < 1e-10);
    lu.method = SteadyStateMethod::sparse_lu;
    const SteadyState ss3 = steady_state(g, lu);
    CHECK(test::max_abs(ss.rho - ss3.rho) < 1e-10);
}

TEST_CASE("steady state rejects tilted generators") {
    ModelParams p;
    CHECK_THROWS_AS(steady_state(tilted_generator_dcut(p, Truncation(4), 0.2)), std::invalid_argument);
}

TEST_CASE("undriven coupled system carries no current") {
    ModelParams p;
    p.omega_rabi = 0.0;
    p.lambda_coupling = 0.05;
    const Truncation t(8);
    const SteadyState ss = steady_state(rc_lme_generator(p, t));
    CHECK(std::abs(average_current(ss.rho, rc_channels(p, t))) < 1e-12);
}

TEST_CASE("leading eigenvalue") {
    ModelParams p;
    const Truncation t(8);
    CHECK(std::abs(leading_eigenvalue(rc_lme_generator(p, t))) < 1e-10);

    // first-order continuity in chi
    const Complex a = leading_eigenvalue(tilted_generator_dcut(p, t, 1e-3));
    const Complex b = leading_eigenvalue(tilted_generator_dcut(p, t, 2e-3));
    CHECK(std::abs(a) > 0.0);
    CHECK(std::abs(b / a - 2.0) < 1e-2);

    const Eigenpair ep = leading_eigenpair(tilted_generator_dcut(p, t, 0.5));
    const Generator g = tilted_generator_dcut(p, t, 0.5);
    CHECK((g.matrix * ep.right - ep.value * ep.right).norm() < 1e-10 * ep.right.norm());
}

TEST_CASE("tracked branch matches the full spectrum") {
    ModelParams p;
    p.omega_rabi = 0.01;
    const Truncation t(6);
    auto tilted = [&](Complex chi) { return tilted_generator_dcut(p, t, chi); };
    const std::vector<double> chis{0.3, 1.0, 2.0, -0.5};
    const std::vector<Complex> tracked = track_leading_branch(tilted, chis);
    REQUIRE(tracked.size() == chis.size());
    for (std::size_t i = 0; i < chis.size(); ++i) {
        const Complex full = leading_eigenvalue(tilted(Complex(chis[i])));
        CHECK(std::abs(tracked[i] - full) < 1e-12);
    }
    CHECK(std::abs(track_leading_branch(tilted, std::vector<double>{0.0})[0]) < 1e-14);
}

TEST_CASE("spectrum of the free damped mode") {
    ModelParams p;
    p.lambda_coupling = 0.0;
    p.omega_rabi = 0.0;
    p.n_bath = 0.0;
    p.delta_c = 0.0;
    const Generator g = rc_lme_generator(p, Truncation(10));
    const auto ev = full_spectrum(g);
    const double gamma = p.gamma();
    auto has = [&](Complex z) {
        return std::any_of(ev.begin(), ev.end(), [&](Complex e) { return std::abs(e - z) < 1e-10; });
    };
    CHECK(has(Complex(-0.5 * gamma, 0.0)));
    CHECK(has(Complex(-gamma, 0.0)));
    for (std::size_t i = 1; i < ev.size(); ++i) CHECK(ev[i].real() <= ev[i - 1].real() + 1e-12);
}

TEST_CASE("spectrum_top deduplicates conjugate pairs") {
    ModelParams p;
    p.omega_rabi = 0.01;
    const Generator g = rc_lme_generator(p, Truncation(6));
    const auto ev = full_spectrum(g);
    const double tol = 1e-9;
    for (const auto& z : ev) {
        const bool found = std::any_of(ev.begin(), ev.end(), [&](Complex e) { return std::abs(e - std::conj(z)) < tol; });
        CHECK(found);
    }
    const SpectrumSlice sl = spectrum_top(g, 3);
    CHECK(sl.count == 4);
    CHECK(std::abs(sl.eigenvalues[0].real()) <= 1e-10);
    for (int i = 0; i < sl.count; ++i) CHECK(sl.eigenvalues[i].imag() >= -1e-12);
    for (int i = 1; i < sl.count; ++i) CHECK(sl.eigenvalues[i].real() <= sl.eigenvalues[i - 1].real() + 1e-12);
    CHECK_THROWS_AS(spectrum_top(g, 0), std::invalid_argument);
}

TEST_CASE("Drazin action") {
    ModelParams p;
    p.n_bath = 0.1;
    const Truncation t(8);
    const Generator g = rc_lme_generator(p, t);
    const SteadyState ss = steady_state(g);
    const DrazinSolver solver(g, ss.rho);
    CHECK(solver.rcond() > 1e-14);

    CHECK(test::max_abs(solver.apply(ss.rho)) < 1e-12);

    const Matrix rhs = test::random_matrix(16, 16, 21);
    const Matrix x = solver.apply(rhs);
    const Matrix projected = rhs - ss.rho * rhs.trace();
    CHECK(std::abs(x.trace()) < 1e-12);
    CHECK(test::max_abs(unvectorize(g.matrix * vectorize(x)) - projected) < 1e-10 * test::max_abs(rhs));

    // L^D L acts as 1 - P, which is the identity on traceless inputs
    Matrix traceless = test::random_matrix(16, 16, 22);
    traceless -= traceless.trace() / 16.0 * Matrix::Identity(16, 16);
    const Matrix back = solver.apply(unvectorize(g.matrix * vectorize(traceless)));
    CHECK(test::max_abs(back - traceless) < 1e-9 * test::max_abs(traceless));
    CHECK(test::max_abs(drazin_apply(g, rhs, ss.rho) - x) < 1e-12);
}

TEST_CASE("Drazin action matches the time integral") {
    ModelParams p;
    p.n_bath = 0.05;
    const Truncation t(6);
    const Generator g = rc_lme_generator(p, t);
    const SteadyState ss = steady_state(g);
    const Matrix rhs = test::random_density(12, 31);
    const Matrix y = rhs - ss.rho * rhs.trace();
    const Matrix x = drazin_apply(g, rhs, ss.rho);

    // -int_0^T exp(L tau) y dtau by composite Simpson on an exact step propagator
    const double horizon = 50.0 / p.gamma();
    const int m = 20000;
    const double h = horizon / m;
    const Matrix step = (g.matrix * Complex(h)).exp();
    Vector v = vectorize(y);
    Vector acc = v;
    for (int k = 1; k <= m; ++k) {
        v = step * v;
        acc += (k == m ? 1.0 : (k % 2 ? 4.0 : 2.0)) * v;
    }
    const Matrix integral = unvectorize(acc * (h / 3.0));
    CHECK(test::max_abs(-integral - x) < 1e-6 * test::max_abs(x));
}

TEST_CASE("propagation") {
    ModelParams p;
    p.n_bath = 0.05;
    const Truncation t(6);
    const Generator g = rc_lme_generator(p, t);
    const SteadyState ss = steady_state(g);
    const Matrix rho0 = test::random_density(12, 41);
    CHECK(test::max_abs(propagate(g, rho0, 0.0) - rho0) == 0.0);
    for (double tau : {1.0, 10.0, 250.0}) {
        CHECK(std::abs(propagate(g, rho0, tau).trace() - 1.0) < 1e-9);
        CHECK(test::max_abs(propagate(g, ss.rho, tau) - ss.rho) < 1e-10);
    }
    CHECK(test::max_abs(propagate(g, rho0, 100.0 / p.gamma()) - ss.rho) < 1e-6);
    CHECK_THROWS_AS(propagate(g, rho0, -1.0), std::invalid_argument);
}

}
