// nonclassical.hpp: reduced-state diagnostics of the reaction-coordinate mode
//
// Quadratures x = (a + a^+)/sqrt(2), p = (a - a^+)/(i sqrt(2)); covariances are
// symmetrized and scaled so that the vacuum has sigma = identity and a thermal state
// has symplectic eigenvalue nu = 2n + 1.

#pragma once

#include <optional>

#include "rcfcs/types.hpp"

namespace rcfcs {

struct RcState {
    Matrix rho_rc;
    Complex mean_a{0.0};        // <a>
    double mean_n{0.0};         // <a^+ a>
    Complex mean_a2{0.0};       // <a^2>
    double mean_nn{0.0};        // <a^+ a^+ a a>
    double top_population{0.0}; // population of level n_max - 1
};

// Moments of an n_max x n_max mode state; the state is Hermitized first.
RcState rc_state(const Matrix& rho_rc);

// Partial trace of a (2 n_max)-dimensional qubit (x) mode state over the qubit.
RcState reduce_rc(const Matrix& rho_extended);

// Absent when <a^+ a> <= 1e-12.
std::optional<double> g2_zero(const RcState& rc);

struct Gaussianity {
    double delta_G{0};
    double nu{1};
    double entropy_state{0};    // S_vN(rho)
    double entropy_gaussian{0}; // S_vN(tau)
};

// Throws Error when det sigma < 1 - 1e-8 (uncertainty violation).
Gaussianity non_gaussianity(const RcState& rc);

// Gaussian-state entropy at symplectic eigenvalue nu >= 1.
double gaussian_entropy(double nu);

// Von Neumann entropy; eigenvalues below 1e-14 are treated as zero.
double von_neumann_entropy(const Matrix& rho);

double l1_coherence(const RcState& rc);

struct NonclassicalityReport {
    std::optional<double> g2_zero;
    double delta_G{0};
    double nu{1};
    double l1_coherence{0};
    double top_population{0};
};

NonclassicalityReport analyze_rc(const Matrix& rho_extended);

// Reference states on n_max levels.
Matrix thermal_state(int n_max, double n_mean);
Matrix fock_state(int n_max, int n);
Matrix coherent_state(int n_max, Complex amplitude); // renormalized after truncation

} // namespace rcfcs
