// model.hpp: physical parameters, spectral densities and the rotating-frame
// Hamiltonian of the qubit + reaction-coordinate extended system.
//
// Energies are in units of the RC frequency omega_c (hbar = k_B = 1). Only the
// detunings delta_q = omega_q - omega_d and delta_c = omega_c - omega_d enter.

#pragma once

#include "rcfcs/hilbert.hpp"
#include "rcfcs/types.hpp"

namespace rcfcs {

struct ModelParams {
    double delta_q{0.0};
    double delta_c{0.0};
    double omega_rabi{0.005};
    double lambda_coupling{0.03};
    double alpha{0.04};     // dimensionless spectral width
    double omega_c{1.0};
    double cutoff{1000.0};  // UV cutoff of the residual Ohmic bath
    double n_bath{0.01};    // residual-bath occupation at omega_c

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;

    // Residual-bath rate gamma = S_RC(omega_c) = alpha omega_c exp(-omega_c / cutoff).
    double gamma() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct BathThermo {
    double affinity;    // ln(1 + 1/n_B) = omega_c / T; +inf at n_B = 0
    double temperature; // omega_c / affinity

    static BathThermo from_occupation(double n_bath, double omega_c = 1.0);
    // Bose occupation at frequency omega for this temperature.
    double occupation(double omega) const;
};

// Drude-Lorentz density S(w) = 4 w alpha lambda^2 w_c^2 / [(w^2 - w_c^2)^2 + (2 pi alpha w_c w)^2].
double drude_lorentz(double omega, const ModelParams& p);

// Residual Ohmic density S_RC(w) = alpha w exp(-w / cutoff).
double ohmic_residual(double omega, const ModelParams& p);

// delta_q s+s- + Omega (s+ + s-) + delta_c a+a + lambda (e^{-i chi/2} s+ a + e^{i chi/2} s- a+).
// chi = 0 gives the physical Hamiltonian; a nonzero chi dresses the qubit-RC coupling
// with a counting field at the original system-bath boundary.
Matrix extended_hamiltonian(const ModelParams& p, const Truncation& trunc, double chi = 0.0);

// Total excitation number s+s- (x) 1 + 1 (x) a+a; conserved by the Hamiltonian when Omega = 0.
Matrix excitation_number(const Truncation& trunc);

} // namespace rcfcs
