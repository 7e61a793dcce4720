// correlations.hpp: regular part of the two-time current correlation function
//
//   C(tau) = Tr[J exp(L tau) J rho_ss] - J^2
//
// and the D - K decomposition of the noise.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rcfcs/liouville.hpp"

namespace rcfcs {

struct CorrelationTrace {
    std::vector<double> taus;
    std::vector<double> values; // C(tau), real part
    double integral{0};         // integral of C over [0, taus.back()]
    double tail_bound{0};       // envelope estimate of the neglected integral beyond taus.back()
    double imag_residue{0};     // largest |Im C| seen, relative to |C(0)|
};

struct CorrelationOptions {
    // Simpson panels for the integral. The count is raised as needed so that each panel
    // satisfies ||L|| dt <= 1/2.
    int quadrature_intervals{0};
    int min_intervals{2000};
};

// {0} followed by points - 1 log-spaced times on [1e-4 horizon, horizon].
std::vector<double> default_tau_grid(double horizon, int points = 400);

// taus must start at 0 and be strictly increasing.
CorrelationTrace correlation_function(const Generator& g, const Matrix& rho_ss,
                                      std::span<const JumpChannel> channels, std::span<const double> taus,
                                      const CorrelationOptions& opts = {});

// D - K = -2 Tr[J x] with x the Drazin solution for J rho_ss - J rho_ss.
double d_minus_k(const Generator& g, const Matrix& rho_ss, std::span<const JumpChannel> channels);

// Mean spacing of sign changes of C, doubled; absent with fewer than three crossings.
std::optional<double> oscillation_period(const CorrelationTrace& trace);

} // namespace rcfcs
