#include "rcfcs/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rcfcs {

void ModelParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
    };
    require(std::isfinite(delta_q) && std::isfinite(delta_c), "detunings must be finite");
    require(omega_rabi >= 0.0 && std::isfinite(omega_rabi), "omega_rabi must be >= 0");
    require(lambda_coupling >= 0.0 && std::isfinite(lambda_coupling), "lambda_coupling must be >= 0");
    require(alpha > 0.0 && std::isfinite(alpha), "alpha must be > 0");
    require(omega_c > 0.0 && std::isfinite(omega_c), "omega_c must be > 0");
    require(cutoff > 0.0, "cutoff must be > 0");
    require(n_bath >= 0.0 && std::isfinite(n_bath), "n_bath must be >= 0");
}

double ModelParams::gamma() const { return ohmic_residual(omega_c, *this); }

BathThermo BathThermo::from_occupation(double n_bath, double omega_c) {
    if (n_bath < 0.0) throw std::invalid_argument("BathThermo: n_bath must be >= 0");
    if (n_bath == 0.0) return {std::numeric_limits<double>::infinity(), 0.0};
    const double a = std::log1p(1.0 / n_bath);
    return {a, omega_c / a};
}

double BathThermo::occupation(double omega) const {
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

double drude_lorentz(double omega, const ModelParams& p) {
    const double wc = p.omega_c;
    const double num = 4.0 * omega * p.alpha * p.lambda_coupling * p.lambda_coupling * wc * wc;
    const double detune = omega * omega - wc * wc;
    const double width = 2.0 * std::numbers::pi * p.alpha * wc * omega;
    const double den = detune * detune + width * width;
    return den == 0.0 ? 0.0 : num / den;
}

double ohmic_residual(double omega, const ModelParams& p) {
    return p.alpha * omega * std::exp(-omega / p.cutoff);
}

Matrix extended_hamiltonian(const ModelParams& p, const Truncation& trunc, double chi) {
    const ExtendedOps ops(trunc);
    const Complex to_rc = std::exp(Complex(0.0, 0.5 * chi));
    const Complex to_qubit = std::exp(Complex(0.0, -0.5 * chi));
    Matrix h = p.delta_q * ops.n_qubit + p.omega_rabi * (ops.sigma_plus + ops.sigma_minus) +
               p.delta_c * ops.n_rc;
    h += p.lambda_coupling * (to_qubit * (ops.sigma_plus * ops.a) + to_rc * (ops.sigma_minus * ops.a_dag));
    return h;
}

Matrix excitation_number(const Truncation& trunc) {
    const ExtendedOps ops(trunc);
    return ops.n_qubit + ops.n_rc;
}

} // namespace rcfcs
