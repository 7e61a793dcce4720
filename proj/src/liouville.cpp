#include "rcfcs/liouville.hpp"

#include <cmath>

namespace rcfcs {

namespace {

// exp(i x) - 1 without cancellation for small |x|.
Complex expm1_i(Complex x) {
    const Complex half = 0.5 * x;
    return 2.0 * kI * std::sin(half) * std::exp(kI * half);
}

RowVector trace_functional(const Matrix& x) {
    // Tr[X rho] = sum_ij X_ji rho_ij
    return vectorize(Matrix(x.transpose())).transpose();
}

} // namespace

Matrix unvectorize(const Vector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size()) throw std::invalid_argument("unvectorize: length is not a perfect square");
    return v.reshaped(d, d);
}

Matrix superop_left(const Matrix& a) {
    return kron(Matrix::Identity(a.rows(), a.rows()), a);
}

Matrix superop_right(const Matrix& b) {
    return kron(Matrix(b.transpose()), Matrix::Identity(b.rows(), b.rows()));
}

Matrix superop_sandwich(const Matrix& a, const Matrix& b) {
    return kron(Matrix(b.transpose()), a);
}

Generator lindblad_generator(const Matrix& h_ket, const Matrix& h_bra,
                             std::span<const JumpChannel> channels, Complex chi, TiltKind tilt) {
    const Eigen::Index d = h_ket.rows();
    if (h_ket.cols() != d || h_bra.rows() != d || h_bra.cols() != d)
        throw std::invalid_argument("lindblad_generator: Hamiltonian dimensions differ");

    Generator g;
    g.chi = chi;
    g.tilt = tilt;
    g.system_dim = static_cast<int>(d);
    g.matrix = -kI * (superop_left(h_ket) - superop_right(h_bra));
    g.trace_row = -kI * trace_functional(h_ket - h_bra);

    for (const JumpChannel& ch : channels) {
        if (ch.op.rows() != d || ch.op.cols() != d)
            throw std::invalid_argument("lindblad_generator: jump operator dimension mismatch");
        if (ch.rate == 0.0) continue;
        const Complex arg = tilt == TiltKind::dissipator_cut ? double(ch.weight) * chi : Complex(0.0);
        const Complex phase = std::exp(kI * arg);
        const Matrix ldl = ch.op.adjoint() * ch.op;
        g.matrix += ch.rate * (phase * superop_sandwich(ch.op, ch.op.adjoint()) -
                               0.5 * superop_left(ldl) - 0.5 * superop_right(ldl));
        g.trace_row += ch.rate * expm1_i(arg) * trace_functional(ldl);
    }
    return g;
}

std::vector<JumpChannel> rc_channels(const ModelParams& p, const Truncation& trunc) {
    const ExtendedOps ops(trunc);
    const double gamma = p.gamma();
    return {
        JumpChannel{ops.a, gamma * (p.n_bath + 1.0), +1},
        JumpChannel{ops.a_dag, gamma * p.n_bath, -1},
    };
}

Generator rc_lme_generator(const ModelParams& p, const Truncation& trunc) {
    p.validate();
    const Matrix h = extended_hamiltonian(p, trunc);
    const auto channels = rc_channels(p, trunc);
    return lindblad_generator(h, h, channels, 0.0, TiltKind::none);
}

Generator tilted_generator_hcut(const ModelParams& p, const Truncation& trunc, double chi) {
    p.validate();
    const Matrix h_ket = extended_hamiltonian(p, trunc, chi);
    const Matrix h_bra = extended_hamiltonian(p, trunc, -chi);
    const auto channels = rc_channels(p, trunc);
    return lindblad_generator(h_ket, h_bra, channels, chi, TiltKind::hamiltonian_cut);
}

Generator tilted_generator_dcut(const ModelParams& p, const Truncation& trunc, Complex chi) {
    p.validate();
    const Matrix h = extended_hamiltonian(p, trunc);
    const auto channels = rc_channels(p, trunc);
    return lindblad_generator(h, h, channels, chi, TiltKind::dissipator_cut);
}

namespace {
double qubit_frequency(const ModelParams& p) {
    // omega_d = omega_c - delta_c, omega_q = omega_d + delta_q
    return p.omega_c - p.delta_c + p.delta_q;
}
} // namespace

double weak_coupling_rate(const ModelParams& p) { return drude_lorentz(qubit_frequency(p), p); }

double weak_coupling_occupation(const ModelParams& p) {
    return BathThermo::from_occupation(p.n_bath, p.omega_c).occupation(qubit_frequency(p));
}

std::vector<JumpChannel> weak_coupling_channels(const ModelParams& p) {
    const QubitOps q = qubit_ops();
    const double rate = weak_coupling_rate(p);
    const double n_q = weak_coupling_occupation(p);
    return {
        JumpChannel{q.lower, rate * (n_q + 1.0), +1},
        JumpChannel{q.raise, rate * n_q, -1},
    };
}

Generator weak_coupling_generator(const ModelParams& p, Complex chi) {
    p.validate();
    const QubitOps q = qubit_ops();
    const Matrix h = p.delta_q * q.excited + p.omega_rabi * q.sigma_x;
    const auto channels = weak_coupling_channels(p);
    return lindblad_generator(h, h, channels, chi,
                              chi == Complex(0.0) ? TiltKind::none : TiltKind::dissipator_cut);
}

} // namespace rcfcs
