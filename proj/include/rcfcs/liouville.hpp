// liouville.hpp: column-stacking vectorization and GKSL generators, plain and
// counting-field dressed.
//
// Convention: vec(A rho B) = (B^T (x) A) vec(rho), vec stacks columns.

#pragma once

#include <span>
#include <vector>

#include "rcfcs/model.hpp"
#include "rcfcs/types.hpp"

namespace rcfcs {

enum class TiltKind { none, hamiltonian_cut, dissipator_cut };

// Jump channel L_k = sqrt(rate) * op, counted with weight +1 (emission into the
// bath) or -1 (absorption from it).
struct JumpChannel {
    Matrix op;
    double rate{0.0};
    int weight{+1};

    Matrix scaled() const { return std::sqrt(rate) * op; }
};

struct Generator {
    Matrix matrix;        // d^2 x d^2 acting on vec(rho)
    RowVector trace_row;  // vec(1)^T * matrix assembled term by term; zero when untilted
    Complex chi{0.0};
    TiltKind tilt{TiltKind::none};
    int system_dim{0};    // d

    Eigen::Index dim() const { return matrix.rows(); }
    bool untilted() const { return tilt == TiltKind::none || chi == Complex(0.0); }
};

template <typename Derived>
VectorX<typename Derived::Scalar> vectorize(const Eigen::MatrixBase<Derived>& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("vectorize: matrix must be square");
    return rho.derived().reshaped();
}

Matrix unvectorize(const Vector& v);

// rho -> A rho
Matrix superop_left(const Matrix& a);
// rho -> rho B
Matrix superop_right(const Matrix& b);
// rho -> A rho B
Matrix superop_sandwich(const Matrix& a, const Matrix& b);

// -i (h_ket rho - rho h_bra) + sum_k rate_k [phase_k L rho L^+ - 1/2 {L^+ L, rho}]
// with phase_k = exp(i weight_k chi) for the dissipator cut and 1 otherwise.
Generator lindblad_generator(const Matrix& h_ket, const Matrix& h_bra,
                             std::span<const JumpChannel> channels, Complex chi, TiltKind tilt);

// Emission gamma (n_B + 1) D[a] (weight +1) and absorption gamma n_B D[a^+] (weight -1).
std::vector<JumpChannel> rc_channels(const ModelParams& p, const Truncation& trunc);

Generator rc_lme_generator(const ModelParams& p, const Truncation& trunc);

// Counting at the qubit-RC interface: half-angle phases on the coupling term,
// generator period 4 pi in chi.
Generator tilted_generator_hcut(const ModelParams& p, const Truncation& trunc, double chi);

// Counting at the RC-residual bath interface: full-angle phases on the sandwich
// terms. Complex chi is allowed (fluctuation-theorem checks).
Generator tilted_generator_dcut(const ModelParams& p, const Truncation& trunc, Complex chi);

// Qubit-only benchmark for the flat-spectrum regime: rate gamma_q = S(omega_q) on the
// Drude-Lorentz density, occupation n_q at omega_q, counting field on the sandwich terms.
double weak_coupling_rate(const ModelParams& p);
double weak_coupling_occupation(const ModelParams& p);
std::vector<JumpChannel> weak_coupling_channels(const ModelParams& p);
Generator weak_coupling_generator(const ModelParams& p, Complex chi = 0.0);

} // namespace rcfcs
