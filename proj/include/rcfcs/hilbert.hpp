// hilbert.hpp: operator algebra on qubit (x) truncated bosonic mode

#pragma once

#include <cmath>

#include "rcfcs/types.hpp"

namespace rcfcs {

// Number of retained Fock levels (0 .. n_max-1) for the reaction-coordinate mode.
class Truncation {
public:
    explicit Truncation(int n_max);

    int n_max() const { return n_max_; }
    // Dimension of qubit (x) mode; basis index k = s * n_max + n (qubit-major).
    int dim() const { return 2 * n_max_; }

    friend bool operator==(const Truncation&, const Truncation&) = default;

private:
    int n_max_;
};

// Truncated annihilation operator: A(n-1, n) = sqrt(n).
template <typename Scalar = Complex>
MatrixX<Scalar> annihilation(const Truncation& trunc) {
    const int n = trunc.n_max();
    MatrixX<Scalar> a = MatrixX<Scalar>::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = Scalar(std::sqrt(double(k)));
    return a;
}

template <typename Scalar = Complex>
MatrixX<Scalar> number_operator(const Truncation& trunc) {
    const int n = trunc.n_max();
    MatrixX<Scalar> num = MatrixX<Scalar>::Zero(n, n);
    for (int k = 0; k < n; ++k) num(k, k) = Scalar(double(k));
    return num;
}

struct QubitOps {
    Matrix lower;   // sigma_-, maps |1> to |0>
    Matrix raise;   // sigma_+
    Matrix sigma_x;
    Matrix excited; // sigma_+ sigma_- = |1><1|
};

QubitOps qubit_ops();

// Kronecker product with the left factor as the slow (outer) index.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                         const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    MatrixX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Lift qubit_op (2x2) and rc_op (n_max x n_max) to qubit_op (x) rc_op.
Matrix embed(const Matrix& qubit_op, const Matrix& rc_op);

// Frequently used operators already lifted to the extended space.
struct ExtendedOps {
    explicit ExtendedOps(const Truncation& trunc);

    Truncation trunc;
    Matrix a;           // 1 (x) a
    Matrix a_dag;       // 1 (x) a^dagger
    Matrix sigma_minus; // sigma_- (x) 1
    Matrix sigma_plus;  // sigma_+ (x) 1
    Matrix n_rc;        // 1 (x) a^dagger a
    Matrix n_qubit;     // sigma_+ sigma_- (x) 1
};

} // namespace rcfcs
