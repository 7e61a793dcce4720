#include "rcfcs/hilbert.hpp"

#include <string>

namespace rcfcs {

Truncation::Truncation(int n_max) : n_max_(n_max) {
    if (n_max < 2)
        throw std::invalid_argument("Truncation: n_max must be >= 2, got " + std::to_string(n_max));
}

QubitOps qubit_ops() {
    QubitOps ops;
    ops.lower = Matrix::Zero(2, 2);
    ops.lower(0, 1) = 1.0;
    ops.raise = ops.lower.adjoint();
    ops.sigma_x = ops.raise + ops.lower;
    ops.excited = ops.raise * ops.lower;
    return ops;
}

Matrix embed(const Matrix& qubit_op, const Matrix& rc_op) {
    if (qubit_op.rows() != 2 || qubit_op.cols() != 2)
        throw std::invalid_argument("embed: qubit factor must be 2x2");
    if (rc_op.rows() != rc_op.cols() || rc_op.rows() < 2)
        throw std::invalid_argument("embed: mode factor must be square with dimension >= 2");
    return kron(qubit_op, rc_op);
}

ExtendedOps::ExtendedOps(const Truncation& t) : trunc(t) {
    const QubitOps q = qubit_ops();
    const Matrix id2 = Matrix::Identity(2, 2);
    const Matrix idn = Matrix::Identity(t.n_max(), t.n_max());
    const Matrix am = annihilation(t);
    a = embed(id2, am);
    a_dag = a.adjoint();
    sigma_minus = embed(q.lower, idn);
    sigma_plus = sigma_minus.adjoint();
    n_rc = embed(id2, number_operator(t));
    n_qubit = embed(q.excited, idn);
}

} // namespace rcfcs
