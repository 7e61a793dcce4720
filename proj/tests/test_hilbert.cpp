#include "doctest.h"

#include "rcfcs/hilbert.hpp"
#include "test_support.hpp"

using namespace rcfcs;

TEST_SUITE("hilbert") {

TEST_CASE("truncation rejects fewer than two levels") {
    CHECK_THROWS_AS(Truncation(1), std::invalid_argument);
    CHECK_THROWS_AS(Truncation(0), std::invalid_argument);
    CHECK(Truncation(2).dim() == 4);
    CHECK(Truncation(7).dim() == 14);
}

TEST_CASE("annihilation operator entries") {
    Matrix a2 = annihilation(Truncation(2));
    Matrix expect2(2, 2);
    expect2 << 0, 1, 0, 0;
    CHECK(test::max_abs(a2 - expect2) == 0.0);

    const Matrix a3 = annihilation(Truncation(3));
    CHECK(a3(0, 1).real() == doctest::Approx(1.0));
    CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a3.cwiseAbs().sum() == doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("truncated commutator deviates only in the top corner") {
    const Matrix a = annihilation(Truncation(4));
    const Matrix c = a * a.adjoint() - a.adjoint() * a;
    Matrix expect = Matrix::Identity(4, 4);
    expect(3, 3) = 1.0 - 4.0;
    CHECK(test::max_abs(c - expect) < 1e-14);
}

TEST_CASE("number operator is diagonal with entries 0..n_max-1") {
    const Truncation t(6);
    const Matrix n = number_operator(t);
    const Matrix a = annihilation(t);
    CHECK(test::max_abs(n - a.adjoint() * a) < 1e-14);
    for (int k = 0; k < 6; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
    CHECK(test::max_abs(n - Matrix(n.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("qubit operators") {
    const QubitOps q = qubit_ops();
    Matrix ee(2, 2);
    ee << 0, 0, 0, 1;
    CHECK(test::max_abs(q.raise * q.lower - ee) == 0.0);
    CHECK(test::max_abs(q.excited - ee) == 0.0);
    CHECK(test::max_abs(q.lower * q.lower) == 0.0);
    CHECK(test::max_abs(q.sigma_x * q.sigma_x - Matrix::Identity(2, 2)) == 0.0);
    CHECK(test::max_abs(q.sigma_x - q.raise - q.lower) == 0.0);
    // sigma_- |1> = |0>
    CHECK(q.lower(0, 1) == Complex(1.0));
    CHECK(test::max_abs(q.raise.adjoint() - q.lower) == 0.0);
}

TEST_CASE("embedding") {
    const Truncation t(3);
    const QubitOps q = qubit_ops();
    const Matrix a = annihilation(t);
    const Matrix id2 = Matrix::Identity(2, 2), idn = Matrix::Identity(3, 3);

    CHECK(test::max_abs(embed(id2, idn) - Matrix::Identity(6, 6)) == 0.0);
    const Matrix n_es = embed(q.excited, idn) + embed(id2, a.adjoint() * a);
    // Tr(s+s- (x) 1) + Tr(1 (x) a+a) = n_max + 2 * n_max (n_max - 1) / 2
    CHECK(n_es.trace().real() == doctest::Approx(3.0 + 6.0));
    CHECK(test::max_abs(embed(q.raise, a) * embed(q.lower, a.adjoint()) -
                        embed(q.raise * q.lower, a * a.adjoint())) < 1e-14);
    CHECK_THROWS_AS(embed(idn, id2), std::invalid_argument);
    CHECK_THROWS_AS(embed(id2, Matrix::Identity(3, 2)), std::invalid_argument);
}

TEST_CASE("embedding follows the mixed-product rule on random factors") {
    const Matrix x = test::random_matrix(2, 2, 1), u = test::random_matrix(2, 2, 2);
    const Matrix y = test::random_matrix(5, 5, 3), v = test::random_matrix(5, 5, 4);
    CHECK(test::max_abs(embed(x, y) * embed(u, v) - embed(x * u, y * v)) < 1e-12);
}

TEST_CASE("qubit-major basis ordering") {
    const ExtendedOps ops(Truncation(4));
    // index k = s * n_max + n
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < 4; ++n) {
            const int k = s * 4 + n;
            CHECK(ops.n_rc(k, k).real() == doctest::Approx(n));
            CHECK(ops.n_qubit(k, k).real() == doctest::Approx(s));
        }
    CHECK(test::max_abs(ops.a.adjoint() - ops.a_dag) == 0.0);
    CHECK(test::max_abs(ops.sigma_minus.adjoint() - ops.sigma_plus) == 0.0);
}

}
