// test_support.hpp: helpers shared by the unit tests

#pragma once

#include <random>

#include "rcfcs/types.hpp"

namespace rcfcs::test {

inline Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

inline Matrix random_density(int d, std::uint64_t seed) {
    const Matrix a = random_matrix(d, d, seed);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace rcfcs::test
