// types.hpp: scalar and dense-matrix aliases shared by every module

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rcfcs {

using Complex = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Operators on the truncated Hilbert space and superoperators alike are dense complex.
using Matrix = MatrixX<Complex>;
using Vector = VectorX<Complex>;
using RowVector = Eigen::Matrix<Complex, 1, Eigen::Dynamic>;

inline constexpr Complex kI{0.0, 1.0};

// Numerical failures that callers may want to catch and record.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateSteadyState : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class EigensolverFailure : public Error {
public:
    using Error::Error;
};

class TruncationOverflow : public Error {
public:
    using Error::Error;
};

} // namespace rcfcs
