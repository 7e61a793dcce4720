// propagator.hpp: exact exponential propagation x' = G x with a dyadic table of
// step propagators exp(G * base_step / 2^k), k = 0..levels.
//
// Arbitrary times are reached by whole base steps followed by a binary expansion of
// the remainder, so the time resolution is base_step / 2^levels.

#pragma once

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "rcfcs/types.hpp"

namespace rcfcs {

template <typename Scalar>
class DyadicPropagator {
public:
    using MatrixType = MatrixX<Scalar>;
    using VectorType = VectorX<Scalar>;

    DyadicPropagator(const MatrixType& generator, double base_step, int levels = 0)
        : base_step_(base_step) {
        if (!(base_step > 0.0) || !std::isfinite(base_step))
            throw std::invalid_argument("DyadicPropagator: base_step must be positive");
        if (levels < 0 || levels > 60) throw std::invalid_argument("DyadicPropagator: levels out of range");
        table_.reserve(levels + 1);
        for (int k = 0; k <= levels; ++k) {
            const double dt = std::ldexp(base_step, -k);
            table_.push_back(MatrixType((generator * Scalar(dt)).exp()));
        }
    }

    int levels() const { return static_cast<int>(table_.size()) - 1; }
    double base_step() const { return base_step_; }
    double step_size(int level) const { return std::ldexp(base_step_, -level); }
    double resolution() const { return step_size(levels()); }
    const MatrixType& step(int level) const { return table_[level]; }

    // Advance x by t (t >= 0), rounded down to the table resolution; returns the time advanced.
    double advance(VectorType& x, double t) const {
        if (t < 0.0) throw std::invalid_argument("DyadicPropagator::advance: negative time");
        double done = 0.0;
        VectorType tmp(x.size());
        const auto whole = static_cast<long long>(std::floor(t / base_step_ * (1.0 + 1e-15)));
        for (long long i = 0; i < whole; ++i) {
            tmp.noalias() = table_[0] * x;
            x.swap(tmp);
        }
        done = double(whole) * base_step_;
        for (int k = 1; k <= levels(); ++k) {
            const double s = step_size(k);
            if (done + s <= t * (1.0 + 1e-15)) {
                tmp.noalias() = table_[k] * x;
                x.swap(tmp);
                done += s;
            }
        }
        return done;
    }

private:
    double base_step_;
    std::vector<MatrixType> table_;
};

} // namespace rcfcs
