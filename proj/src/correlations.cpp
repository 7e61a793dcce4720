#include "rcfcs/correlations.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "rcfcs/fcs.hpp"
#include "rcfcs/spectral.hpp"

namespace rcfcs {

namespace {

// exp(G s) x by its Taylor series; requires ||G s|| <= 1/2 in the induced infinity norm.
Vector taylor_action(const Matrix& g, Vector x, double s) {
    Vector term = x;
    for (int k = 1; k <= 40; ++k) {
        term = (g * term) * Complex(s / k);
        x += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-17 * x.cwiseAbs().maxCoeff()) break;
    }
    return x;
}

} // namespace

std::vector<double> default_tau_grid(double horizon, int points) {
    if (!(horizon > 0.0)) throw std::invalid_argument("default_tau_grid: horizon must be positive");
    if (points < 2) throw std::invalid_argument("default_tau_grid: need at least 2 points");
    std::vector<double> taus{0.0};
    const double lo = std::log(1e-4 * horizon);
    const double hi = std::log(horizon);
    for (int i = 0; i < points - 1; ++i) {
        const double f = points == 2 ? 1.0 : double(i) / double(points - 2);
        taus.push_back(i == points - 2 ? horizon : std::exp(lo + f * (hi - lo)));
    }
    return taus;
}

CorrelationTrace correlation_function(const Generator& g, const Matrix& rho_ss,
                                      std::span<const JumpChannel> channels, std::span<const double> taus,
                                      const CorrelationOptions& opts) {
    if (!g.untilted()) throw std::invalid_argument("correlation_function: generator carries a counting field");
    if (taus.empty() || taus.front() != 0.0)
        throw std::invalid_argument("correlation_function: taus must start at 0");
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] > taus[i - 1]))
            throw std::invalid_argument("correlation_function: taus must be strictly increasing");

    const CurrentSuperop j = current_superop(channels);
    const Vector r = vectorize(rho_ss);
    const double current = (j.current_row * r)(0).real();
    const Vector y0 = j.matrix * r - current * r;
    auto corr = [&](const Vector& y) { return (j.current_row * y)(0); };

    CorrelationTrace out;
    const double horizon = taus.back();
    if (taus.size() == 1) {
        const Complex c0 = corr(y0);
        out.taus = {0.0};
        out.values = {c0.real()};
        return out;
    }

    const double rate = g.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    const int resolving = static_cast<int>(std::ceil(horizon * rate / 0.5));
    int m = std::max({opts.quadrature_intervals, opts.min_intervals, resolving});
    if (m % 2) ++m;
    const double dt = horizon / m;
    const Matrix step = (g.matrix * Complex(dt)).exp();

    std::vector<double> grid_values(m + 1);
    out.taus.reserve(taus.size());
    out.values.reserve(taus.size());
    double c_ref = 0.0;
    double max_imag = 0.0;

    Vector y = y0;
    Vector tmp(y.size());
    std::size_t next = 0;
    for (int k = 0; k <= m; ++k) {
        const double t_k = k * dt;
        const Complex c = corr(y);
        grid_values[k] = c.real();
        max_imag = std::max(max_imag, std::abs(c.imag()));
        if (k == 0) c_ref = std::max(std::abs(c.real()), 1e-300);

        while (next < taus.size() && (k == m || taus[next] < t_k + dt)) {
            const double rem = std::max(0.0, taus[next] - t_k);
            const Complex cv = k < m && rem > 0.0 ? corr(taylor_action(g.matrix, y, rem)) : c;
            out.taus.push_back(k == m ? horizon : taus[next]);
            out.values.push_back(cv.real());
            max_imag = std::max(max_imag, std::abs(cv.imag()));
            ++next;
        }
        if (k < m) {
            tmp.noalias() = step * y;
            y.swap(tmp);
        }
    }

    double s = grid_values.front() + grid_values.back();
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * grid_values[k];
    out.integral = s * dt / 3.0;

    double m1 = 0.0, m2 = 0.0;
    for (int k = m / 2; k <= m; ++k) {
        const double a = std::abs(grid_values[k]);
        if (4 * k <= 3 * m)
            m1 = std::max(m1, a);
        else
            m2 = std::max(m2, a);
    }
    if (m2 == 0.0)
        out.tail_bound = 0.0;
    else if (m2 < m1)
        out.tail_bound = m2 / (std::log(m1 / m2) / (0.25 * horizon));
    else
        out.tail_bound = m2 * horizon;
    out.imag_residue = max_imag / c_ref;
    return out;
}

double d_minus_k(const Generator& g, const Matrix& rho_ss, std::span<const JumpChannel> channels) {
    const CurrentSuperop j = current_superop(channels);
    const Vector r = vectorize(rho_ss);
    const double current = (j.current_row * r)(0).real();
    const DrazinSolver solver(g, rho_ss);
    const Vector x = solver.apply_vec(j.matrix * r - current * r);
    return -2.0 * (j.current_row * x)(0).real();
}

std::optional<double> oscillation_period(const CorrelationTrace& trace) {
    std::vector<double> crossings;
    for (std::size_t i = 1; i < trace.values.size(); ++i) {
        const double a = trace.values[i - 1];
        const double b = trace.values[i];
        if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
            const double f = a / (a - b);
            crossings.push_back(trace.taus[i - 1] + f * (trace.taus[i] - trace.taus[i - 1]));
        }
    }
    if (crossings.size() < 3) return std::nullopt;
    return 2.0 * (crossings.back() - crossings.front()) / double(crossings.size() - 1);
}

} // namespace rcfcs
