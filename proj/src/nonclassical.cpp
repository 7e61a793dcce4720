#include "rcfcs/nonclassical.hpp"

#include <cmath>

#include "rcfcs/hilbert.hpp"

namespace rcfcs {

namespace {

double xlogx(double x) { return x < 1e-14 ? 0.0 : x * std::log(x); }

} // namespace

RcState rc_state(const Matrix& rho_rc) {
    if (rho_rc.rows() != rho_rc.cols() || rho_rc.rows() < 2)
        throw std::invalid_argument("rc_state: expected a square state with at least two levels");
    const int n = static_cast<int>(rho_rc.rows());
    const Truncation trunc(n);
    const Matrix a = annihilation(trunc);
    const Matrix ad = a.adjoint();

    RcState rc;
    rc.rho_rc = 0.5 * (rho_rc + rho_rc.adjoint());
    rc.mean_a = (a * rc.rho_rc).trace();
    rc.mean_n = (ad * a * rc.rho_rc).trace().real();
    rc.mean_a2 = (a * a * rc.rho_rc).trace();
    rc.mean_nn = (ad * ad * a * a * rc.rho_rc).trace().real();
    rc.top_population = rc.rho_rc(n - 1, n - 1).real();
    return rc;
}

RcState reduce_rc(const Matrix& rho_extended) {
    const Eigen::Index d = rho_extended.rows();
    if (d != rho_extended.cols() || d % 2 != 0 || d < 4)
        throw std::invalid_argument("reduce_rc: expected a qubit (x) mode state");
    const Eigen::Index n = d / 2;
    return rc_state(rho_extended.topLeftCorner(n, n) + rho_extended.bottomRightCorner(n, n));
}

std::optional<double> g2_zero(const RcState& rc) {
    if (rc.mean_n <= 1e-12) return std::nullopt;
    return rc.mean_nn / (rc.mean_n * rc.mean_n);
}

double gaussian_entropy(double nu) {
    if (nu < 1.0) nu = 1.0;
    const double plus = 0.5 * (nu + 1.0);
    const double minus = 0.5 * (nu - 1.0);
    return xlogx(plus) - xlogx(minus);
}

double von_neumann_entropy(const Matrix& rho) {
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(rho, Eigen::EigenvaluesOnly).eigenvalues();
    double s = 0.0;
    for (double p : ev) s -= xlogx(p);
    return s;
}

Gaussianity non_gaussianity(const RcState& rc) {
    const Complex m = rc.mean_a;
    const double dn = rc.mean_n - std::norm(m);
    const Complex dm = rc.mean_a2 - m * m;
    const double sxx = 2.0 * dm.real() + 2.0 * dn + 1.0;
    const double spp = -2.0 * dm.real() + 2.0 * dn + 1.0;
    const double sxp = 2.0 * dm.imag();
    const double det = sxx * spp - sxp * sxp;
    if (det < 1.0 - 1e-8)
        throw Error("non_gaussianity: covariance determinant " + std::to_string(det) +
                    " violates the uncertainty bound");

    Gaussianity g;
    g.nu = std::sqrt(std::max(det, 1.0));
    g.entropy_gaussian = gaussian_entropy(g.nu);
    g.entropy_state = von_neumann_entropy(rc.rho_rc);
    g.delta_G = g.entropy_gaussian - g.entropy_state;
    return g;
}

double l1_coherence(const RcState& rc) {
    return rc.rho_rc.cwiseAbs().sum() - rc.rho_rc.diagonal().cwiseAbs().sum();
}

NonclassicalityReport analyze_rc(const Matrix& rho_extended) {
    const RcState rc = reduce_rc(rho_extended);
    const Gaussianity g = non_gaussianity(rc);
    NonclassicalityReport rep;
    rep.g2_zero = g2_zero(rc);
    rep.delta_G = g.delta_G;
    rep.nu = g.nu;
    rep.l1_coherence = l1_coherence(rc);
    rep.top_population = rc.top_population;
    return rep;
}

Matrix thermal_state(int n_max, double n_mean) {
    if (n_mean < 0.0) throw std::invalid_argument("thermal_state: n_mean must be >= 0");
    const Truncation trunc(n_max);
    Matrix rho = Matrix::Zero(n_max, n_max);
    const double q = n_mean / (1.0 + n_mean);
    double p = 1.0 / (1.0 + n_mean);
    for (int k = 0; k < n_max; ++k, p *= q) rho(k, k) = p;
    return rho / rho.trace().real();
}

Matrix fock_state(int n_max, int n) {
    const Truncation trunc(n_max);
    if (n < 0 || n >= n_max) throw std::invalid_argument("fock_state: level outside the truncation");
    Matrix rho = Matrix::Zero(n_max, n_max);
    rho(n, n) = 1.0;
    return rho;
}

Matrix coherent_state(int n_max, Complex amplitude) {
    const Truncation trunc(n_max);
    Vector c(n_max);
    c(0) = 1.0;
    for (int k = 1; k < n_max; ++k) c(k) = c(k - 1) * amplitude / std::sqrt(double(k));
    c.normalize();
    return c * c.adjoint();
}

} // namespace rcfcs
