#include "rcfcs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rcfcs/propagator.hpp"

namespace rcfcs {

namespace {

Vector identity_vec(int d) { return vectorize(Matrix(Matrix::Identity(d, d))); }

Complex trace_of_vec(const Vector& v, int d) {
    Complex t = 0.0;
    for (int i = 0; i < d; ++i) t += v(i * (d + 1));
    return t;
}

double entry_scale(const Matrix& m) { return std::max(m.cwiseAbs().maxCoeff(), 1e-300); }

SteadyState finish_steady_state(const Generator& g, Vector v, double norm_scale,
                                const SteadyStateOptions& opts, int null_dim) {
    const int d = g.system_dim;
    const Complex tr = trace_of_vec(v, d);
    if (std::abs(tr) == 0.0) throw ConvergenceError("steady_state: null vector has zero trace");
    v /= tr;

    Matrix rho = unvectorize(v);
    rho = 0.5 * (rho + rho.adjoint()).eval();

    SteadyState ss;
    ss.null_dimension = null_dim;
    ss.trace_error = std::abs(rho.trace() - 1.0);
    rho /= rho.trace().real();
    ss.residual_norm = (g.matrix * vectorize(rho)).norm();
    ss.min_eigenvalue =
        Eigen::SelfAdjointEigenSolver<Matrix>(rho, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    ss.rho = std::move(rho);
    if (ss.residual_norm > opts.residual_tol * norm_scale)
        throw ConvergenceError("steady_state: residual " + std::to_string(ss.residual_norm) +
                               " exceeds tolerance");
    return ss;
}

} // namespace

SteadyState steady_state(const Generator& g, const SteadyStateOptions& opts) {
    if (!g.untilted()) throw std::invalid_argument("steady_state: generator carries a counting field");
    const Matrix& l = g.matrix;
    const Eigen::Index n = l.rows();
    const int d = g.system_dim;

    if (opts.method == SteadyStateMethod::bordered_lu) {
        Matrix m = l;
        m.row(0) = identity_vec(d).transpose();
        Vector rhs = Vector::Zero(n);
        rhs(0) = 1.0;
        Eigen::PartialPivLU<Matrix> lu(m);
        if (lu.rcond() < opts.null_tol * 1e-4)
            throw DegenerateSteadyState("steady_state: trace-constrained system is singular (rcond " +
                                        std::to_string(lu.rcond()) + ")");
        return finish_steady_state(g, lu.solve(rhs), l.norm(), opts, 1);
    }

    if (opts.method == SteadyStateMethod::sparse_lu) {
        Matrix m = l;
        m.row(0) = identity_vec(d).transpose();
        const Eigen::SparseMatrix<Complex> sm = m.sparseView();
        Vector rhs = Vector::Zero(n);
        rhs(0) = 1.0;
        Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(sm);
        if (lu.info() != Eigen::Success)
            throw DegenerateSteadyState("steady_state: sparse factorization failed: " + lu.lastErrorMessage());
        const Vector v = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !v.allFinite())
            throw DegenerateSteadyState("steady_state: sparse solve failed");
        return finish_steady_state(g, v, l.norm(), opts, 1);
    }

    Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int null_dim = 1;
    while (null_dim < n && sv(n - 1 - null_dim) <= opts.null_tol * smax) ++null_dim;
    if (null_dim > 1 && opts.require_unique)
        throw DegenerateSteadyState("steady_state: null space of dimension " + std::to_string(null_dim));

    const auto basis = svd.matrixV().rightCols(null_dim);
    const Vector v = basis * (basis.adjoint() * identity_vec(d));
    return finish_steady_state(g, v, smax, opts, null_dim);
}

namespace {

bool spectral_order(const Complex& a, const Complex& b, double tie) {
    if (std::abs(a.real() - b.real()) > tie) return a.real() > b.real();
    if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
    return a.imag() > b.imag();
}

std::vector<Complex> eigenvalues_of(const Matrix& m) {
    Eigen::ComplexEigenSolver<Matrix> es(m, false);
    if (es.info() != Eigen::Success) throw EigensolverFailure("eigensolver did not converge");
    const Vector& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

} // namespace

std::vector<Complex> full_spectrum(const Generator& g) {
    auto ev = eigenvalues_of(g.matrix);
    const double tie = 1e-12 * entry_scale(g.matrix);
    std::stable_sort(ev.begin(), ev.end(),
                     [tie](const Complex& a, const Complex& b) { return spectral_order(a, b, tie); });
    return ev;
}

Eigenpair leading_eigenpair(const Generator& g) {
    const Matrix& l = g.matrix;
    const Eigen::Index n = l.rows();
    const int d = g.system_dim;
    const double scale = entry_scale(l);
    const auto ev = full_spectrum(g);
    const Complex theta = ev.front();

    // Inverse iteration for the eigenvector, shifted slightly off the eigenvalue.
    const Complex shift = theta + Complex(1e-13, 1e-13) * scale;
    Eigen::PartialPivLU<Matrix> lu(l - shift * Matrix::Identity(n, n));
    Vector r = Vector::Ones(n) / std::sqrt(double(n));
    for (int it = 0; it < 3; ++it) {
        r = lu.solve(r);
        const double nr = r.norm();
        if (!std::isfinite(nr) || nr == 0.0) return {theta, Vector()};
        r /= nr;
    }

    const Complex tr = trace_of_vec(r, d);
    if (std::abs(tr) < 1e-8) return {theta, r};
    r /= tr;
    const Complex refined = (g.trace_row * r)(0);
    if (std::abs(refined - theta) > 1e-8 * scale) return {theta, r};
    return {refined, r};
}

Complex leading_eigenvalue(const Generator& g) { return leading_eigenpair(g).value; }

namespace {

// Converges r to the eigenvector nearest `shift`; theta is taken from the trace
// functional when Tr r is not negligible and from the Rayleigh quotient otherwise.
bool inverse_iterate(const Generator& g, Complex shift, Vector& r, Complex& theta) {
    const Matrix& l = g.matrix;
    const Eigen::Index n = l.rows();
    const double scale = entry_scale(l);
    const double tol = 1e-13 * l.cwiseAbs().rowwise().sum().maxCoeff();
    auto estimate = [&](const Vector& v) {
        const Complex tr = trace_of_vec(v, g.system_dim);
        if (std::abs(tr) > 1e-6) return Complex((g.trace_row * v)(0) / tr);
        return Complex(v.dot(l * v));
    };

    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::PartialPivLU<Matrix> lu(l - (shift + Complex(1e-12, 1e-12) * scale) * Matrix::Identity(n, n));
        for (int it = 0; it < (pass == 0 ? 4 : 30); ++it) {
            r = lu.solve(r);
            const double nr = r.norm();
            if (!std::isfinite(nr) || nr == 0.0) return false;
            r /= nr;
            theta = estimate(r);
            if (pass == 1 && (l * r - theta * r).norm() <= tol) return true;
        }
        shift = theta;
    }
    return false;
}

} // namespace

std::vector<Complex> track_leading_branch(const std::function<Generator(Complex)>& tilted,
                                          std::span<const double> chis, double max_step) {
    if (!(max_step > 0.0)) throw std::invalid_argument("track_leading_branch: max_step must be positive");
    SteadyStateOptions so;
    so.method = SteadyStateMethod::bordered_lu;
    const SteadyState ss = steady_state(tilted(Complex(0.0)), so);

    double chi = 0.0;
    Complex theta = 0.0;
    Vector r = vectorize(ss.rho);
    r /= r.norm();
    Complex slope = 0.0;
    double h = max_step;

    std::vector<Complex> out;
    out.reserve(chis.size());
    for (const double target : chis) {
        while (chi != target) {
            const double step = std::clamp(target - chi, -h, h);
            const double next = std::abs(target - chi) <= h ? target : chi + step;
            Vector v = r;
            Complex t = 0.0;
            const bool ok = inverse_iterate(tilted(Complex(next)), theta + slope * (next - chi), v, t);
            if (ok && std::abs(v.dot(r)) >= 0.9) {
                slope = (t - theta) / (next - chi);
                chi = next;
                theta = t;
                r = std::move(v);
                h = std::min(max_step, 2.0 * h);
            } else {
                h *= 0.5;
                if (h < 1e-8)
                    throw ConvergenceError("track_leading_branch: lost the branch near chi = " + std::to_string(chi));
            }
        }
        out.push_back(theta);
    }
    return out;
}

SpectrumSlice spectrum_top(const Generator& g, int k) {
    if (k < 1) throw std::invalid_argument("spectrum_top: k must be >= 1");
    const auto ev = full_spectrum(g);
    double mag = 0.0;
    for (const auto& z : ev) mag = std::max(mag, std::abs(z));
    const double im_tol = 1e-10 * std::max(mag, 1e-300);

    SpectrumSlice slice;
    for (const auto& z : ev) {
        if (z.imag() < -im_tol) continue;
        slice.eigenvalues.push_back(z);
        if (static_cast<int>(slice.eigenvalues.size()) == k + 1) break;
    }
    slice.count = static_cast<int>(slice.eigenvalues.size());
    return slice;
}

DrazinSolver::DrazinSolver(const Generator& g, const Matrix& rho_ss)
    : rho_vec_(vectorize(rho_ss)), n_(g.dim()) {
    if (!g.untilted()) throw std::invalid_argument("DrazinSolver: generator carries a counting field");
    if (rho_vec_.size() != n_) throw std::invalid_argument("DrazinSolver: steady state dimension mismatch");
    Matrix m = Matrix::Zero(n_ + 1, n_ + 1);
    m.topLeftCorner(n_, n_) = g.matrix;
    m.topRightCorner(n_, 1) = rho_vec_;
    m.bottomLeftCorner(1, n_) = identity_vec(g.system_dim).transpose();
    lu_.compute(m);
    rcond_ = lu_.rcond();
    if (!(rcond_ > 1e-14))
        throw SingularSystem("DrazinSolver: bordered system is singular (rcond " + std::to_string(rcond_) + ")");
}

Vector DrazinSolver::apply_vec(const Vector& rhs) const {
    const int d = static_cast<int>(std::llround(std::sqrt(double(n_))));
    Vector b(n_ + 1);
    b.head(n_) = rhs - rho_vec_ * trace_of_vec(rhs, d);
    b(n_) = 0.0;
    return lu_.solve(b).head(n_);
}

Matrix DrazinSolver::apply(const Matrix& rhs) const { return unvectorize(apply_vec(vectorize(rhs))); }

Matrix drazin_apply(const Generator& g, const Matrix& rhs, const Matrix& rho_ss) {
    return DrazinSolver(g, rho_ss).apply(rhs);
}

Matrix propagate(const Generator& g, const Matrix& rho0, double tau) {
    if (tau < 0.0) throw std::invalid_argument("propagate: tau must be >= 0");
    if (rho0.rows() != g.system_dim || rho0.cols() != g.system_dim)
        throw std::invalid_argument("propagate: state dimension mismatch");
    if (tau == 0.0) return rho0;
    const Matrix step = (g.matrix * Complex(tau)).exp();
    return unvectorize(step * vectorize(rho0));
}

} // namespace rcfcs
