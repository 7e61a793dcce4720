// spectral.hpp: steady states, Liouvillian spectra, the leading (CGF) eigenvalue,
// Drazin-inverse action and time propagation of density matrices.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rcfcs/liouville.hpp"
#include "rcfcs/types.hpp"

namespace rcfcs {

struct SteadyState {
    Matrix rho;              // Hermitized, unit trace
    double residual_norm{0}; // ||L vec(rho)||
    double trace_error{0};   // |Tr rho - 1| before final normalization rounding
    double min_eigenvalue{0};
    int null_dimension{1};
};

enum class SteadyStateMethod {
    svd,         // smallest right singular vectors of L; detects degenerate null spaces
    bordered_lu, // trace-constrained LU solve; singularity detected through rcond
    sparse_lu,   // trace-constrained sparse LU; singularity shows up as a failed factorization
};

struct SteadyStateOptions {
    SteadyStateMethod method{SteadyStateMethod::svd};
    // Singular values below null_tol * sigma_max count as null directions.
    double null_tol{1e-9};
    // With require_unique = false a degenerate null space resolves to the projection
    // of the identity onto it instead of throwing.
    bool require_unique{true};
    double residual_tol{1e-10};
};

// Throws DegenerateSteadyState or ConvergenceError.
SteadyState steady_state(const Generator& g, const SteadyStateOptions& opts = {});

struct Eigenpair {
    Complex value;
    Vector right; // normalized to unit trace when that trace is not negligible
};

// Eigenvalue with the largest real part; ties broken by the smallest |Im|. The value
// is refined through the trace functional: theta = (vec(1)^T L r) / (vec(1)^T r)
// where vec(1)^T L is assembled analytically, which keeps small tilted eigenvalues
// accurate to relative precision.
Eigenpair leading_eigenpair(const Generator& g);
Complex leading_eigenvalue(const Generator& g);

// Branch of the leading eigenvalue of a counting-field family, continued from
// theta(0) = 0 and the steady state. Targets are visited in the given order, each
// reached from the previous one in steps of at most max_step by shifted inverse
// iteration; a step is accepted when the new eigenvector overlaps the previous one by
// at least 0.9 and is halved otherwise. Throws ConvergenceError when the step
// underflows. For real chi the branch is the eigenvalue with the largest real part as
// long as it stays isolated.
std::vector<Complex> track_leading_branch(const std::function<Generator(Complex)>& tilted,
                                          std::span<const double> chis, double max_step = 0.1);

// Full spectrum sorted by descending real part (ties: ascending |Im|).
std::vector<Complex> full_spectrum(const Generator& g);

struct SpectrumSlice {
    std::vector<Complex> eigenvalues; // theta_0, theta_1, ... ; one entry per conjugate pair (Im >= 0)
    int count{0};
};

// The k + 1 leading eigenvalues after conjugate-pair deduplication.
SpectrumSlice spectrum_top(const Generator& g, int k);

// Solves L x = rhs - rho_ss Tr[rhs] with Tr[x] = 0 through one bordered LU
// factorization; reusable across right-hand sides.
class DrazinSolver {
public:
    DrazinSolver(const Generator& g, const Matrix& rho_ss);

    Matrix apply(const Matrix& rhs) const;
    Vector apply_vec(const Vector& rhs) const;
    double rcond() const { return rcond_; }

private:
    Eigen::PartialPivLU<Matrix> lu_;
    Vector rho_vec_;
    Eigen::Index n_;
    double rcond_{0};
};

Matrix drazin_apply(const Generator& g, const Matrix& rhs, const Matrix& rho_ss);

// exp(L tau) rho0 through a dense matrix exponential.
Matrix propagate(const Generator& g, const Matrix& rho0, double tau);

} // namespace rcfcs
