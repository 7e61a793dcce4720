// fcs.hpp: steady-state counting statistics of the excitation current

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcfcs/liouville.hpp"
#include "rcfcs/spectral.hpp"

namespace rcfcs {

enum class NoiseMethod { fd_cgf, drazin, trajectory };
enum class CountingCut { hamiltonian, dissipator };

// thermodynamic: A = ln(1 + 1/n_B) = omega_c / T.  paper_literal: A = ln(n_B + 1).
enum class AffinityConvention { thermodynamic, paper_literal };

const char* to_string(NoiseMethod m);
const char* to_string(CountingCut c);
const char* to_string(AffinityConvention c);

double affinity(double n_bath, AffinityConvention conv = AffinityConvention::thermodynamic);

// J = sum_k nu_k L_k . L_k^+ as a superoperator, together with the row vectors that
// take Tr[J x] and the activity Tr[sum_k L_k x L_k^+] of a vectorized x.
struct CurrentSuperop {
    Matrix matrix;
    RowVector current_row;
    RowVector activity_row;
};

CurrentSuperop current_superop(std::span<const JumpChannel> channels);

double average_current(const Matrix& rho_ss, std::span<const JumpChannel> channels);
double dynamical_activity(const Matrix& rho_ss, std::span<const JumpChannel> channels);

// Untilted generator, counted channels and the counting-field dressed family.
struct CountingModel {
    Generator generator;
    std::vector<JumpChannel> channels;
    std::function<Generator(Complex)> tilted;
    double n_bath{0.0};
};

CountingModel rc_counting_model(const ModelParams& p, const Truncation& trunc,
                                CountingCut cut = CountingCut::dissipator);
CountingModel weak_coupling_counting_model(const ModelParams& p);

// First two scaled cumulants from central differences of theta_0(chi), at steps h and
// h/2, combined by Richardson extrapolation.
struct FdCumulants {
    double current{0};
    double noise{0};
    double current_coarse{0}; // step h, no extrapolation
    double noise_coarse{0};
    double step{0};
    double imag_residue{0};   // largest |Im| of the cumulant estimates, relative
    bool stable{false};       // extrapolated and fine-step values agree to 1e-7
    std::vector<std::string> warnings;
};

FdCumulants fd_cumulants(const std::function<Generator(Complex)>& tilted, double h = 1e-3);
FdCumulants noise_fd_cgf(const ModelParams& p, const Truncation& trunc, double h = 1e-3,
                         CountingCut cut = CountingCut::dissipator);

// D = K - 2 Tr[J x] with L x = J rho_ss - J rho_ss, Tr x = 0.
double noise_drazin(const Generator& g, const Matrix& rho_ss, std::span<const JumpChannel> channels);
double noise_drazin(const DrazinSolver& solver, const Matrix& rho_ss,
                    std::span<const JumpChannel> channels);

struct FcsResult {
    double current_J{0};
    double activity_K{0};
    double noise_D{0};
    NoiseMethod noise_method{NoiseMethod::drazin};
    std::optional<double> tur_Q;
    double entropy_rate{0};
    double snr{0};
};

double entropy_production(double current, double n_bath,
                          AffinityConvention conv = AffinityConvention::thermodynamic);

// |J| at round-off level relative to the jump rate K.
bool current_negligible(double current, double activity);

// Q = (D / J) A; absent when the current is negligible or the affinity is infinite.
std::optional<double> tur_ratio(const FcsResult& r, double n_bath,
                                AffinityConvention conv = AffinityConvention::thermodynamic);

struct FcsOptions {
    NoiseMethod noise_method{NoiseMethod::drazin};
    double fd_step{1e-3};
    AffinityConvention affinity{AffinityConvention::thermodynamic};
    SteadyStateOptions steady{};
};

// Fills J, K, D and the derived quantities. NoiseMethod::trajectory is rejected here.
FcsResult compute_fcs(const CountingModel& model, const FcsOptions& opts = {});
FcsResult finish_fcs(double current, double activity, double noise, NoiseMethod method,
                     double n_bath, AffinityConvention conv);

struct EquivalenceReport {
    std::vector<double> chi;
    std::vector<double> diffs; // |theta_H(chi) - theta_D(chi)|
    double max_diff{0};
    double noise_hcut{0};
    double noise_dcut{0};
    bool passed{false};
};

// Requires at least five grid points. Grid points are evaluated on up to `threads` workers.
EquivalenceReport equivalence_certificate(const ModelParams& p, const Truncation& trunc,
                                          std::span<const double> chi_grid, double fd_step = 1e-3,
                                          int threads = 1);

} // namespace rcfcs
