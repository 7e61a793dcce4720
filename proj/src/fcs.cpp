#include "rcfcs/fcs.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace rcfcs {

namespace {

RowVector trace_row_of(const Matrix& x) { return vectorize(Matrix(x.transpose())).transpose(); }

double relative(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace

const char* to_string(NoiseMethod m) {
    switch (m) {
    case NoiseMethod::fd_cgf: return "fd_cgf";
    case NoiseMethod::drazin: return "drazin";
    case NoiseMethod::trajectory: return "trajectory";
    }
    return "?";
}

const char* to_string(CountingCut c) { return c == CountingCut::hamiltonian ? "hamiltonian" : "dissipator"; }

const char* to_string(AffinityConvention c) {
    return c == AffinityConvention::thermodynamic ? "thermodynamic" : "paper_literal";
}

double affinity(double n_bath, AffinityConvention conv) {
    if (n_bath < 0.0) throw std::invalid_argument("affinity: n_bath must be >= 0");
    if (conv == AffinityConvention::paper_literal) return std::log1p(n_bath);
    return BathThermo::from_occupation(n_bath).affinity;
}

CurrentSuperop current_superop(std::span<const JumpChannel> channels) {
    if (channels.empty()) throw std::invalid_argument("current_superop: no channels");
    const Eigen::Index d = channels.front().op.rows();
    CurrentSuperop j;
    j.matrix = Matrix::Zero(d * d, d * d);
    j.current_row = RowVector::Zero(d * d);
    j.activity_row = RowVector::Zero(d * d);
    for (const JumpChannel& ch : channels) {
        if (ch.rate == 0.0) continue;
        const Matrix ldl = ch.op.adjoint() * ch.op;
        const RowVector row = ch.rate * trace_row_of(ldl);
        j.matrix += double(ch.weight) * ch.rate * superop_sandwich(ch.op, ch.op.adjoint());
        j.current_row += double(ch.weight) * row;
        j.activity_row += row;
    }
    return j;
}

double average_current(const Matrix& rho_ss, std::span<const JumpChannel> channels) {
    double j = 0.0;
    for (const JumpChannel& ch : channels)
        j += ch.weight * ch.rate * (ch.op.adjoint() * ch.op * rho_ss).trace().real();
    return j;
}

double dynamical_activity(const Matrix& rho_ss, std::span<const JumpChannel> channels) {
    double k = 0.0;
    for (const JumpChannel& ch : channels) k += ch.rate * (ch.op.adjoint() * ch.op * rho_ss).trace().real();
    return k;
}

CountingModel rc_counting_model(const ModelParams& p, const Truncation& trunc, CountingCut cut) {
    CountingModel m;
    m.generator = rc_lme_generator(p, trunc);
    m.channels = rc_channels(p, trunc);
    m.n_bath = p.n_bath;
    if (cut == CountingCut::dissipator) {
        m.tilted = [p, trunc](Complex chi) { return tilted_generator_dcut(p, trunc, chi); };
    } else {
        m.tilted = [p, trunc](Complex chi) {
            if (chi.imag() != 0.0)
                throw std::invalid_argument("hamiltonian cut: counting field must be real");
            return tilted_generator_hcut(p, trunc, chi.real());
        };
    }
    return m;
}

CountingModel weak_coupling_counting_model(const ModelParams& p) {
    CountingModel m;
    m.generator = weak_coupling_generator(p);
    m.channels = weak_coupling_channels(p);
    m.n_bath = p.n_bath;
    m.tilted = [p](Complex chi) { return weak_coupling_generator(p, chi); };
    return m;
}

FdCumulants fd_cumulants(const std::function<Generator(Complex)>& tilted, double h) {
    if (!(h >= 1e-4 && h <= 1e-2)) throw std::invalid_argument("fd_cumulants: step must lie in [1e-4, 1e-2]");
    const double rate = tilted(Complex(0.0)).matrix.cwiseAbs().rowwise().sum().maxCoeff();
    const std::vector<double> chis{0.5 * h, h, -0.5 * h, -h};
    const std::vector<Complex> th = track_leading_branch(tilted, chis);
    struct Pair {
        Complex j, d;
    };
    // theta(0) = 0 on the tracked branch
    auto central = [](Complex tp, Complex tm, double s) {
        return Pair{-kI * (tp - tm) / (2.0 * s), -(tp + tm) / (s * s)};
    };
    const Pair coarse = central(th[1], th[3], h);
    const Pair fine = central(th[0], th[2], 0.5 * h);

    FdCumulants out;
    out.step = h;
    out.current_coarse = coarse.j.real();
    out.noise_coarse = coarse.d.real();
    out.current = (4.0 * fine.j.real() - coarse.j.real()) / 3.0;
    out.noise = (4.0 * fine.d.real() - coarse.d.real()) / 3.0;

    // rounding level of the second difference at the fine step
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * rate / (0.25 * h * h);
    const double scale = std::max({std::abs(out.current), std::abs(out.noise), floor});
    out.imag_residue = std::max({std::abs(coarse.j.imag()), std::abs(coarse.d.imag()),
                                 std::abs(fine.j.imag()), std::abs(fine.d.imag())}) / scale;
    if (out.imag_residue > 1e-4)
        throw ConvergenceError("fd_cumulants: non-real cumulant (relative residue " +
                               std::to_string(out.imag_residue) + ")");
    if (out.imag_residue > 1e-8)
        out.warnings.push_back("imaginary residue " + std::to_string(out.imag_residue) + " discarded");

    const double dj = std::abs(out.current - fine.j.real());
    const double dd = std::abs(out.noise - fine.d.real());
    out.stable = dj <= 1e-7 * std::max(std::abs(out.current), floor) &&
                 dd <= 1e-7 * std::max(std::abs(out.noise), floor);
    if (!out.stable) out.warnings.push_back("cumulants not stable between steps h and h/2");
    return out;
}

FdCumulants noise_fd_cgf(const ModelParams& p, const Truncation& trunc, double h, CountingCut cut) {
    return fd_cumulants(rc_counting_model(p, trunc, cut).tilted, h);
}

double noise_drazin(const DrazinSolver& solver, const Matrix& rho_ss, std::span<const JumpChannel> channels) {
    const CurrentSuperop j = current_superop(channels);
    const Vector r = vectorize(rho_ss);
    const Vector jr = j.matrix * r;
    const double current = (j.current_row * r)(0).real();
    const double activity = (j.activity_row * r)(0).real();
    const Vector x = solver.apply_vec(jr - current * r);
    return activity - 2.0 * (j.current_row * x)(0).real();
}

double noise_drazin(const Generator& g, const Matrix& rho_ss, std::span<const JumpChannel> channels) {
    return noise_drazin(DrazinSolver(g, rho_ss), rho_ss, channels);
}

bool current_negligible(double current, double activity) {
    return std::abs(current) <= 1e-12 * std::abs(activity);
}

double entropy_production(double current, double n_bath, AffinityConvention conv) {
    if (current == 0.0) return 0.0;
    return current * affinity(n_bath, conv);
}

std::optional<double> tur_ratio(const FcsResult& r, double n_bath, AffinityConvention conv) {
    const double a = affinity(n_bath, conv);
    if (current_negligible(r.current_J, r.activity_K) || !std::isfinite(a)) return std::nullopt;
    return r.noise_D / r.current_J * a;
}

FcsResult finish_fcs(double current, double activity, double noise, NoiseMethod method, double n_bath,
                     AffinityConvention conv) {
    FcsResult r;
    r.current_J = current;
    r.activity_K = activity;
    r.noise_D = noise;
    r.noise_method = method;
    r.entropy_rate = entropy_production(current, n_bath, conv);
    r.snr = noise > 0.0 ? current * current / noise : 0.0;
    r.tur_Q = tur_ratio(r, n_bath, conv);
    return r;
}

FcsResult compute_fcs(const CountingModel& model, const FcsOptions& opts) {
    const SteadyState ss = steady_state(model.generator, opts.steady);
    const double current = average_current(ss.rho, model.channels);
    const double activity = dynamical_activity(ss.rho, model.channels);
    double noise = 0.0;
    switch (opts.noise_method) {
    case NoiseMethod::drazin:
        noise = noise_drazin(model.generator, ss.rho, model.channels);
        break;
    case NoiseMethod::fd_cgf:
        noise = fd_cumulants(model.tilted, opts.fd_step).noise;
        break;
    case NoiseMethod::trajectory:
        throw std::invalid_argument("compute_fcs: trajectory noise is estimated by the trajectories module");
    }
    return finish_fcs(current, activity, noise, opts.noise_method, model.n_bath, opts.affinity);
}

EquivalenceReport equivalence_certificate(const ModelParams& p, const Truncation& trunc,
                                          std::span<const double> chi_grid, double fd_step, int threads) {
    if (chi_grid.size() < 5) throw std::invalid_argument("equivalence_certificate: need at least 5 points");
    EquivalenceReport rep;
    rep.chi.assign(chi_grid.begin(), chi_grid.end());
    rep.diffs.resize(chi_grid.size());

    auto branch = [&](CountingCut cut) {
        return track_leading_branch(
            [&](Complex chi) {
                return cut == CountingCut::hamiltonian ? tilted_generator_hcut(p, trunc, chi.real())
                                                       : tilted_generator_dcut(p, trunc, chi.real());
            },
            chi_grid);
    };
    const auto launch = threads > 1 ? std::launch::async : std::launch::deferred;
    auto hcut = std::async(launch, branch, CountingCut::hamiltonian);
    const std::vector<Complex> td = branch(CountingCut::dissipator);
    const std::vector<Complex> th = hcut.get();
    for (std::size_t i = 0; i < chi_grid.size(); ++i) rep.diffs[i] = std::abs(th[i] - td[i]);

    rep.max_diff = *std::max_element(rep.diffs.begin(), rep.diffs.end());
    if (fd_step > 0.0) {
        rep.noise_hcut = noise_fd_cgf(p, trunc, fd_step, CountingCut::hamiltonian).noise;
        rep.noise_dcut = noise_fd_cgf(p, trunc, fd_step, CountingCut::dissipator).noise;
    }
    rep.passed = rep.max_diff < 1e-9 &&
                 (fd_step <= 0.0 || relative(rep.noise_hcut, rep.noise_dcut) < 1e-8);
    return rep;
}

} // namespace rcfcs
