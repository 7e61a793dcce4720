#include "rcfcs/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "rcfcs/propagator.hpp"

namespace rcfcs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform on the open interval (0, 1) with 53 random bits.
double open_uniform(std::mt19937_64& rng) { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; }

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sample_variance(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

class JumpSampler {
public:
    JumpSampler(const ModelParams& p, const Truncation& trunc, const TrajectoryOptions& opts)
        : n_max_(trunc.n_max()), overflow_tol_(opts.overflow_tol),
          prop_(effective_hamiltonian(p, trunc) * Complex(0.0, -1.0),
                opts.base_step > 0.0 ? opts.base_step : 0.25 / p.gamma(), opts.levels) {
        for (const JumpChannel& ch : rc_channels(p, trunc))
            if (ch.rate > 0.0) channels_.push_back(ch);
    }

    JumpRecord run(double t_final, std::uint64_t seed, std::vector<double> snapshots) const {
        if (!(t_final > 0.0)) throw std::invalid_argument("sample_trajectory: t_final must be positive");
        std::sort(snapshots.begin(), snapshots.end());
        for (double s : snapshots)
            if (s < 0.0 || s > t_final) throw std::invalid_argument("sample_trajectory: snapshot outside [0, t_final]");

        JumpRecord rec;
        rec.seed = seed;
        rec.t_final = t_final;
        std::mt19937_64 rng(seed);

        Vector psi = Vector::Zero(2 * n_max_);
        psi(0) = 1.0;
        double t = 0.0;
        double r = open_uniform(rng);
        std::size_t snap = 0;

        while (true) {
            const bool at_snapshot = snap < snapshots.size();
            const double target = at_snapshot ? snapshots[snap] : t_final;
            if (evolve(psi, t, target, r)) {
                jump(psi, t, rng, rec);
                r = open_uniform(rng);
                continue;
            }
            t = target;
            if (at_snapshot) {
                rec.snapshots.push_back(psi / psi.norm());
                ++snap;
                continue;
            }
            break;
        }
        return rec;
    }

private:
    static Matrix effective_hamiltonian(const ModelParams& p, const Truncation& trunc) {
        Matrix h = extended_hamiltonian(p, trunc);
        for (const JumpChannel& ch : rc_channels(p, trunc))
            h -= Complex(0.0, 0.5 * ch.rate) * (ch.op.adjoint() * ch.op);
        return h;
    }

    void guard(const Vector& psi) const {
        const double total = psi.squaredNorm();
        const double top = std::norm(psi(n_max_ - 1)) + std::norm(psi(2 * n_max_ - 1));
        if (top > overflow_tol_ * total)
            throw TruncationOverflow("trajectory: top Fock population " + std::to_string(top / total) +
                                     " exceeds tolerance; increase n_max");
    }

    // Advances psi from t toward target. Returns true when the squared norm reaches r first,
    // with t set to the jump time; false when target is reached without a jump.
    bool evolve(Vector& psi, double& t, double target, double r) const {
        Vector cand(psi.size());
        double left = target - t;
        const double base = prop_.base_step();
        while (left >= base) {
            cand.noalias() = prop_.step(0) * psi;
            if (cand.squaredNorm() <= r) break;
            psi.swap(cand);
            t += base;
            left -= base;
            guard(psi);
        }
        for (int k = 1; k <= prop_.levels(); ++k) {
            const double s = prop_.step_size(k);
            if (s > left) continue;
            cand.noalias() = prop_.step(k) * psi;
            if (cand.squaredNorm() > r) {
                psi.swap(cand);
                t += s;
                left -= s;
            }
        }
        if (left < prop_.resolution()) return false;
        cand.noalias() = prop_.step(prop_.levels()) * psi;
        psi.swap(cand);
        t += prop_.resolution();
        return true;
    }

    void jump(Vector& psi, double t, std::mt19937_64& rng, JumpRecord& rec) const {
        std::vector<double> w(channels_.size());
        std::vector<Vector> out(channels_.size());
        double total = 0.0;
        for (std::size_t k = 0; k < channels_.size(); ++k) {
            out[k] = channels_[k].op * psi;
            w[k] = channels_[k].rate * out[k].squaredNorm();
            total += w[k];
        }
        if (!(total > 0.0)) throw ConvergenceError("trajectory: norm decayed with no open jump channel");
        const double u = open_uniform(rng) * total;
        std::size_t k = 0;
        double acc = w[0];
        while (acc < u && k + 1 < channels_.size()) acc += w[++k];
        psi = out[k] / out[k].norm();
        if (std::abs(psi.squaredNorm() - 1.0) > 1e-12) throw ConvergenceError("trajectory: renormalization failed");
        guard(psi);
        rec.events.push_back({t, channels_[k].weight});
    }

    int n_max_;
    double overflow_tol_;
    std::vector<JumpChannel> channels_;
    DyadicPropagator<Complex> prop_;
};

} // namespace

long long JumpRecord::net_count(double t) const {
    long long n = 0;
    for (const JumpEvent& e : events) {
        if (e.time > t) break;
        n += e.channel;
    }
    return n;
}

JumpRecord sample_trajectory(const ModelParams& p, const Truncation& trunc, double t_final, std::uint64_t seed,
                             const TrajectoryOptions& opts) {
    p.validate();
    return JumpSampler(p, trunc, opts).run(t_final, seed, opts.snapshot_times);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::vector<JumpRecord> sample_ensemble(const ModelParams& p, const Truncation& trunc, int n_traj, double t_final,
                                        std::uint64_t master_seed, int threads, const TrajectoryOptions& opts) {
    if (n_traj < 1) throw std::invalid_argument("sample_ensemble: n_traj must be >= 1");
    p.validate();
    const JumpSampler sampler(p, trunc, opts);
    std::vector<JumpRecord> records(n_traj);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int i = next++; i < n_traj; i = next++) {
            try {
                records[i] = sampler.run(t_final, trajectory_seed(master_seed, i), opts.snapshot_times);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::max(1, std::min(threads, n_traj));
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return records;
}

EnsembleEstimate estimate_cumulants(const std::vector<JumpRecord>& records, double t_burn, int batches) {
    if (records.size() < 100) throw std::invalid_argument("estimate_cumulants: need at least 100 records");
    if (batches < 2 || records.size() < 2 * std::size_t(batches))
        throw std::invalid_argument("estimate_cumulants: invalid batch count");
    const double t_final = records.front().t_final;
    for (const JumpRecord& r : records)
        if (r.t_final != t_final) throw std::invalid_argument("estimate_cumulants: records differ in t_final");
    if (!(t_burn >= 0.0 && t_burn < 0.5 * t_final))
        throw std::invalid_argument("estimate_cumulants: t_burn must lie in [0, t_final / 2)");

    const double window = t_final - t_burn;
    std::vector<double> inc;
    inc.reserve(records.size());
    for (const JumpRecord& r : records) inc.push_back(double(r.net_count(t_final) - r.net_count(t_burn)));

    EnsembleEstimate est;
    est.n_traj = static_cast<int>(records.size());
    est.t_window = window;
    est.J_hat = mean_of(inc) / window;
    est.D_hat = sample_variance(inc) / window;

    std::vector<double> jb, db;
    const std::size_t n = inc.size();
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = n * b / batches, hi = n * (b + 1) / batches;
        const std::vector<double> part(inc.begin() + lo, inc.begin() + hi);
        jb.push_back(mean_of(part) / window);
        db.push_back(sample_variance(part) / window);
    }
    est.J_stderr = std::sqrt(sample_variance(jb) / batches);
    est.D_stderr = std::sqrt(sample_variance(db) / batches);
    return est;
}

EnsembleEstimate estimate_from_single_record(const JumpRecord& record, double t_burn, int batches) {
    if (batches < 2) throw std::invalid_argument("estimate_from_single_record: need at least 2 batches");
    if (!(t_burn >= 0.0 && t_burn < 0.5 * record.t_final))
        throw std::invalid_argument("estimate_from_single_record: t_burn must lie in [0, t_final / 2)");
    const double total = record.t_final - t_burn;
    const double w = total / batches;
    std::vector<double> counts;
    for (int b = 0; b < batches; ++b) {
        const double lo = t_burn + b * w;
        const double hi = b + 1 == batches ? record.t_final : t_burn + (b + 1) * w;
        counts.push_back(double(record.net_count(hi) - record.net_count(lo)));
    }
    EnsembleEstimate est;
    est.n_traj = 1;
    est.t_window = total;
    est.J_hat = std::accumulate(counts.begin(), counts.end(), 0.0) / total;
    est.D_hat = sample_variance(counts) / w;
    est.J_stderr = std::sqrt(sample_variance(counts) / batches) / w;
    est.D_stderr = est.D_hat * std::sqrt(2.0 / (batches - 1));
    return est;
}

std::vector<double> waiting_times(const JumpRecord& record) {
    std::vector<double> out;
    for (std::size_t i = 1; i < record.events.size(); ++i)
        out.push_back(record.events[i].time - record.events[i - 1].time);
    return out;
}

Matrix ensemble_state(const std::vector<JumpRecord>& records, std::size_t k) {
    if (records.empty()) throw std::invalid_argument("ensemble_state: no records");
    const Eigen::Index d = records.front().snapshots.at(k).size();
    Matrix rho = Matrix::Zero(d, d);
    for (const JumpRecord& r : records) {
        const Vector& psi = r.snapshots.at(k);
        rho.noalias() += psi * psi.adjoint();
    }
    return rho / double(records.size());
}

} // namespace rcfcs
