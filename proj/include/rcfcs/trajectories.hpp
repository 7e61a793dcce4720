// trajectories.hpp: quantum-jump unraveling of the RC master equation
//
// Pure states evolve under H_eff = H - (i/2) sum_k L_k^+ L_k with exact exponential
// steps; a jump fires when the squared norm falls to a uniform threshold r, the jump
// time being located by binary descent on a dyadic table of step propagators.

#pragma once

#include <cstdint>
#include <vector>

#include "rcfcs/liouville.hpp"

namespace rcfcs {

struct JumpEvent {
    double time;
    int channel; // +1 emission into the residual bath, -1 absorption from it
};

struct JumpRecord {
    std::uint64_t seed{0};
    double t_final{0};
    std::vector<JumpEvent> events;
    std::vector<Vector> snapshots; // normalized conditional states at the requested times

    // Net count N(t) = emissions - absorptions up to and including t.
    long long net_count(double t) const;
};

struct TrajectoryOptions {
    double base_step{0.0};      // 0 selects 0.25 / gamma
    int levels{40};             // jump times resolved to base_step / 2^levels
    double overflow_tol{1e-6};  // top Fock population allowed before TruncationOverflow
    std::vector<double> snapshot_times;
};

JumpRecord sample_trajectory(const ModelParams& p, const Truncation& trunc, double t_final,
                             std::uint64_t seed, const TrajectoryOptions& opts = {});

// Trajectory i uses seed trajectory_seed(master_seed, i); records come back in index order.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);
std::vector<JumpRecord> sample_ensemble(const ModelParams& p, const Truncation& trunc, int n_traj,
                                        double t_final, std::uint64_t master_seed, int threads = 1,
                                        const TrajectoryOptions& opts = {});

struct EnsembleEstimate {
    int n_traj{0};
    double J_hat{0};
    double J_stderr{0};
    double D_hat{0};
    double D_stderr{0};
    double t_window{0};
};

// Increments N(t_final) - N(t_burn) across records; errors from `batches` contiguous batches.
EnsembleEstimate estimate_cumulants(const std::vector<JumpRecord>& records, double t_burn, int batches = 20);

// One long record cut into `batches` windows after t_burn.
EnsembleEstimate estimate_from_single_record(const JumpRecord& record, double t_burn, int batches = 20);

// Delays between successive clicks of any channel.
std::vector<double> waiting_times(const JumpRecord& record);

// Ensemble average of |psi><psi| at snapshot index k.
Matrix ensemble_state(const std::vector<JumpRecord>& records, std::size_t k);

} // namespace rcfcs
