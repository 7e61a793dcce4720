// sweep.hpp: parameter sweeps, truncation search and table export
//
// A sweep evaluates every (family, grid value) pair on a worker pool and returns the
// rows in family-major, grid order. Per-point failures are recorded in the row.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rcfcs/correlations.hpp"
#include "rcfcs/fcs.hpp"
#include "rcfcs/model.hpp"

namespace rcfcs {

using Json = nlohmann::ordered_json;

enum class ModelKind { rc, weak };
enum class NoiseSelect { none, drazin, fd, both };

const char* to_string(ModelKind k);

// Parameter access by name: delta_q, delta_c, omega_rabi, lambda_coupling, alpha,
// omega_c, cutoff, n_bath. Unknown names throw std::invalid_argument.
void set_param(ModelParams& p, const std::string& name, double value);
double get_param(const ModelParams& p, const std::string& name);
const std::vector<std::string>& param_names();

Json params_to_json(const ModelParams& p);
ModelParams params_from_json(const Json& j, ModelParams base = {});

struct AutoTruncateOptions {
    int start{8};
    int step{4};
    int cap{40};
    double population_tol{1e-8}; // summed population of the two highest Fock levels
    double current_tol{1e-8};    // relative change of J under n_max -> n_max + step
};

struct AutoTruncation {
    int n_max{0};
    double current{0};
    double current_next{0};
    double top_population{0};
};

// Throws ConvergenceError when the cap is reached without convergence.
AutoTruncation auto_truncate(const ModelParams& p, const AutoTruncateOptions& opts = {});

struct CorrelationSpec {
    int points{400};
    double horizon{50.0}; // in units of 1 / gamma
    bool write_traces{false};
};

struct TrajectorySpec {
    int n{200};
    std::uint64_t seed{1};
    double burn_in{50.0};  // in units of 1 / gamma
    double window{500.0};  // in units of 1 / gamma
};

struct OutputSpec {
    bool current{true};
    NoiseSelect noise{NoiseSelect::drazin};
    bool d_minus_k{false};
    int spectrum_k{0};
    std::optional<CorrelationSpec> correlation;
    bool nonclassicality{false};
    std::optional<TrajectorySpec> trajectories;
};

struct Family {
    std::string label;
    ModelKind model{ModelKind::rc};
    Json overrides = Json::object();
};

struct SweepSpec {
    std::string name{"sweep"};
    ModelParams base{};
    ModelKind model{ModelKind::rc};
    std::string axis{"lambda_coupling"};
    std::vector<double> grid;
    std::vector<Family> families; // empty means a single family built from base
    OutputSpec outputs{};
    std::optional<int> n_max;     // absent selects auto_truncate per point
    AutoTruncateOptions auto_truncation{};
    double fd_step{1e-3};
    AffinityConvention affinity{AffinityConvention::thermodynamic};
    CountingCut cut{CountingCut::dissipator};

    void validate() const;
    std::vector<Family> resolved_families() const;
};

SweepSpec parse_sweep_spec(const Json& j);
Json to_json(const SweepSpec& spec);

struct ResultRow {
    std::string family;
    ModelKind model{ModelKind::rc};
    double axis_value{0};
    ModelParams params{};
    std::map<std::string, double> values; // missing keys export as empty cells
    std::string status{"ok"};             // ok | error | invariant_violation
    std::string diagnostic;
    std::optional<CorrelationTrace> trace;

    std::optional<double> get(const std::string& key) const;
};

std::vector<std::string> sweep_columns(const SweepSpec& spec);

// Trajectory ensembles inside the point run on inner_threads workers.
ResultRow evaluate_point(const SweepSpec& spec, const Family& family, double axis_value, int inner_threads = 1);

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int threads = 1);

// Round-trip exact formatting used by every exported number.
std::string format_number(double x);

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& os, const CorrelationTrace& trace);

} // namespace rcfcs
