// rcfcs_cli.cpp: command-line front end for steady states, counting statistics,
// spectra, correlations, trajectories, nonclassicality diagnostics and sweeps

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "rcfcs/correlations.hpp"
#include "rcfcs/fcs.hpp"
#include "rcfcs/model.hpp"
#include "rcfcs/spectral.hpp"
#include "rcfcs/sweep.hpp"
#include "rcfcs/trajectories.hpp"

namespace fs = std::filesystem;
using namespace rcfcs;

namespace {

struct ParamFlag {
    const char* flag;
    const char* name;
    std::optional<double> value;
};

struct Common {
    std::string config;
    std::vector<ParamFlag> params{
        {"--delta-q", "delta_q", {}},     {"--delta-c", "delta_c", {}},
        {"--omega-rabi", "omega_rabi", {}}, {"--lambda", "lambda_coupling", {}},
        {"--alpha", "alpha", {}},         {"--omega-c", "omega_c", {}},
        {"--cutoff", "cutoff", {}},       {"--n-bath", "n_bath", {}},
    };
    std::optional<std::string> model;
    std::optional<std::string> n_max;
    std::optional<double> fd_step;
    std::optional<std::string> affinity;
    std::optional<std::string> cut;
    std::string out;
    std::optional<int> threads;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON run file; flags override its keys")->check(CLI::ExistingFile);
    for (auto& p : c.params) app->add_option(p.flag, p.value, std::string("model parameter ") + p.name);
    app->add_option("--model", c.model, "rc or weak")->check(CLI::IsMember({"rc", "weak"}));
    app->add_option("--n-max", c.n_max, "Fock levels of the reaction coordinate, or auto");
    app->add_option("--fd-step", c.fd_step, "counting-field step of the finite-difference cumulants");
    app->add_option("--affinity", c.affinity, "thermodynamic or paper_literal")
        ->check(CLI::IsMember({"thermodynamic", "paper_literal"}));
    app->add_option("--cut", c.cut, "dissipator or hamiltonian")->check(CLI::IsMember({"dissipator", "hamiltonian"}));
    app->add_option("--out", c.out, "output CSV path (stdout when absent); a JSON sidecar is written next to it");
    app->add_option("--threads", c.threads, "worker threads (default: RCFCS_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
}

int resolve_threads(const Common& c) {
    if (c.threads) return *c.threads;
    if (const char* env = std::getenv("RCFCS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
        throw std::invalid_argument("RCFCS_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Json load_config(const Common& c) {
    if (c.config.empty()) return Json::object();
    std::ifstream in(c.config);
    if (!in) throw std::runtime_error("cannot open " + c.config);
    Json j = Json::parse(in, nullptr, true, true);
    if (!j.is_object()) throw std::invalid_argument(c.config + ": expected a JSON object");
    return j;
}

void apply_overrides(Json& j, const Common& c) {
    for (const auto& p : c.params)
        if (p.value) j["base"][p.name] = *p.value;
    if (c.model) j["model"] = *c.model;
    if (c.n_max) {
        if (*c.n_max == "auto")
            j["n_max"] = "auto";
        else
            j["n_max"] = std::stoi(*c.n_max);
    }
    if (c.fd_step) j["fd_step"] = *c.fd_step;
    if (c.affinity) j["affinity"] = *c.affinity;
    if (c.cut) j["cut"] = *c.cut;
}

// Single-point commands evaluate the base parameters as a one-point sweep over lambda.
// Output settings from the file are moved to `file_outputs`; each command picks what it uses.
Json point_config(const Common& c, Json* file_outputs = nullptr) {
    Json j = load_config(c);
    for (const char* key : {"axis", "grid", "families"})
        if (j.contains(key))
            throw std::invalid_argument(std::string("'") + key + "' belongs to sweep configs; use the sweep command");
    apply_overrides(j, c);
    const ModelParams base = j.contains("base") ? params_from_json(j.at("base")) : ModelParams{};
    j["axis"] = "lambda_coupling";
    j["grid"] = Json::array({base.lambda_coupling});
    if (file_outputs) *file_outputs = j.value("outputs", Json::object());
    j["outputs"] = {{"noise", "none"}};
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_';
    return out;
}

fs::path sibling(const fs::path& out, const std::string& suffix, const std::string& ext) {
    fs::path p = out;
    p.replace_filename(out.stem().string() + suffix + ext);
    return p;
}

void write_sidecar(const fs::path& out, const std::string& command, const Json& config, const Json& extra) {
    Json side;
    side["version"] = RCFCS_VERSION;
    side["timestamp"] = utc_timestamp();
    side["command"] = command;
    side["config"] = config;
    for (const auto& [k, v] : extra.items()) side[k] = v;
    std::ofstream f(sibling(out, "", ".json"));
    f << side.dump(2) << '\n';
}

// Runs the sweep, writes the table, traces and sidecar; returns the process exit code.
int run_and_export(const std::string& command, const SweepSpec& spec, const Common& c) {
    const int threads = resolve_threads(c);
    const std::vector<ResultRow> rows = run_sweep(spec, threads);

    Json files = Json::array();
    if (c.out.empty()) {
        write_csv(std::cout, spec, rows);
    } else {
        const fs::path out(c.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + c.out);
        write_csv(f, spec, rows);
        files.push_back(out.string());
        const std::size_t per = spec.grid.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].trace) continue;
            const fs::path tp = sibling(out, "_trace_" + sanitize(rows[i].family) + "_" + std::to_string(i % per), ".csv");
            std::ofstream tf(tp);
            write_trace_csv(tf, *rows[i].trace);
            files.push_back(tp.string());
        }
    }

    int failed = 0;
    for (const auto& r : rows) {
        if (r.status == "ok") continue;
        ++failed;
        std::cerr << "point " << r.family << " @ " << spec.axis << "=" << format_number(r.axis_value) << ": "
                  << r.status << ": " << r.diagnostic << '\n';
    }
    if (!c.out.empty()) {
        Json extra;
        extra["threads"] = threads;
        extra["rows"] = rows.size();
        extra["failed"] = failed;
        extra["files"] = files;
        write_sidecar(c.out, command, to_json(spec), extra);
    } else if (spec.outputs.correlation && spec.outputs.correlation->write_traces) {
        std::cerr << "note: correlation traces are only written together with --out\n";
    }
    return failed == 0 ? 0 : 1;
}

int cmd_point(const std::string& command, const Common& c,
              const std::function<void(Json&, const Json&)>& outputs) {
    Json file_outputs;
    Json j = point_config(c, &file_outputs);
    if (!j.contains("name")) j["name"] = command;
    outputs(j["outputs"], file_outputs);
    return run_and_export(command, parse_sweep_spec(j), c);
}

struct SpectrumArgs {
    int k{3};
    bool full{false};
};

int cmd_spectrum(const Common& c, const SpectrumArgs& a) {
    Json j = point_config(c);
    j["outputs"]["spectrum_k"] = a.k;
    const SweepSpec spec = parse_sweep_spec(j);
    const int code = run_and_export("spectrum", spec, c);
    if (!a.full) return code;

    const ModelParams& p = spec.base;
    const CountingModel cm = spec.model == ModelKind::weak
                                 ? weak_coupling_counting_model(p)
                                 : rc_counting_model(p, Truncation(spec.n_max ? *spec.n_max
                                                                              : auto_truncate(p, spec.auto_truncation).n_max));
    const std::vector<Complex> ev = full_spectrum(cm.generator);
    std::ostringstream os;
    os << "index,re,im\n";
    for (std::size_t i = 0; i < ev.size(); ++i)
        os << i << ',' << format_number(ev[i].real()) << ',' << format_number(ev[i].imag()) << '\n';
    if (c.out.empty()) {
        std::cout << '\n' << os.str();
    } else {
        std::ofstream f(sibling(c.out, "_spectrum", ".csv"));
        f << os.str();
    }
    return code;
}

struct DensityArgs {
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    std::optional<int> points;
};

// Config keys: name, base, families (label plus parameter overrides), omega {min, max, points}.
int cmd_density(const Common& c, const DensityArgs& a) {
    Json j = load_config(c);
    for (const auto& [key, _] : j.items())
        if (key != "name" && key != "base" && key != "families" && key != "omega")
            throw std::invalid_argument("density: unknown key '" + key + "'");
    apply_overrides(j, c);
    const ModelParams base = j.contains("base") ? params_from_json(j.at("base")) : ModelParams{};
    const Json om = j.value("omega", Json::object());
    const double w0 = a.omega_min.value_or(om.value("min", 0.9));
    const double w1 = a.omega_max.value_or(om.value("max", 1.1));
    const int n = a.points.value_or(om.value("points", 2001));
    if (!(w1 > w0) || n < 2) throw std::invalid_argument("density: invalid frequency grid");

    std::vector<std::pair<std::string, ModelParams>> families;
    for (const Json& f : j.value("families", Json::array())) {
        Json overrides = f;
        const std::string label = overrides.value("label", "family" + std::to_string(families.size()));
        overrides.erase("label");
        families.emplace_back(label, params_from_json(overrides, base));
    }
    if (families.empty()) families.emplace_back("base", base);
    for (const auto& [label, p] : families) p.validate();

    std::ostringstream os;
    os << "family,omega,S_drude_lorentz,S_residual\n";
    for (const auto& [label, p] : families) {
        for (int i = 0; i < n; ++i) {
            const double w = i == n - 1 ? w1 : w0 + (w1 - w0) * double(i) / double(n - 1);
            os << label << ',' << format_number(w) << ',' << format_number(drude_lorentz(w, p)) << ','
               << format_number(ohmic_residual(w, p)) << '\n';
        }
    }
    if (c.out.empty()) {
        std::cout << os.str();
        return 0;
    }
    const fs::path out(c.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    std::ofstream f(out);
    f << os.str();
    Json resolved;
    resolved["base"] = params_to_json(base);
    resolved["families"] = Json::array();
    for (const auto& [label, p] : families) resolved["families"].push_back({{"label", label}, {"params", params_to_json(p)}});
    resolved["omega"] = {{"min", w0}, {"max", w1}, {"points", n}};
    write_sidecar(out, "density", resolved, Json::object());
    return 0;
}

struct VerifyArgs {
    std::vector<double> chi{0.1, 0.3, 0.7, 1.2, 2.0};
    int trajectories{0};
    std::uint64_t seed{1};
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
    Json j = point_config(c);
    const SweepSpec spec = parse_sweep_spec(j);
    if (spec.model != ModelKind::rc) throw std::invalid_argument("verify: needs the rc model");
    const ModelParams& p = spec.base;
    const int threads = resolve_threads(c);
    const int n = spec.n_max ? *spec.n_max : auto_truncate(p, spec.auto_truncation).n_max;
    const Truncation t(n);

    Json report;
    report["n_max"] = n;
    bool ok = true;
    auto line = [&](const std::string& name, bool pass, const std::string& detail) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        report["checks"][name] = {{"passed", pass}, {"detail", detail}};
        ok = ok && pass;
    };

    const EquivalenceReport eq = equivalence_certificate(p, t, a.chi, spec.fd_step, threads);
    line("cut_equivalence", eq.passed,
         "max |theta_H - theta_D| = " + format_number(eq.max_diff) + ", D_H = " + format_number(eq.noise_hcut) +
             ", D_D = " + format_number(eq.noise_dcut));

    const CountingModel cm = rc_counting_model(p, t, spec.cut);
    const SteadyState ss = steady_state(cm.generator);
    const double current = average_current(ss.rho, cm.channels);
    const double activity = dynamical_activity(ss.rho, cm.channels);
    const double d = noise_drazin(cm.generator, ss.rho, cm.channels);
    const FdCumulants fd = fd_cumulants(cm.tilted, spec.fd_step);
    const double rel_fd = std::abs(fd.noise - d) / d;
    line("fd_vs_drazin", rel_fd < 1e-6, "rel diff " + format_number(rel_fd));

    const double horizon = 50.0 / p.gamma();
    const CorrelationTrace tr = correlation_function(cm.generator, ss.rho, cm.channels, default_tau_grid(horizon));
    const double rel_q = std::abs(activity + 2.0 * tr.integral - d) / d;
    line("quadrature", rel_q < 1e-4, "rel diff " + format_number(rel_q));

    if (a.trajectories > 0) {
        const double burn = 50.0 / p.gamma();
        const auto recs = sample_ensemble(p, t, a.trajectories, burn + 500.0 / p.gamma(), a.seed, threads);
        const EnsembleEstimate e = estimate_cumulants(recs, burn);
        const double zj = std::abs(e.J_hat - current) / e.J_stderr;
        const double zd = std::abs(e.D_hat - d) / e.D_stderr;
        line("trajectories", zj < 3.0 && zd < 3.0, "J z-score " + format_number(zj) + ", D z-score " + format_number(zd));
    }

    report["J"] = current;
    report["K"] = activity;
    report["D"] = d;
    report["D_fd"] = fd.noise;
    if (!c.out.empty()) {
        const fs::path out(c.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        Json extra;
        extra["report"] = report;
        extra["threads"] = threads;
        write_sidecar(out, "verify", to_json(spec), extra);
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcfcs: counting statistics of a driven qubit coupled to a reaction-coordinate mode"};
    app.set_version_flag("--version", std::string(RCFCS_VERSION));
    app.require_subcommand(1);

    Common c;
    auto* steady = app.add_subcommand("steady", "steady state, current and activity");
    auto* cumulants = app.add_subcommand("cumulants", "current, noise and the TUR ratio");
    auto* spectrum = app.add_subcommand("spectrum", "leading Liouvillian eigenvalues");
    auto* correlation = app.add_subcommand("correlation", "two-time current correlation function");
    auto* trajectories = app.add_subcommand("trajectories", "quantum-jump estimates of J and D");
    auto* nonclassical = app.add_subcommand("nonclassical", "g2(0), non-Gaussianity and coherence of the mode");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep from a config file");
    auto* verify = app.add_subcommand("verify", "cut equivalence and cross-method noise checks");
    auto* density = app.add_subcommand("density", "spectral densities on a frequency grid");
    for (auto* s : {steady, cumulants, spectrum, correlation, trajectories, nonclassical, sweep, verify, density})
        add_common(s, c);
    sweep->get_option("--config")->required();

    std::string noise = "both";
    bool d_minus_k = false;
    cumulants->add_option("--noise", noise, "drazin, fd or both")->check(CLI::IsMember({"drazin", "fd", "both"}));
    cumulants->add_flag("--d-minus-k", d_minus_k, "add the D - K column");

    SpectrumArgs sa;
    spectrum->add_option("--k", sa.k, "number of nonzero eigenvalues")->check(CLI::NonNegativeNumber);
    spectrum->add_flag("--full", sa.full, "also write the full spectrum");

    std::optional<int> points;
    std::optional<double> horizon;
    correlation->add_option("--points", points, "tau points including tau = 0");
    correlation->add_option("--horizon", horizon, "largest tau in units of 1 / gamma");

    std::optional<int> n_traj;
    std::optional<std::uint64_t> seed;
    std::optional<double> burn_in, window;
    trajectories->add_option("--n", n_traj, "number of trajectories");
    trajectories->add_option("--seed", seed, "master seed");
    trajectories->add_option("--burn-in", burn_in, "discarded transient in units of 1 / gamma");
    trajectories->add_option("--window", window, "counting window in units of 1 / gamma");

    VerifyArgs va;
    verify->add_option("--chi", va.chi, "counting fields for the cut equivalence")->delimiter(',');
    verify->add_option("--trajectories", va.trajectories, "add a trajectory check with this many records");
    verify->add_option("--seed", va.seed, "master seed of the trajectory check");

    DensityArgs da;
    density->add_option("--omega-min", da.omega_min, "lowest frequency (default 0.9)");
    density->add_option("--omega-max", da.omega_max, "highest frequency (default 1.1)");
    density->add_option("--points", da.points, "frequency points (default 2001)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*steady) return cmd_point("steady", c, [](Json&, const Json&) {});
        if (*cumulants)
            return cmd_point("cumulants", c, [&](Json& o, const Json&) {
                o["noise"] = noise;
                o["d_minus_k"] = d_minus_k;
            });
        if (*spectrum) return cmd_spectrum(c, sa);
        if (*correlation)
            return cmd_point("correlation", c, [&](Json& o, const Json& f) {
                Json cj = f.contains("correlation") && f["correlation"].is_object() ? f["correlation"] : Json::object();
                if (!cj.contains("write_traces")) cj["write_traces"] = true;
                if (points) cj["points"] = *points;
                if (horizon) cj["horizon"] = *horizon;
                o["correlation"] = cj;
                o["noise"] = "drazin";
                o["d_minus_k"] = true;
            });
        if (*trajectories)
            return cmd_point("trajectories", c, [&](Json& o, const Json& f) {
                Json tj = f.contains("trajectories") && f["trajectories"].is_object() ? f["trajectories"] : Json::object();
                if (n_traj) tj["n"] = *n_traj;
                if (seed) tj["seed"] = *seed;
                if (burn_in) tj["burn_in"] = *burn_in;
                if (window) tj["window"] = *window;
                o["trajectories"] = tj;
                o["noise"] = "drazin";
            });
        if (*nonclassical) return cmd_point("nonclassical", c, [](Json& o, const Json&) { o["nonclassicality"] = true; });
        if (*sweep) {
            Json j = load_config(c);
            apply_overrides(j, c);
            return run_and_export("sweep", parse_sweep_spec(j), c);
        }
        if (*verify) return cmd_verify(c, va);
        if (*density) return cmd_density(c, da);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
