#include "rcfcs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <set>
#include <thread>

#include "rcfcs/nonclassical.hpp"
#include "rcfcs/spectral.hpp"
#include "rcfcs/trajectories.hpp"

namespace rcfcs {

const char* to_string(ModelKind k) { return k == ModelKind::rc ? "rc" : "weak"; }

namespace {

struct ParamField {
    const char* name;
    double ModelParams::*field;
};

constexpr ParamField kFields[] = {
    {"delta_q", &ModelParams::delta_q},     {"delta_c", &ModelParams::delta_c},
    {"omega_rabi", &ModelParams::omega_rabi}, {"lambda_coupling", &ModelParams::lambda_coupling},
    {"alpha", &ModelParams::alpha},         {"omega_c", &ModelParams::omega_c},
    {"cutoff", &ModelParams::cutoff},       {"n_bath", &ModelParams::n_bath},
};

double ModelParams::*field_of(const std::string& name) {
    for (const auto& f : kFields)
        if (name == f.name) return f.field;
    throw std::invalid_argument("unknown parameter '" + name + "'");
}

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

ModelKind model_kind(const std::string& s) {
    if (s == "rc") return ModelKind::rc;
    if (s == "weak") return ModelKind::weak;
    throw std::invalid_argument("unknown model '" + s + "' (expected rc or weak)");
}

NoiseSelect noise_select(const Json& j) {
    if (j.is_boolean()) return j.get<bool>() ? NoiseSelect::drazin : NoiseSelect::none;
    const auto s = j.get<std::string>();
    if (s == "none") return NoiseSelect::none;
    if (s == "drazin") return NoiseSelect::drazin;
    if (s == "fd") return NoiseSelect::fd;
    if (s == "both") return NoiseSelect::both;
    throw std::invalid_argument("unknown noise method '" + s + "'");
}

const char* to_string(NoiseSelect n) {
    switch (n) {
    case NoiseSelect::none: return "none";
    case NoiseSelect::drazin: return "drazin";
    case NoiseSelect::fd: return "fd";
    case NoiseSelect::both: return "both";
    }
    return "?";
}

std::vector<double> parse_grid(const Json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    require_keys(j, {"start", "stop", "num", "spacing"}, "grid");
    const double a = j.at("start").get<double>();
    const double b = j.at("stop").get<double>();
    const int n = j.at("num").get<int>();
    const std::string spacing = j.value("spacing", std::string("linear"));
    if (n < 1) throw std::invalid_argument("grid: num must be >= 1");
    if (spacing != "linear" && spacing != "log") throw std::invalid_argument("grid: spacing must be linear or log");
    if (spacing == "log" && !(a > 0.0 && b > 0.0)) throw std::invalid_argument("grid: log spacing needs positive ends");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : double(i) / double(n - 1);
        g[i] = spacing == "log" ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    if (n > 1) g.back() = b;
    return g;
}

double effective_rate(const ModelParams& p, ModelKind kind) {
    return kind == ModelKind::rc ? p.gamma() : weak_coupling_rate(p);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

} // namespace

const std::vector<std::string>& param_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : kFields) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

void set_param(ModelParams& p, const std::string& name, double value) { p.*field_of(name) = value; }

double get_param(const ModelParams& p, const std::string& name) { return p.*field_of(name); }

Json params_to_json(const ModelParams& p) {
    Json j = Json::object();
    for (const auto& f : kFields) j[f.name] = p.*f.field;
    return j;
}

ModelParams params_from_json(const Json& j, ModelParams base) {
    if (!j.is_object()) throw std::invalid_argument("params: expected an object");
    for (const auto& [key, value] : j.items()) set_param(base, key, value.get<double>());
    return base;
}

AutoTruncation auto_truncate(const ModelParams& p, const AutoTruncateOptions& opts) {
    p.validate();
    if (opts.start < 2 || opts.step < 1 || opts.cap < opts.start)
        throw std::invalid_argument("auto_truncate: invalid search range");
    SteadyStateOptions sso;
    sso.method = SteadyStateMethod::sparse_lu;

    struct Probe {
        double current;
        double top;
    };
    auto probe = [&](int n) {
        const Truncation trunc(n);
        const SteadyState ss = steady_state(rc_lme_generator(p, trunc), sso);
        const RcState rc = reduce_rc(ss.rho);
        const double top = std::abs(rc.rho_rc(n - 1, n - 1).real()) + std::abs(rc.rho_rc(n - 2, n - 2).real());
        return Probe{average_current(ss.rho, rc_channels(p, trunc)), top};
    };

    Probe cur = probe(opts.start);
    for (int n = opts.start; n <= opts.cap; n += opts.step) {
        const Probe next = probe(n + opts.step);
        const double change = std::abs(next.current - cur.current);
        const bool current_ok = change <= opts.current_tol * std::abs(next.current) || change == 0.0;
        if (cur.top < opts.population_tol && current_ok) return {n, cur.current, next.current, cur.top};
        cur = next;
    }
    throw ConvergenceError("auto_truncate: no convergence up to n_max = " + std::to_string(opts.cap));
}

void SweepSpec::validate() const {
    base.validate();
    field_of(axis);
    if (grid.empty()) throw std::invalid_argument("sweep: grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sweep: grid must be strictly increasing");
    if (n_max && *n_max < 2) throw std::invalid_argument("sweep: n_max must be >= 2");
    if (!(fd_step >= 1e-4 && fd_step <= 1e-2)) throw std::invalid_argument("sweep: fd_step must lie in [1e-4, 1e-2]");
    if (outputs.spectrum_k < 0) throw std::invalid_argument("sweep: spectrum_k must be >= 0");
    if (outputs.correlation && (outputs.correlation->points < 2 || !(outputs.correlation->horizon > 0.0)))
        throw std::invalid_argument("sweep: invalid correlation settings");
    if (outputs.trajectories && outputs.trajectories->n < 100)
        throw std::invalid_argument("sweep: trajectories.n must be >= 100");
    std::set<std::string> labels;
    for (const Family& f : resolved_families())
        if (!labels.insert(f.label).second) throw std::invalid_argument("sweep: duplicate family label '" + f.label + "'");
}

std::vector<Family> SweepSpec::resolved_families() const {
    if (families.empty()) return {Family{"base", model, Json::object()}};
    return families;
}

SweepSpec parse_sweep_spec(const Json& j) {
    require_keys(j, {"name", "model", "base", "axis", "grid", "families", "outputs", "n_max", "auto_truncation",
                     "fd_step", "affinity", "cut"},
                 "sweep");
    SweepSpec s;
    s.name = j.value("name", s.name);
    if (j.contains("model")) s.model = model_kind(j.at("model").get<std::string>());
    if (j.contains("base")) s.base = params_from_json(j.at("base"));
    s.axis = j.value("axis", s.axis);
    s.grid = parse_grid(j.at("grid"));

    if (j.contains("families")) {
        for (const Json& f : j.at("families")) {
            if (!f.is_object()) throw std::invalid_argument("families: expected objects");
            Family fam;
            fam.model = f.contains("model") ? model_kind(f.at("model").get<std::string>()) : s.model;
            std::string label;
            for (const auto& [key, value] : f.items()) {
                if (key == "label" || key == "model") continue;
                field_of(key);
                fam.overrides[key] = value.get<double>();
                label += (label.empty() ? "" : ";") + key + "=" + format_number(value.get<double>());
            }
            fam.label = f.value("label", label.empty() ? std::string(to_string(fam.model)) : label);
            s.families.push_back(std::move(fam));
        }
    }

    if (j.contains("outputs")) {
        const Json& o = j.at("outputs");
        require_keys(o, {"current", "noise", "d_minus_k", "spectrum_k", "correlation", "nonclassicality", "trajectories"},
                     "outputs");
        s.outputs.current = o.value("current", true);
        if (o.contains("noise")) s.outputs.noise = noise_select(o.at("noise"));
        s.outputs.d_minus_k = o.value("d_minus_k", false);
        s.outputs.spectrum_k = o.value("spectrum_k", 0);
        s.outputs.nonclassicality = o.value("nonclassicality", false);
        if (o.contains("correlation") && !o.at("correlation").is_null() && o.at("correlation") != false) {
            const Json& c = o.at("correlation");
            CorrelationSpec cs;
            if (c.is_object()) {
                require_keys(c, {"points", "horizon", "write_traces"}, "outputs.correlation");
                cs.points = c.value("points", cs.points);
                cs.horizon = c.value("horizon", cs.horizon);
                cs.write_traces = c.value("write_traces", cs.write_traces);
            }
            s.outputs.correlation = cs;
        }
        if (o.contains("trajectories") && o.at("trajectories").is_object()) {
            const Json& t = o.at("trajectories");
            require_keys(t, {"n", "seed", "burn_in", "window"}, "outputs.trajectories");
            TrajectorySpec ts;
            ts.n = t.value("n", ts.n);
            ts.seed = t.value("seed", ts.seed);
            ts.burn_in = t.value("burn_in", ts.burn_in);
            ts.window = t.value("window", ts.window);
            s.outputs.trajectories = ts;
        }
    }

    if (j.contains("n_max")) {
        const Json& n = j.at("n_max");
        if (n.is_string()) {
            if (n.get<std::string>() != "auto") throw std::invalid_argument("n_max: expected an integer or \"auto\"");
        } else {
            s.n_max = n.get<int>();
        }
    }
    if (j.contains("auto_truncation")) {
        const Json& a = j.at("auto_truncation");
        require_keys(a, {"start", "step", "cap", "population_tol", "current_tol"}, "auto_truncation");
        s.auto_truncation.start = a.value("start", s.auto_truncation.start);
        s.auto_truncation.step = a.value("step", s.auto_truncation.step);
        s.auto_truncation.cap = a.value("cap", s.auto_truncation.cap);
        s.auto_truncation.population_tol = a.value("population_tol", s.auto_truncation.population_tol);
        s.auto_truncation.current_tol = a.value("current_tol", s.auto_truncation.current_tol);
    }
    s.fd_step = j.value("fd_step", s.fd_step);
    if (j.contains("affinity")) {
        const auto a = j.at("affinity").get<std::string>();
        if (a == "thermodynamic")
            s.affinity = AffinityConvention::thermodynamic;
        else if (a == "paper_literal")
            s.affinity = AffinityConvention::paper_literal;
        else
            throw std::invalid_argument("affinity: expected thermodynamic or paper_literal");
    }
    if (j.contains("cut")) {
        const auto c = j.at("cut").get<std::string>();
        if (c == "dissipator")
            s.cut = CountingCut::dissipator;
        else if (c == "hamiltonian")
            s.cut = CountingCut::hamiltonian;
        else
            throw std::invalid_argument("cut: expected dissipator or hamiltonian");
    }
    s.validate();
    return s;
}

Json to_json(const SweepSpec& s) {
    Json j;
    j["name"] = s.name;
    j["model"] = to_string(s.model);
    j["base"] = params_to_json(s.base);
    j["axis"] = s.axis;
    j["grid"] = s.grid;
    Json fams = Json::array();
    for (const Family& f : s.resolved_families()) {
        Json fj = f.overrides;
        fj["label"] = f.label;
        fj["model"] = to_string(f.model);
        fams.push_back(fj);
    }
    j["families"] = fams;
    Json o;
    o["current"] = s.outputs.current;
    o["noise"] = to_string(s.outputs.noise);
    o["d_minus_k"] = s.outputs.d_minus_k;
    o["spectrum_k"] = s.outputs.spectrum_k;
    o["nonclassicality"] = s.outputs.nonclassicality;
    if (s.outputs.correlation)
        o["correlation"] = {{"points", s.outputs.correlation->points},
                            {"horizon", s.outputs.correlation->horizon},
                            {"write_traces", s.outputs.correlation->write_traces}};
    if (s.outputs.trajectories)
        o["trajectories"] = {{"n", s.outputs.trajectories->n},
                             {"seed", s.outputs.trajectories->seed},
                             {"burn_in", s.outputs.trajectories->burn_in},
                             {"window", s.outputs.trajectories->window}};
    j["outputs"] = o;
    if (s.n_max)
        j["n_max"] = *s.n_max;
    else
        j["n_max"] = "auto";
    j["auto_truncation"] = {{"start", s.auto_truncation.start},
                            {"step", s.auto_truncation.step},
                            {"cap", s.auto_truncation.cap},
                            {"population_tol", s.auto_truncation.population_tol},
                            {"current_tol", s.auto_truncation.current_tol}};
    j["fd_step"] = s.fd_step;
    j["affinity"] = to_string(s.affinity);
    j["cut"] = to_string(s.cut);
    return j;
}

std::optional<double> ResultRow::get(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> sweep_columns(const SweepSpec& spec) {
    std::vector<std::string> cols{"family", "model", "axis_value"};
    for (const auto& n : param_names()) cols.push_back(n);
    cols.insert(cols.end(), {"gamma", "n_max"});
    const OutputSpec& o = spec.outputs;
    if (o.current) cols.insert(cols.end(), {"J", "K", "entropy_rate"});
    if (o.noise != NoiseSelect::none) cols.insert(cols.end(), {"D", "snr", "D_over_J2", "Q"});
    if (o.noise == NoiseSelect::both) cols.insert(cols.end(), {"D_fd", "D_fd_rel_diff"});
    if (o.d_minus_k) cols.push_back("D_minus_K");
    for (int k = 1; k <= o.spectrum_k; ++k) cols.push_back("re_theta" + std::to_string(k));
    for (int k = 1; k <= o.spectrum_k; ++k) cols.push_back("im_theta" + std::to_string(k));
    if (o.correlation) cols.insert(cols.end(), {"C0", "C_integral", "C_tail_bound", "C_period", "quadrature_rel_diff"});
    if (o.nonclassicality) cols.insert(cols.end(), {"g2_zero", "delta_G", "nu", "l1_coherence"});
    if (o.trajectories) cols.insert(cols.end(), {"J_hat", "J_stderr", "D_hat", "D_stderr"});
    cols.insert(cols.end(), {"top_population", "ss_residual", "ss_min_eigenvalue", "status", "diagnostic"});
    return cols;
}

ResultRow evaluate_point(const SweepSpec& spec, const Family& family, double axis_value, int inner_threads) {
    ResultRow row;
    row.family = family.label;
    row.model = family.model;
    row.axis_value = axis_value;
    row.params = params_from_json(family.overrides, spec.base);
    set_param(row.params, spec.axis, axis_value);
    const ModelParams& p = row.params;
    const OutputSpec& o = spec.outputs;
    auto& v = row.values;
    std::vector<std::string> issues;

    try {
        p.validate();
        const bool rc = family.model == ModelKind::rc;
        v["gamma"] = effective_rate(p, family.model);

        std::optional<Truncation> trunc;
        if (rc) {
            const int n = spec.n_max ? *spec.n_max : auto_truncate(p, spec.auto_truncation).n_max;
            trunc.emplace(n);
            v["n_max"] = n;
        }
        const CountingModel cm = rc ? rc_counting_model(p, *trunc, spec.cut) : weak_coupling_counting_model(p);
        const SteadyState ss = steady_state(cm.generator);
        v["ss_residual"] = ss.residual_norm;
        v["ss_min_eigenvalue"] = ss.min_eigenvalue;
        if (ss.min_eigenvalue < -1e-8) issues.push_back("steady state not positive");

        const double current = average_current(ss.rho, cm.channels);
        const double activity = dynamical_activity(ss.rho, cm.channels);
        if (o.current) {
            v["J"] = current;
            v["K"] = activity;
            v["entropy_rate"] = entropy_production(current, p.n_bath, spec.affinity);
        }
        if (activity < std::abs(current) - 1e-12 * std::max(1.0, activity)) issues.push_back("K < |J|");

        std::optional<DrazinSolver> solver;
        auto drazin = [&]() -> const DrazinSolver& {
            if (!solver) solver.emplace(cm.generator, ss.rho);
            return *solver;
        };

        std::optional<double> noise;
        if (o.noise != NoiseSelect::none) {
            std::optional<double> d_fd;
            if (o.noise == NoiseSelect::fd || o.noise == NoiseSelect::both) {
                const FdCumulants fd = fd_cumulants(cm.tilted, spec.fd_step);
                d_fd = fd.noise;
                for (const auto& w : fd.warnings) issues.push_back("fd: " + w);
            }
            const NoiseMethod method = o.noise == NoiseSelect::fd ? NoiseMethod::fd_cgf : NoiseMethod::drazin;
            noise = method == NoiseMethod::fd_cgf ? *d_fd : noise_drazin(drazin(), ss.rho, cm.channels);
            const FcsResult r = finish_fcs(current, activity, *noise, method, p.n_bath, spec.affinity);
            v["D"] = r.noise_D;
            v["snr"] = r.snr;
            if (!current_negligible(current, activity)) v["D_over_J2"] = r.noise_D / (current * current);
            if (r.tur_Q) v["Q"] = *r.tur_Q;
            if (o.noise == NoiseSelect::both) {
                v["D_fd"] = *d_fd;
                v["D_fd_rel_diff"] = std::abs(*d_fd - *noise) / std::max(std::abs(*noise), 1e-300);
            }
            if (*noise < -1e-12 * activity) issues.push_back("D < 0");
        }

        if (o.d_minus_k) {
            const double dk = noise_drazin(drazin(), ss.rho, cm.channels) - activity;
            v["D_minus_K"] = dk;
        }

        if (o.spectrum_k > 0) {
            const SpectrumSlice sl = spectrum_top(cm.generator, o.spectrum_k);
            for (int k = 1; k <= o.spectrum_k && k < sl.count; ++k) {
                v["re_theta" + std::to_string(k)] = sl.eigenvalues[k].real();
                v["im_theta" + std::to_string(k)] = sl.eigenvalues[k].imag();
            }
        }

        if (o.correlation) {
            const double horizon = o.correlation->horizon / effective_rate(p, family.model);
            const auto taus = default_tau_grid(horizon, o.correlation->points);
            CorrelationTrace tr = correlation_function(cm.generator, ss.rho, cm.channels, taus);
            v["C0"] = tr.values.front();
            v["C_integral"] = tr.integral;
            v["C_tail_bound"] = tr.tail_bound;
            if (const auto period = oscillation_period(tr)) v["C_period"] = *period;
            const double d_ref = noise ? *noise : noise_drazin(drazin(), ss.rho, cm.channels);
            v["quadrature_rel_diff"] = std::abs(activity + 2.0 * tr.integral - d_ref) / std::max(std::abs(d_ref), 1e-300);
            if (o.correlation->write_traces) row.trace = std::move(tr);
        }

        if (rc) {
            const RcState rcs = reduce_rc(ss.rho);
            v["top_population"] = rcs.top_population;
            if (o.nonclassicality) {
                const NonclassicalityReport rep = analyze_rc(ss.rho);
                if (rep.g2_zero) v["g2_zero"] = *rep.g2_zero;
                v["delta_G"] = rep.delta_G;
                v["nu"] = rep.nu;
                v["l1_coherence"] = rep.l1_coherence;
                if (rep.delta_G < -1e-10) issues.push_back("delta_G < 0");
            }
            if (o.trajectories) {
                const TrajectorySpec& ts = *o.trajectories;
                const double g = p.gamma();
                const double t_burn = ts.burn_in / g;
                const auto records =
                    sample_ensemble(p, *trunc, ts.n, t_burn + ts.window / g, ts.seed, inner_threads);
                const EnsembleEstimate est = estimate_cumulants(records, t_burn);
                v["J_hat"] = est.J_hat;
                v["J_stderr"] = est.J_stderr;
                v["D_hat"] = est.D_hat;
                v["D_stderr"] = est.D_stderr;
            }
        } else if (o.nonclassicality || o.trajectories) {
            issues.push_back("nonclassicality and trajectories need the rc model");
        }
    } catch (const std::exception& e) {
        row.status = "error";
        row.diagnostic = e.what();
        return row;
    }

    if (!issues.empty()) {
        const bool only_notes = std::all_of(issues.begin(), issues.end(), [](const std::string& s) {
            return s.rfind("fd: ", 0) == 0 || s.rfind("nonclassicality", 0) == 0;
        });
        row.status = only_notes ? "ok" : "invariant_violation";
        for (std::size_t i = 0; i < issues.size(); ++i) row.diagnostic += (i ? "; " : "") + issues[i];
    }
    return row;
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();
    const auto families = spec.resolved_families();
    const std::size_t per = spec.grid.size();
    const std::size_t total = families.size() * per;
    std::vector<ResultRow> rows(total);
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, static_cast<int>(std::min<std::size_t>(std::max(threads, 1), total)));
    const int inner = std::max(1, threads / workers);
    auto work = [&] {
        for (std::size_t i = next++; i < total; i = next++)
            rows[i] = evaluate_point(spec, families[i / per], spec.grid[i % per], inner);
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<ResultRow>& rows) {
    const auto cols = sweep_columns(spec);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const ResultRow& r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) os << ',';
            const std::string& c = cols[i];
            if (c == "family")
                os << csv_escape(r.family);
            else if (c == "model")
                os << to_string(r.model);
            else if (c == "axis_value")
                os << format_number(r.axis_value);
            else if (c == "status")
                os << r.status;
            else if (c == "diagnostic")
                os << csv_escape(r.diagnostic);
            else if (const auto val = r.get(c))
                os << format_number(*val);
            else if (std::find(param_names().begin(), param_names().end(), c) != param_names().end())
                os << format_number(get_param(r.params, c));
        }
        os << '\n';
    }
}

void write_trace_csv(std::ostream& os, const CorrelationTrace& trace) {
    os << "tau,C\n";
    for (std::size_t i = 0; i < trace.taus.size(); ++i)
        os << format_number(trace.taus[i]) << ',' << format_number(trace.values[i]) << '\n';
}

} // namespace rcfcs
