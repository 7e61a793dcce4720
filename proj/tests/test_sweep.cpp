#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcfcs/nonclassical.hpp"
#include "rcfcs/spectral.hpp"
#include "rcfcs/sweep.hpp"

using namespace rcfcs;

namespace {

Json small_spec() {
    return Json::parse(R"({
        "name": "unit",
        "base": {"omega_rabi": 0.005, "n_bath": 0.01, "alpha": 0.04},
        "axis": "lambda_coupling",
        "grid": {"start": 0.01, "stop": 0.05, "num": 3},
        "families": [{"label": "rc"}, {"label": "flat", "alpha": 1.0, "model": "weak"}],
        "outputs": {"noise": "both", "d_minus_k": true, "spectrum_k": 2, "nonclassicality": true},
        "n_max": 8
    })");
}

std::string csv_of(const SweepSpec& s, const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_csv(os, s, rows);
    return os.str();
}

} // namespace

TEST_SUITE("sweep") {

TEST_CASE("parameter access by name") {
    ModelParams p;
    set_param(p, "lambda_coupling", 0.07);
    CHECK(p.lambda_coupling == 0.07);
    CHECK(get_param(p, "n_bath") == 0.01);
    CHECK_THROWS_AS(set_param(p, "lambda", 1.0), std::invalid_argument);
    CHECK(params_from_json(params_to_json(p)) == p);
}

TEST_CASE("spec parsing") {
    const SweepSpec s = parse_sweep_spec(small_spec());
    CHECK(s.grid.size() == 3);
    CHECK(s.grid[1] == doctest::Approx(0.03));
    CHECK(s.grid.back() == 0.05);
    CHECK(s.families.size() == 2);
    CHECK(s.families[1].model == ModelKind::weak);
    CHECK(s.outputs.noise == NoiseSelect::both);
    CHECK(s.n_max.value() == 8);
    CHECK(parse_sweep_spec(to_json(s)).grid == s.grid);

    Json bad = small_spec();
    bad["grdi"] = 1;
    CHECK_THROWS_AS(parse_sweep_spec(bad), std::invalid_argument);
    bad = small_spec();
    bad["grid"] = Json::array({0.02, 0.01});
    CHECK_THROWS_AS(parse_sweep_spec(bad), std::invalid_argument);
    bad = small_spec();
    bad["axis"] = "temperature";
    CHECK_THROWS_AS(parse_sweep_spec(bad), std::invalid_argument);
    bad = small_spec();
    bad["families"][0]["lambda"] = 0.1;
    CHECK_THROWS_AS(parse_sweep_spec(bad), std::invalid_argument);

    Json autospec = small_spec();
    autospec["n_max"] = "auto";
    CHECK_FALSE(parse_sweep_spec(autospec).n_max.has_value());
}

TEST_CASE("sweep rows, invariants and determinism") {
    const SweepSpec s = parse_sweep_spec(small_spec());
    const auto rows = run_sweep(s, 1);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].status == "ok");
        CHECK(rows[i].axis_value == s.grid[i % 3]);
        CHECK(rows[i].family == (i < 3 ? "rc" : "flat"));
        const double j = rows[i].get("J").value(), k = rows[i].get("K").value(), d = rows[i].get("D").value();
        CHECK(k >= std::abs(j));
        CHECK(d > 0.0);
        CHECK(rows[i].get("D_fd_rel_diff").value() < 1e-6);
    }
    CHECK(rows[0].get("delta_G").value() >= 0.0);
    CHECK(rows[0].get("nu").value() >= 1.0 - 1e-8);
    CHECK_FALSE(rows[3].get("g2_zero").has_value());

    const std::string a = csv_of(s, rows);
    const std::string b = csv_of(s, run_sweep(s, 3));
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')).find("family,model,axis_value") == 0);
}

TEST_CASE("single-point sweep equals direct module calls") {
    Json j = small_spec();
    j["grid"] = Json::array({0.03});
    j.erase("families");
    const SweepSpec s = parse_sweep_spec(j);
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 1);

    ModelParams p;
    p.lambda_coupling = 0.03;
    const Truncation t(8);
    const Generator g = rc_lme_generator(p, t);
    const SteadyState ss = steady_state(g);
    const auto ch = rc_channels(p, t);
    CHECK(rows[0].get("J").value() == average_current(ss.rho, ch));
    CHECK(rows[0].get("D").value() == noise_drazin(g, ss.rho, ch));
    CHECK(rows[0].get("g2_zero").value() == analyze_rc(ss.rho).g2_zero.value());
    CHECK(rows[0].get("re_theta1").value() == spectrum_top(g, 2).eigenvalues[1].real());
}

TEST_CASE("per-point failures do not abort the sweep") {
    Json j = small_spec();
    j["base"]["omega_rabi"] = 0.0;
    j["grid"] = Json::array({0.0, 0.03});
    j.erase("families");
    const SweepSpec s = parse_sweep_spec(j);
    const auto rows = run_sweep(s);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "error");
    CHECK_FALSE(rows[0].diagnostic.empty());
    INFO(rows[1].diagnostic);
    CHECK(rows[1].status == "ok");
    CHECK(rows[1].get("J").value() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(rows[1].get("Q").has_value());
}

TEST_CASE("automatic truncation") {
    ModelParams p;
    const AutoTruncation a = auto_truncate(p);
    CHECK(a.n_max >= 8);
    CHECK(a.n_max < 40);
    CHECK(a.top_population < 1e-8);
    CHECK(std::abs(a.current_next - a.current) < 1e-8 * std::abs(a.current_next));

    ModelParams hot = p;
    hot.n_bath = 1.0;
    CHECK(auto_truncate(hot).n_max > a.n_max);

    AutoTruncateOptions tight;
    tight.cap = 12;
    ModelParams very_hot = p;
    very_hot.n_bath = 20.0;
    CHECK_THROWS_AS(auto_truncate(very_hot, tight), ConvergenceError);
}

TEST_CASE("shipped sweep configs parse") {
    int parsed = 0;
    for (const auto& entry : std::filesystem::directory_iterator(RCFCS_CONFIG_DIR)) {
        if (entry.path().extension() != ".json" || entry.path().stem() == "spectral_densities") continue;
        std::ifstream in(entry.path());
        const SweepSpec s = parse_sweep_spec(Json::parse(in));
        CHECK(s.grid.size() == 40);
        CHECK(s.grid.front() == 0.005);
        CHECK(s.grid.back() == 0.1);
        CHECK_FALSE(s.n_max.has_value());
        ++parsed;
    }
    CHECK(parsed == 5);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_number(x)) == x);
    CHECK(format_number(0.5) == "0.5");
}

}
