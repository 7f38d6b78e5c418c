#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dfs/io.hpp"

using namespace dfs;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("dfs_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

Json minimal_config() {
    return Json{{"seed", 7},
                {"trajectories", 100},
                {"sequence", Json{{"tau_s", 100.0}, {"times_s", {0.0, 200.0}}}}};
}

}  // namespace

TEST_CASE("config parsing fills defaults and honors overrides") {
    Json j = minimal_config();
    j["noise"] = Json{{"hopping_rate_hz", 1e-3}, {"t_phi_s", 900.0}};
    j["engine"] = "phase_only";
    j["initial_state"] = "rho_p";
    j["curve_mode"] = "expectation";
    const RunConfig cfg = parse_run_config(j, "simulate");
    CHECK(cfg.seed == 7);
    CHECK(cfg.trajectories == 100);
    CHECK(cfg.noise.hopping.rate == doctest::Approx(1e-3));
    REQUIRE(cfg.noise.t_phi_override.has_value());
    CHECK(*cfg.noise.t_phi_override == doctest::Approx(900.0));
    CHECK(cfg.noise.engine == EngineKind::PhaseOnly);
    CHECK(cfg.initial_state == InitialState::RhoP);
    CHECK(cfg.curve_mode == CurveMode::Expectation);
    CHECK(cfg.noise.environment.b_field == doctest::Approx(4.1));
    CHECK(cfg.format == "both");
}

TEST_CASE("unknown keys are rejected with their path") {
    Json j = minimal_config();
    j["typo_key"] = 1;
    CHECK_THROWS_WITH_AS(parse_run_config(j, "simulate"),
                         "unknown config key: typo_key", ConfigError);

    Json j2 = minimal_config();
    j2["noise"] = Json{{"hoping_rate_hz", 1e-3}};
    try {
        parse_run_config(j2, "simulate");
        FAIL("expected ConfigError");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("noise.hoping_rate_hz") != std::string::npos);
    }
}

TEST_CASE("seed is mandatory for simulate and sweep") {
    Json j = minimal_config();
    j.erase("seed");
    CHECK_THROWS_AS(parse_run_config(j, "simulate"), ConfigError);
    j["sweep"] = Json{{"cases", Json::array({Json{{"t_phi_s", 1250.0}}})}};
    CHECK_THROWS_AS(parse_run_config(j, "sweep"), ConfigError);
    CHECK_NOTHROW(parse_run_config(j, "budget"));

    Json negative = minimal_config();
    negative["seed"] = -5;
    CHECK_THROWS_AS(parse_run_config(negative, "simulate"), ConfigError);
}

TEST_CASE("beam list and readout blocks parse") {
    Json j = minimal_config();
    j["noise"] = Json{{"scattering", true}};
    j["beams"] = Json::array(
        {Json{{"wavelength_m", 493e-9}, {"power_w", 220e-6}, {"waist_m", 38e-6}},
         Json{{"wavelength_m", 650e-9}, {"power_w", 90e-6}, {"waist_m", 55e-6}}});
    j["readout"] = Json{{"enabled", true}, {"eps01", 0.02}, {"p_misorder", 0.05},
                        {"ba_threshold", 10}};
    const RunConfig cfg = parse_run_config(j, "simulate");
    REQUIRE(cfg.noise.scatter_beams.size() == 2);
    CHECK(cfg.noise.scatter_beams[0].waist == doctest::Approx(38e-6));
    CHECK(cfg.noise.scatter_beams[0].ion_offset == doctest::Approx(6e-6));
    REQUIRE(cfg.readout.has_value());
    CHECK(cfg.readout->ion1.eps01 == doctest::Approx(0.02));
    CHECK(cfg.readout->ba_threshold == 10);
}

TEST_CASE("resolved config embeds everything needed to rerun") {
    const RunConfig cfg = parse_run_config(minimal_config(), "simulate");
    const Json resolved = resolved_config_json(cfg, "simulate");
    CHECK(resolved["seed"] == 7);
    CHECK(resolved["command"] == "simulate");
    CHECK(resolved["environment"]["b_field_gauss"] == doctest::Approx(4.1));
    CHECK(resolved["constants"]["beta_hz_per_gauss2"] == doctest::Approx(310.8));
}

TEST_CASE("CSV round trip with metadata") {
    TempDir dir;
    const std::string path = dir.file("curve.csv");
    write_csv(path, {"time_s", "contrast", "std_err"},
              {{0.0, 0.5, 0.001}, {200.0, 0.497, 0.002}}, Json{{"seed", 7}});
    const CsvTable table = read_csv(path);
    REQUIRE(table.header.size() == 3);
    CHECK(table.header[1] == "contrast");
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1][0] == doctest::Approx(200.0));
    CHECK(table.rows[1][1] == doctest::Approx(0.497));

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.find("# config:") == 0);
    CHECK(first.find("\"seed\":7") != std::string::npos);
}

TEST_CASE("malformed CSV errors name the line") {
    TempDir dir;
    const std::string path = dir.file("bad.csv");
    {
        std::ofstream out(path);
        out << "time_s,value\n1.0,2.0\nnot_a_number,3.0\n";
    }
    try {
        read_csv(path);
        FAIL("expected IoError");
    } catch (const IoError& err) {
        CHECK(std::string(err.what()).find(":3") != std::string::npos);
    }

    const std::string path2 = dir.file("ragged.csv");
    {
        std::ofstream out(path2);
        out << "a,b\n1.0\n";
    }
    CHECK_THROWS_AS(read_csv(path2), IoError);
    CHECK_THROWS_AS(read_csv(dir.file("missing.csv")), IoError);
}

TEST_CASE("budget renderings agree entry for entry") {
    std::vector<BudgetEntry> entries{
        {"ion exchange hopping", 3.95e4, BudgetSource::MonteCarlo},
        {"photon scattering", 7.65e4, BudgetSource::Analytic},
        {"T1 lifetime", 5e11, BudgetSource::Recorded}};
    const Json j = budget_to_json(entries);
    const std::string text = budget_to_text(entries);
    REQUIRE(j.size() == 3);
    for (size_t i = 0; i < entries.size(); ++i) {
        CHECK(j[i]["mechanism"] == entries[i].mechanism);
        CHECK(j[i]["rank"] == static_cast<int>(i) + 1);
        CHECK(text.find(entries[i].mechanism) != std::string::npos);
    }
    CHECK(text.find("monte-carlo") != std::string::npos);
    CHECK(text.find("recorded") != std::string::npos);
}

TEST_CASE("fit JSON names the parameters") {
    FitResult fit;
    fit.params = {0.5, 3.77e4, 0.0};
    fit.sigmas = {0.01, 1.1e4, 0.0};
    fit.chi2_reduced = 1.02;
    fit.converged = true;
    fit.covariance = Eigen::MatrixXd::Zero(3, 3);
    const Json j = fit_to_json(fit, FitModel::Exponential);
    CHECK(j["model"] == "exponential");
    CHECK(j["params"]["time_constant_s"] == doctest::Approx(3.77e4));
    CHECK(j["sigmas"]["time_constant_s"] == doctest::Approx(1.1e4));
    CHECK(j["converged"] == true);
}
