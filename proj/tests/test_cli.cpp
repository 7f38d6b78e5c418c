#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "dfs/io.hpp"

// Exercises the dfs_sim binary end to end: exit codes, file artifacts,
// determinism, schema errors.

namespace {

namespace fs = std::filesystem;
using dfs::Json;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("dfs_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(DFS_SIM_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    out << j.dump(2);
}

Json simulate_config() {
    return Json{
        {"seed", 11},
        {"trajectories", 400},
        {"initial_state", "rho_p"},
        {"curve_mode", "expectation"},
        {"sequence", Json{{"tau_s", 100.0}, {"times_s", {0.0, 200.0, 400.0, 600.0}}}},
        {"noise", Json{{"hopping_rate_hz", 6e-4}, {"t_phi_s", 1250.0}}},
        {"fit", Json{{"anchor_amplitude", 0.5}}}};
}

}  // namespace

TEST_CASE("simulate writes curves, fit and embedded config") {
    Sandbox box;
    write_json(box.file("cfg.json"), simulate_config());
    const int code = run("simulate --config " + box.file("cfg.json") + " --out " +
                         box.file("out") + " --quiet");
    CHECK(code == 0);
    for (const char* name :
         {"contrast.csv", "contrast_ion1.csv", "contrast_ion2.csv", "contrast.json",
          "fit.json"})
        CHECK(fs::exists(box.file(std::string("out/") + name)));

    const std::string csv = slurp(box.file("out/contrast.csv"));
    CHECK(csv.find("# config:") == 0);
    CHECK(csv.find("\"seed\":11") != std::string::npos);
    CHECK(csv.find("time_s,contrast,std_err") != std::string::npos);

    const Json fit = Json::parse(slurp(box.file("out/fit.json")));
    CHECK(fit["config"]["seed"] == 11);
    CHECK(fit.contains("coherence_time_s"));
}

TEST_CASE("same config and seed give byte-identical outputs") {
    Sandbox box;
    write_json(box.file("cfg.json"), simulate_config());
    REQUIRE(run("simulate --config " + box.file("cfg.json") + " --out " +
                box.file("a") + " --quiet") == 0);
    REQUIRE(run("simulate --config " + box.file("cfg.json") + " --out " +
                box.file("b") + " --quiet") == 0);
    CHECK(slurp(box.file("a/contrast.csv")) == slurp(box.file("b/contrast.csv")));
    CHECK(slurp(box.file("a/fit.json")) == slurp(box.file("b/fit.json")));

    // A different seed changes the sampled curve.
    REQUIRE(run("simulate --config " + box.file("cfg.json") + " --seed 12 --out " +
                box.file("c") + " --quiet") == 0);
    CHECK(slurp(box.file("a/contrast.csv")) != slurp(box.file("c/contrast.csv")));
}

TEST_CASE("schema violations exit with code 2 and name the key") {
    Sandbox box;
    Json bad = simulate_config();
    bad["nois"] = Json{{"hopping_rate_hz", 1.0}};
    write_json(box.file("bad.json"), bad);
    CHECK(run("simulate --config " + box.file("bad.json") + " --quiet") == 2);

    Json no_seed = simulate_config();
    no_seed.erase("seed");
    write_json(box.file("no_seed.json"), no_seed);
    CHECK(run("simulate --config " + box.file("no_seed.json") + " --quiet") == 2);

    CHECK(run("simulate --config " + box.file("missing.json") + " --quiet") == 4);
}

TEST_CASE("sweep emits one fitted time per cell") {
    Sandbox box;
    const Json cfg{
        {"seed", 21},
        {"trajectories", 4000},
        {"engine", "phase_only"},
        {"sweep",
         Json{{"cases",
               Json::array({Json{{"label", "green"},
                                 {"t_phi_s", 1250.0},
                                 {"hopping_rate_hz", 6e-4},
                                 {"tau_s", 100.0}},
                            Json{{"label", "black"},
                                 {"t_phi_s", 1.8},
                                 {"hopping_rate_hz", 6e-4},
                                 {"tau_s", 100.0}}})}}}};
    write_json(box.file("sweep.json"), cfg);
    REQUIRE(run("sweep --config " + box.file("sweep.json") + " --out " +
                box.file("out") + " --quiet") == 0);
    const Json out = Json::parse(slurp(box.file("out/sweep.json")));
    REQUIRE(out["cells"].size() == 2);
    const double green = out["cells"][0]["coherence_time_s"].get<double>();
    const double black = out["cells"][1]["coherence_time_s"].get<double>();
    CHECK(green == doctest::Approx(3.96e4).epsilon(0.25));
    CHECK(black == doctest::Approx(1667.0).epsilon(0.25));
    CHECK(fs::exists(box.file("out/sweep.csv")));
}

TEST_CASE("budget command writes the ranked table in both formats") {
    Sandbox box;
    const Json cfg{{"seed", 31},
                   {"budget", Json{{"hopping_trajectories", 4000}}}};
    write_json(box.file("budget.json"), cfg);
    REQUIRE(run("budget --config " + box.file("budget.json") + " --out " +
                box.file("out") + " --quiet") == 0);
    const Json out = Json::parse(slurp(box.file("out/budget.json")));
    REQUIRE(out["entries"].size() == 6);
    CHECK(out["entries"][0]["mechanism"] == "ion exchange hopping");

    const std::string text = slurp(box.file("out/budget.txt"));
    for (const auto& entry : out["entries"])
        CHECK(text.find(entry["mechanism"].get<std::string>()) != std::string::npos);
}

TEST_CASE("bench-pulses: reverse beats calibrated plain by 2x at N=40") {
    Sandbox box;
    const Json cfg{{"seed", 41},
                   {"bench", Json{{"pulse_counts", {8, 24, 40}},
                                  {"epsilon_systematic", {0.01}},
                                  {"shots", 4000}}}};
    write_json(box.file("bench.json"), cfg);
    REQUIRE(run("bench-pulses --config " + box.file("bench.json") + " --out " +
                box.file("out") + " --quiet") == 0);
    const Json out = Json::parse(slurp(box.file("out/bench_pulses.json")));
    REQUIRE(out["series"].size() == 3);
    double calibrated40 = -1.0, reverse40 = -1.0;
    for (const auto& series : out["series"]) {
        for (const auto& point : series["points"]) {
            if (point["n_pulses"] != 40) continue;
            if (series["name"] == "calibrated") calibrated40 = point["error"];
            if (series["name"] == "reverse") reverse40 = point["error"];
        }
    }
    REQUIRE(calibrated40 >= 0.0);
    REQUIRE(reverse40 >= 0.0);
    CHECK(reverse40 <= 0.5 * calibrated40);
}

TEST_CASE("zero-noise ground-start run keeps unit contrast") {
    Sandbox box;
    const Json cfg{{"seed", 51},
                   {"trajectories", 200},
                   {"initial_state", "ground"},
                   {"curve_mode", "expectation"},
                   {"sequence", Json{{"tau_s", 100.0}, {"times_s", {0.0, 200.0, 400.0}}}},
                   {"noise", Json{{"hopping_rate_hz", 0.0}, {"t_phi_s", 1e9}}}};
    write_json(box.file("quiet.json"), cfg);
    REQUIRE(run("simulate --config " + box.file("quiet.json") + " --out " +
                box.file("out") + " --quiet") == 0);
    const dfs::CsvTable table = dfs::read_csv(box.file("out/contrast.csv"));
    for (const auto& row : table.rows) CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-9));
    const Json fit = Json::parse(slurp(box.file("out/fit.json")));
    CHECK(fit["converged"] == false);  // flat curve: the decay fit is degenerate
}

TEST_CASE("degenerate standalone fit exits with the numerical code") {
    Sandbox box;
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= 20; ++k) rows.push_back({10.0 * k, 1.0, 0.01});
    dfs::write_csv(box.file("flat.csv"), {"time_s", "value", "std_err"}, rows,
                   Json{{"synthetic", true}});
    // Flat data fit from a zero-amplitude start: the decay direction carries
    // no information and the fit is rank-deficient.
    CHECK(run("fit --input " + box.file("flat.csv") +
              " --model exponential --guess 0,1000,1 --out " + box.file("out") +
              " --quiet") == 3);
}

TEST_CASE("fit command round-trips a synthetic exponential CSV") {
    Sandbox box;
    {
        std::vector<std::vector<double>> rows;
        for (int k = 1; k <= 40; ++k) {
            const double t = 40.0 * k;
            rows.push_back({t, 0.5 * std::exp(-t / 700.0), 0.01});
        }
        dfs::write_csv(box.file("data.csv"), {"time_s", "value", "std_err"}, rows,
                       Json{{"synthetic", true}});
    }
    REQUIRE(run("fit --input " + box.file("data.csv") +
                " --model exponential --out " + box.file("out") + " --quiet") == 0);
    const Json out = Json::parse(slurp(box.file("out/fit.json")));
    CHECK(out["fit"]["params"]["time_constant_s"].get<double>() ==
          doctest::Approx(700.0).epsilon(1e-6));
    CHECK(out["fit"]["converged"] == true);

    // Malformed CSV: io error, exit 4, message carries the line number.
    {
        std::ofstream badcsv(box.file("bad.csv"));
        badcsv << "time_s,value\n1.0,1.0\noops,0.5\n";
    }
    const std::string cmd = std::string(DFS_SIM_BIN) + " fit --input " +
                            box.file("bad.csv") + " --out " + box.file("out") +
                            " 2> " + box.file("err.txt");
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 4);
    CHECK(slurp(box.file("err.txt")).find(":3") != std::string::npos);
}
