#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfs/budget.hpp"
#include "dfs/monte_carlo.hpp"

// Config parsing (strict JSON schema) and the CSV/JSON artifact writers.
// Every output embeds the resolved config and seed so runs are auditable.

namespace dfs {

using Json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Run configuration

struct SweepCase {
    std::string label;
    double t_phi_s = 1250.0;
    double hopping_rate_hz = 6e-4;
    double tau_s = 100.0;
};

struct BudgetConfig {
    double t_zeeman_s = 145.0;
    double epsilon_rms = 1.7e-3;
    double tau_s = 100.0;
    double hopping_t_phi_s = 1250.0;
    double hopping_rate_hz = 6e-4;
    long hopping_trajectories = 30000;
};

struct BenchConfig {
    std::vector<int> pulse_counts;
    std::vector<double> epsilon_systematic{0.01};
    double epsilon_calibrated = 1.7e-3;
    double epsilon_rms = 1.7e-3;
    long shots = 20000;
};

struct RunConfig {
    uint64_t seed = 1;
    bool seed_set = false;
    long trajectories = 10000;

    double tau_s = 100.0;
    SequenceStyle style = SequenceStyle::Reverse;
    double analysis_phase = 0.0;
    std::vector<double> times_s;

    InitialState initial_state = InitialState::Ground;
    CurveMode curve_mode = CurveMode::Sampled;
    NoiseConfig noise;
    std::optional<ReadoutSim> readout;

    std::optional<double> fit_anchor;
    bool fit_fix_offset = false;
    double fit_min_time_s = 0.0;  // fit only points with T >= this

    std::vector<SweepCase> sweep_cases;
    BudgetConfig budget;
    BenchConfig bench;

    std::string out_dir;
    std::string format = "both";  // csv | json | both
};

// Parses and validates a config for `command` (simulate, sweep, budget,
// bench-pulses, fit). Unknown keys are rejected with their JSON path; a
// missing mandatory seed (simulate/sweep) is a schema error.
RunConfig parse_run_config(const Json& j, const std::string& command);
RunConfig load_run_config(const std::string& path, const std::string& command);

// Fully resolved config (defaults filled in) for embedding into outputs.
Json resolved_config_json(const RunConfig& cfg, const std::string& command);

// ---------------------------------------------------------------------------
// Artifacts

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Reads a CSV with optional '#' metadata lines; throws IoError naming the
// offending line number on malformed input.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const Json& metadata);

void write_json_file(const std::string& path, const Json& payload);

Json curve_to_json(const ContrastCurve& curve);
void write_curve_csv(const std::string& path, const ContrastCurve& curve,
                     const Json& metadata);

Json fit_to_json(const FitResult& fit, FitModel model);
Json budget_to_json(const std::vector<BudgetEntry>& entries);
std::string budget_to_text(const std::vector<BudgetEntry>& entries);

std::string format_double(double value);

}  // namespace dfs
