// dfs_sim: batch front-end for the DFS trapped-ion memory simulator.
// Subcommands: simulate, sweep, budget, bench-pulses, fit.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dfs/budget.hpp"
#include "dfs/io.hpp"
#include "dfs/monte_carlo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonFlags {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::string out_dir;
    std::string format;
    std::optional<long> trajectories;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "JSON config file");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--format", flags.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    cmd->add_option("--trajectories,--shots", flags.trajectories,
                    "trajectories per point (overrides config)");
    cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

std::string resolve_out_dir(const CommonFlags& flags, const dfs::RunConfig& cfg) {
    if (!flags.out_dir.empty()) return flags.out_dir;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("DFS_SIM_OUTDIR"); env && *env) return env;
    return ".";
}

dfs::RunConfig load_config(const CommonFlags& flags, const std::string& command) {
    dfs::RunConfig cfg = dfs::load_run_config(flags.config_path, command);
    if (flags.seed) {
        cfg.seed = *flags.seed;
        cfg.seed_set = true;
    }
    if (flags.trajectories) {
        if (*flags.trajectories < 1)
            throw dfs::ConfigError("--trajectories must be >= 1");
        cfg.trajectories = *flags.trajectories;
    }
    if (!flags.format.empty()) cfg.format = flags.format;
    return cfg;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw dfs::IoError("cannot create output directory: " + dir);
}

dfs::CurveRequest curve_request_from(const dfs::RunConfig& cfg) {
    dfs::CurveRequest req;
    req.times = cfg.times_s;
    req.tau = cfg.tau_s;
    req.style = cfg.style;
    req.analysis_phase = cfg.analysis_phase;
    req.initial_state = cfg.initial_state;
    req.mode = cfg.curve_mode;
    req.shots = cfg.trajectories;
    req.master_seed = cfg.seed;
    req.readout = cfg.readout;
    return req;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonFlags& flags) {
    const dfs::RunConfig cfg = load_config(flags, "simulate");
    if (cfg.times_s.empty())
        throw dfs::ConfigError("config key sequence.times_s is mandatory for simulate");
    const std::string dir = resolve_out_dir(flags, cfg);
    ensure_dir(dir);
    const dfs::Json meta = dfs::resolved_config_json(cfg, "simulate");

    const dfs::CurveRequest req = curve_request_from(cfg);
    const dfs::SimulatedCurves curves = dfs::contrast_curves(req, cfg.noise);

    dfs::CoherenceOptions fit_options;
    fit_options.amplitude_anchor = cfg.fit_anchor;
    fit_options.fix_offset = cfg.fit_fix_offset || cfg.fit_anchor.has_value();
    dfs::ContrastCurve fit_curve;
    fit_curve.shots_per_point = curves.parity.shots_per_point;
    for (size_t i = 0; i < curves.parity.times.size(); ++i) {
        if (curves.parity.times[i] < cfg.fit_min_time_s) continue;
        fit_curve.times.push_back(curves.parity.times[i]);
        fit_curve.contrast.push_back(curves.parity.contrast[i]);
        fit_curve.standard_error.push_back(curves.parity.standard_error[i]);
    }
    if (fit_curve.times.size() < 3)
        throw dfs::ConfigError("fit.min_time_s leaves fewer than 3 points to fit");
    const dfs::CoherenceFit fit = dfs::coherence_time(fit_curve, fit_options);

    if (cfg.format != "json") {
        dfs::write_curve_csv(dir + "/contrast.csv", curves.parity, meta);
        dfs::write_curve_csv(dir + "/contrast_ion1.csv", curves.ion1, meta);
        dfs::write_curve_csv(dir + "/contrast_ion2.csv", curves.ion2, meta);
    }
    if (cfg.format != "csv") {
        dfs::Json j{{"config", meta},
                    {"parity", dfs::curve_to_json(curves.parity)},
                    {"ion1", dfs::curve_to_json(curves.ion1)},
                    {"ion2", dfs::curve_to_json(curves.ion2)}};
        dfs::write_json_file(dir + "/contrast.json", j);
    }
    dfs::Json fit_json{{"config", meta},
                       {"coherence_time_s", fit.time},
                       {"coherence_sigma_s", fit.sigma},
                       {"converged", fit.converged}};
    if (fit.converged) fit_json["fit"] = dfs::fit_to_json(fit.fit, dfs::FitModel::Exponential);
    dfs::write_json_file(dir + "/fit.json", fit_json);

    if (!flags.quiet) {
        std::cout << "simulate: " << curves.parity.times.size() << " points, "
                  << cfg.trajectories << " trajectories/point\n";
        if (fit.converged)
            std::cout << "coherence time " << dfs::format_double(fit.time) << " +- "
                      << dfs::format_double(fit.sigma) << " s\n";
        else
            std::cout << "coherence fit did not converge (flat or degenerate curve)\n";
        std::cout << "wrote " << dir << "/contrast.{csv,json}, fit.json\n";
    }
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags) {
    const dfs::RunConfig cfg = load_config(flags, "sweep");
    const std::string dir = resolve_out_dir(flags, cfg);
    ensure_dir(dir);
    const dfs::Json meta = dfs::resolved_config_json(cfg, "sweep");

    std::vector<std::vector<double>> rows;
    dfs::Json cells = dfs::Json::array();
    for (size_t i = 0; i < cfg.sweep_cases.size(); ++i) {
        const dfs::SweepCase& c = cfg.sweep_cases[i];
        const double t = dfs::mc_hopping_limit(c.t_phi_s, c.hopping_rate_hz, c.tau_s,
                                               cfg.trajectories,
                                               cfg.seed + static_cast<uint64_t>(i),
                                               cfg.noise.engine);
        rows.push_back({static_cast<double>(i), c.t_phi_s, c.hopping_rate_hz, c.tau_s, t});
        cells.push_back({{"label", c.label},
                         {"t_phi_s", c.t_phi_s},
                         {"hopping_rate_hz", c.hopping_rate_hz},
                         {"tau_s", c.tau_s},
                         {"coherence_time_s", t}});
        if (!flags.quiet)
            std::cout << "sweep cell " << i << " (" << c.label << "): T = "
                      << dfs::format_double(t) << " s\n";
    }
    if (cfg.format != "json")
        dfs::write_csv(dir + "/sweep.csv",
                       {"case_index", "t_phi_s", "hopping_rate_hz", "tau_s",
                        "coherence_time_s"},
                       rows, meta);
    if (cfg.format != "csv")
        dfs::write_json_file(dir + "/sweep.json",
                             dfs::Json{{"config", meta}, {"cells", cells}});
    if (!flags.quiet) std::cout << "wrote " << dir << "/sweep.{csv,json}\n";
    return kExitOk;
}

int cmd_budget(const CommonFlags& flags) {
    const dfs::RunConfig cfg = load_config(flags, "budget");
    const std::string dir = resolve_out_dir(flags, cfg);
    ensure_dir(dir);
    const dfs::Json meta = dfs::resolved_config_json(cfg, "budget");

    const double hopping = dfs::mc_hopping_limit(
        cfg.budget.hopping_t_phi_s, cfg.budget.hopping_rate_hz, cfg.budget.tau_s,
        cfg.budget.hopping_trajectories, cfg.seed, dfs::EngineKind::PhaseOnly);

    dfs::BudgetInputs inputs;
    inputs.mc_hopping_limit_s = hopping;
    inputs.t_zeeman_s = cfg.budget.t_zeeman_s;
    inputs.b_field_gauss = cfg.noise.environment.b_field;
    inputs.epsilon_rms = cfg.budget.epsilon_rms;
    inputs.tau_s = cfg.budget.tau_s;
    inputs.constants = cfg.noise.constants;
    const std::vector<dfs::BudgetEntry> entries = dfs::budget_report(inputs);

    dfs::write_json_file(dir + "/budget.json",
                         dfs::Json{{"config", meta}, {"entries", dfs::budget_to_json(entries)}});
    {
        std::ofstream out(dir + "/budget.txt");
        if (!out) throw dfs::IoError("cannot write " + dir + "/budget.txt");
        out << "# config: " << meta.dump() << "\n" << dfs::budget_to_text(entries);
    }
    if (!flags.quiet) {
        std::cout << dfs::budget_to_text(entries);
        std::cout << "wrote " << dir << "/budget.{json,txt}\n";
    }
    return kExitOk;
}

int cmd_bench_pulses(const CommonFlags& flags) {
    const dfs::RunConfig cfg = load_config(flags, "bench-pulses");
    const std::string dir = resolve_out_dir(flags, cfg);
    ensure_dir(dir);
    const dfs::Json meta = dfs::resolved_config_json(cfg, "bench-pulses");

    struct Series {
        std::string name;
        dfs::SequenceStyle pattern;
        double eps_sys;
    };
    const std::vector<Series> series{
        {"uncalibrated", dfs::SequenceStyle::Plain, cfg.bench.epsilon_systematic.front()},
        {"calibrated", dfs::SequenceStyle::Plain, cfg.bench.epsilon_calibrated},
        {"reverse", dfs::SequenceStyle::Reverse, cfg.bench.epsilon_calibrated}};

    std::vector<std::vector<double>> rows;
    dfs::Json json_series = dfs::Json::array();
    for (size_t s = 0; s < series.size(); ++s) {
        dfs::Json points = dfs::Json::array();
        for (int n : cfg.bench.pulse_counts) {
            const auto [err, se] = dfs::pulse_train_error(
                n, series[s].eps_sys, cfg.bench.epsilon_rms, series[s].pattern,
                cfg.bench.shots, cfg.seed + static_cast<uint64_t>(s));
            rows.push_back({static_cast<double>(n), static_cast<double>(s),
                            series[s].eps_sys, err, se});
            points.push_back({{"n_pulses", n}, {"error", err}, {"std_err", se}});
        }
        json_series.push_back({{"name", series[s].name},
                               {"epsilon_systematic", series[s].eps_sys},
                               {"points", points}});
    }
    if (cfg.format != "json")
        dfs::write_csv(dir + "/bench_pulses.csv",
                       {"n_pulses", "series_index", "epsilon_systematic",
                        "population_error", "std_err"},
                       rows, meta);
    if (cfg.format != "csv")
        dfs::write_json_file(dir + "/bench_pulses.json",
                             dfs::Json{{"config", meta}, {"series", json_series}});
    if (!flags.quiet) std::cout << "wrote " << dir << "/bench_pulses.{csv,json}\n";
    return kExitOk;
}

int cmd_fit(const CommonFlags& flags, const std::string& input,
            const std::string& model_name, const std::string& guess_text) {
    dfs::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = dfs::load_run_config(flags.config_path, "fit");
    if (flags.seed) cfg.seed = *flags.seed;
    if (!flags.format.empty()) cfg.format = flags.format;
    const std::string dir = resolve_out_dir(flags, cfg);
    ensure_dir(dir);

    dfs::FitModel model;
    if (model_name == "exponential") model = dfs::FitModel::Exponential;
    else if (model_name == "gaussian") model = dfs::FitModel::GaussianDecay;
    else if (model_name == "cosine") model = dfs::FitModel::Cosine;
    else throw dfs::ConfigError("unknown fit model: " + model_name);

    const dfs::CsvTable table = dfs::read_csv(input);
    if (table.header.size() < 2)
        throw dfs::IoError(input + ": need at least time and value columns");
    std::vector<double> t, y, sigma;
    for (const auto& row : table.rows) {
        t.push_back(row[0]);
        y.push_back(row[1]);
        sigma.push_back(row.size() > 2 && row[2] > 0 ? row[2] : 1.0);
    }

    std::vector<double> guess;
    if (!guess_text.empty()) {
        std::stringstream ss(guess_text);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                guess.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw dfs::ConfigError("cannot parse --guess entry: " + cell);
            }
        }
    } else {
        const double span = t.empty() ? 1.0 : std::max(1e-12, t.back() - t.front());
        const double y0 = y.empty() ? 1.0 : y.front();
        if (model == dfs::FitModel::Cosine) guess = {y0, span / 2.0, 0.0, 0.0};
        else guess = {y0, span, 0.0};
    }

    dfs::FitOptions options;
    if (model == dfs::FitModel::GaussianDecay) options.fixed = {false, false, true};
    const dfs::FitResult fit = dfs::fit_model(t, y, sigma, model, guess, options);

    dfs::Json j{{"config", dfs::resolved_config_json(cfg, "fit")},
                {"input", input},
                {"fit", dfs::fit_to_json(fit, model)}};
    dfs::write_json_file(dir + "/fit.json", j);
    if (!flags.quiet)
        std::cout << "fit " << model_name << ": "
                  << dfs::fit_to_json(fit, model)["params"].dump() << "\n";
    return fit.converged ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DFS trapped-ion clock-qubit memory simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string fit_input, fit_model_name = "exponential", fit_guess;

    CLI::App* simulate = app.add_subcommand("simulate", "parity + single-ion contrast curves");
    add_common(simulate, flags);
    CLI::App* sweep = app.add_subcommand("sweep", "coherence time over (T_phi, rate, tau) cells");
    add_common(sweep, flags);
    CLI::App* budget = app.add_subcommand("budget", "ranked coherence-limit budget");
    add_common(budget, flags);
    CLI::App* bench = app.add_subcommand("bench-pulses", "pi-pulse train error benchmark");
    add_common(bench, flags);
    CLI::App* fit = app.add_subcommand("fit", "fit a decay/oscillation model to a CSV");
    add_common(fit, flags, /*config_required=*/false);
    fit->add_option("--input", fit_input, "input CSV (time, value[, std_err])")->required();
    fit->add_option("--model", fit_model_name, "exponential|gaussian|cosine")
        ->check(CLI::IsMember({"exponential", "gaussian", "cosine"}));
    fit->add_option("--guess", fit_guess, "comma-separated initial parameters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(flags);
        if (sweep->parsed()) return cmd_sweep(flags);
        if (budget->parsed()) return cmd_budget(flags);
        if (bench->parsed()) return cmd_bench_pulses(flags);
        if (fit->parsed()) return cmd_fit(flags, fit_input, fit_model_name, fit_guess);
    } catch (const dfs::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const dfs::IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
