#include "dfs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dfs {

namespace {

void check_keys(const Json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key: " + path + it.key());
}

double get_number(const Json& obj, const std::string& path, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("config key " + path + key + " must be a number");
    return obj[key].get<double>();
}

long get_integer(const Json& obj, const std::string& path, const char* key,
                 long fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config key " + path + key + " must be an integer");
    return obj[key].get<long>();
}

bool get_bool(const Json& obj, const std::string& path, const char* key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean())
        throw ConfigError("config key " + path + key + " must be a boolean");
    return obj[key].get<bool>();
}

std::string get_string(const Json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string())
        throw ConfigError("config key " + path + key + " must be a string");
    return obj[key].get<std::string>();
}

std::vector<double> get_number_list(const Json& obj, const std::string& path,
                                    const char* key) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    if (!obj[key].is_array())
        throw ConfigError("config key " + path + key + " must be an array");
    for (const auto& v : obj[key]) {
        if (!v.is_number())
            throw ConfigError("config key " + path + key + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

void parse_constants(const Json& j, PhysicalConstants& c) {
    check_keys(j, "constants.",
               {"gamma_z_hz_per_gauss", "beta_hz_per_gauss2", "hf_base_hz",
                "gamma_p_rad_s", "delta_fs_rad_s", "lambda_0_m"});
    c.gamma_z = get_number(j, "constants.", "gamma_z_hz_per_gauss", c.gamma_z);
    c.beta = get_number(j, "constants.", "beta_hz_per_gauss2", c.beta);
    c.hf_base = get_number(j, "constants.", "hf_base_hz", c.hf_base);
    c.gamma_p = get_number(j, "constants.", "gamma_p_rad_s", c.gamma_p);
    c.delta_fs = get_number(j, "constants.", "delta_fs_rad_s", c.delta_fs);
    c.lambda_0 = get_number(j, "constants.", "lambda_0_m", c.lambda_0);
    c.validate();
}

ScatterBeam parse_beam(const Json& j, const std::string& path) {
    check_keys(j, path,
               {"wavelength_m", "power_w", "waist_m", "offset_m", "incidence_factor"});
    ScatterBeam beam{};
    beam.wavelength = get_number(j, path, "wavelength_m", 0.0);
    beam.power = get_number(j, path, "power_w", 0.0);
    beam.waist = get_number(j, path, "waist_m", 0.0);
    beam.ion_offset = get_number(j, path, "offset_m", 6e-6);
    beam.incidence_factor =
        get_number(j, path, "incidence_factor", 1.0 / std::numbers::sqrt2);
    beam.validate();
    return beam;
}

}  // namespace

RunConfig parse_run_config(const Json& j, const std::string& command) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "",
               {"seed", "trajectories", "engine", "initial_state", "curve_mode",
                "sequence", "qubit", "environment", "noise", "beams", "leakage",
                "readout", "constants", "fit", "sweep", "budget", "bench", "output"});

    RunConfig cfg;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() &&
            !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            throw ConfigError("config key seed must be a non-negative integer");
        cfg.seed = j["seed"].get<uint64_t>();
        cfg.seed_set = true;
    }
    if ((command == "simulate" || command == "sweep") && !cfg.seed_set)
        throw ConfigError("config key seed is mandatory for " + command);

    cfg.trajectories = get_integer(j, "", "trajectories", cfg.trajectories);
    if (cfg.trajectories < 1) throw ConfigError("config key trajectories must be >= 1");

    const std::string engine = get_string(j, "", "engine", "exact");
    if (engine == "exact") cfg.noise.engine = EngineKind::Exact;
    else if (engine == "phase_only") cfg.noise.engine = EngineKind::PhaseOnly;
    else throw ConfigError("config key engine must be exact or phase_only");

    const std::string init = get_string(j, "", "initial_state", "ground");
    if (init == "ground") cfg.initial_state = InitialState::Ground;
    else if (init == "rho_p") cfg.initial_state = InitialState::RhoP;
    else throw ConfigError("config key initial_state must be ground or rho_p");

    const std::string mode = get_string(j, "", "curve_mode", "sampled");
    if (mode == "sampled") cfg.curve_mode = CurveMode::Sampled;
    else if (mode == "expectation") cfg.curve_mode = CurveMode::Expectation;
    else throw ConfigError("config key curve_mode must be sampled or expectation");

    if (j.contains("sequence")) {
        const Json& s = j["sequence"];
        check_keys(s, "sequence.", {"tau_s", "style", "analysis_phase_rad", "times_s"});
        cfg.tau_s = get_number(s, "sequence.", "tau_s", cfg.tau_s);
        if (cfg.tau_s <= 0) throw ConfigError("config key sequence.tau_s must be > 0");
        const std::string style = get_string(s, "sequence.", "style", "reverse");
        if (style == "reverse") cfg.style = SequenceStyle::Reverse;
        else if (style == "plain") cfg.style = SequenceStyle::Plain;
        else throw ConfigError("config key sequence.style must be reverse or plain");
        cfg.analysis_phase =
            get_number(s, "sequence.", "analysis_phase_rad", cfg.analysis_phase);
        cfg.times_s = get_number_list(s, "sequence.", "times_s");
    }

    if (j.contains("qubit")) {
        const Json& q = j["qubit"];
        check_keys(q, "qubit.", {"kind"});
        const std::string kind = get_string(q, "qubit.", "kind", "clock");
        if (kind == "clock") cfg.noise.qubit_kind = QubitKind::Clock;
        else if (kind == "zeeman") cfg.noise.qubit_kind = QubitKind::Zeeman;
        else throw ConfigError("config key qubit.kind must be clock or zeeman");
    }

    if (j.contains("environment")) {
        const Json& e = j["environment"];
        check_keys(e, "environment.",
                   {"b_field_gauss", "delta_b_gauss", "common_sigma_gauss",
                    "common_tau_c_s"});
        MagneticEnvironment& env = cfg.noise.environment;
        env.b_field = get_number(e, "environment.", "b_field_gauss", env.b_field);
        env.delta_b = get_number(e, "environment.", "delta_b_gauss", env.delta_b);
        env.common_noise_sigma =
            get_number(e, "environment.", "common_sigma_gauss", env.common_noise_sigma);
        env.common_noise_tau_c =
            get_number(e, "environment.", "common_tau_c_s", env.common_noise_tau_c);
        env.validate();
    }

    bool scattering_on = false;
    bool leakage_on = false;
    if (j.contains("noise")) {
        const Json& n = j["noise"];
        check_keys(n, "noise.",
                   {"hopping_rate_hz", "t_phi_s", "common_field", "common_detuning_rad_s",
                    "lo_phase_sigma_rad", "pulse_error_systematic", "pulse_error_rms",
                    "scattering", "leakage"});
        cfg.noise.hopping.rate =
            get_number(n, "noise.", "hopping_rate_hz", cfg.noise.hopping.rate);
        cfg.noise.hopping.validate();
        if (n.contains("t_phi_s")) {
            const double t_phi = get_number(n, "noise.", "t_phi_s", 0.0);
            if (t_phi <= 0) throw ConfigError("config key noise.t_phi_s must be > 0");
            cfg.noise.t_phi_override = t_phi;
        }
        cfg.noise.common_field_enabled = get_bool(n, "noise.", "common_field", false);
        cfg.noise.common_detuning =
            get_number(n, "noise.", "common_detuning_rad_s", 0.0);
        cfg.noise.lo_phase_sigma = get_number(n, "noise.", "lo_phase_sigma_rad", 0.0);
        cfg.noise.pulse_errors.epsilon_systematic =
            get_number(n, "noise.", "pulse_error_systematic", 0.0);
        cfg.noise.pulse_errors.epsilon_rms =
            get_number(n, "noise.", "pulse_error_rms", 0.0);
        cfg.noise.pulse_errors.validate();
        scattering_on = get_bool(n, "noise.", "scattering", false);
        leakage_on = get_bool(n, "noise.", "leakage", false);
    }

    std::vector<ScatterBeam> beams{cooling_beam_493(), repump_beam_650()};
    if (j.contains("beams")) {
        if (!j["beams"].is_array()) throw ConfigError("config key beams must be an array");
        beams.clear();
        for (const auto& b : j["beams"]) beams.push_back(parse_beam(b, "beams[]."));
    }
    if (scattering_on) cfg.noise.scatter_beams = beams;

    LeakageModel leakage{};
    if (j.contains("leakage")) {
        const Json& l = j["leakage"];
        check_keys(l, "leakage.", {"isolation_db", "pi_time_s"});
        leakage.isolation_db =
            get_number(l, "leakage.", "isolation_db", leakage.isolation_db);
        leakage.pi_time = get_number(l, "leakage.", "pi_time_s", leakage.pi_time);
        leakage.validate();
    }
    if (leakage_on) cfg.noise.leakage = leakage;

    if (j.contains("constants")) parse_constants(j["constants"], cfg.noise.constants);

    if (j.contains("readout")) {
        const Json& r = j["readout"];
        check_keys(r, "readout.",
                   {"enabled", "eps01", "eps10", "ba_mean_in_order", "ba_mean_misordered",
                    "p_misorder", "ba_threshold", "mitigate"});
        if (get_bool(r, "readout.", "enabled", false)) {
            ReadoutSim ro;
            ro.ion1.eps01 = ro.ion2.eps01 = get_number(r, "readout.", "eps01", 0.01);
            ro.ion1.eps10 = ro.ion2.eps10 = get_number(r, "readout.", "eps10", 0.01);
            ro.ion1.validate();
            ro.ba_model.mean_in_order =
                get_number(r, "readout.", "ba_mean_in_order", 30.0);
            ro.ba_model.mean_misordered =
                get_number(r, "readout.", "ba_mean_misordered", 1.0);
            ro.p_misorder = get_number(r, "readout.", "p_misorder", 0.0);
            ro.ba_threshold =
                static_cast<int>(get_integer(r, "readout.", "ba_threshold", 0));
            ro.mitigate = get_bool(r, "readout.", "mitigate", true);
            cfg.readout = ro;
        }
    }

    if (j.contains("fit")) {
        const Json& f = j["fit"];
        check_keys(f, "fit.", {"anchor_amplitude", "fix_offset", "min_time_s"});
        if (f.contains("anchor_amplitude"))
            cfg.fit_anchor = get_number(f, "fit.", "anchor_amplitude", 0.5);
        cfg.fit_fix_offset = get_bool(f, "fit.", "fix_offset", cfg.fit_fix_offset);
        cfg.fit_min_time_s = get_number(f, "fit.", "min_time_s", 0.0);
    }

    if (j.contains("sweep")) {
        const Json& s = j["sweep"];
        check_keys(s, "sweep.", {"cases"});
        if (!s.contains("cases") || !s["cases"].is_array())
            throw ConfigError("config key sweep.cases must be an array");
        for (const auto& c : s["cases"]) {
            check_keys(c, "sweep.cases[].",
                       {"label", "t_phi_s", "hopping_rate_hz", "tau_s"});
            SweepCase sc;
            sc.label = get_string(c, "sweep.cases[].", "label", "");
            sc.t_phi_s = get_number(c, "sweep.cases[].", "t_phi_s", sc.t_phi_s);
            sc.hopping_rate_hz =
                get_number(c, "sweep.cases[].", "hopping_rate_hz", sc.hopping_rate_hz);
            sc.tau_s = get_number(c, "sweep.cases[].", "tau_s", sc.tau_s);
            if (sc.t_phi_s <= 0 || sc.tau_s <= 0 || sc.hopping_rate_hz < 0)
                throw ConfigError("config key sweep.cases[] has a non-positive entry");
            cfg.sweep_cases.push_back(sc);
        }
    }
    if (command == "sweep" && cfg.sweep_cases.empty())
        throw ConfigError("config key sweep.cases is mandatory for sweep");

    if (j.contains("budget")) {
        const Json& b = j["budget"];
        check_keys(b, "budget.",
                   {"t_zeeman_s", "epsilon_rms", "tau_s", "hopping_t_phi_s",
                    "hopping_rate_hz", "hopping_trajectories"});
        cfg.budget.t_zeeman_s = get_number(b, "budget.", "t_zeeman_s", 145.0);
        cfg.budget.epsilon_rms = get_number(b, "budget.", "epsilon_rms", 1.7e-3);
        cfg.budget.tau_s = get_number(b, "budget.", "tau_s", 100.0);
        cfg.budget.hopping_t_phi_s = get_number(b, "budget.", "hopping_t_phi_s", 1250.0);
        cfg.budget.hopping_rate_hz = get_number(b, "budget.", "hopping_rate_hz", 6e-4);
        cfg.budget.hopping_trajectories =
            get_integer(b, "budget.", "hopping_trajectories", 30000);
    }

    if (j.contains("bench")) {
        const Json& b = j["bench"];
        check_keys(b, "bench.",
                   {"pulse_counts", "epsilon_systematic", "epsilon_calibrated",
                    "epsilon_rms", "shots"});
        const std::vector<double> counts = get_number_list(b, "bench.", "pulse_counts");
        for (double c : counts) {
            if (c < 1 || c != std::floor(c))
                throw ConfigError("config key bench.pulse_counts must hold integers >= 1");
            cfg.bench.pulse_counts.push_back(static_cast<int>(c));
        }
        if (b.contains("epsilon_systematic")) {
            cfg.bench.epsilon_systematic =
                get_number_list(b, "bench.", "epsilon_systematic");
            if (cfg.bench.epsilon_systematic.empty())
                throw ConfigError("config key bench.epsilon_systematic must be non-empty");
        }
        cfg.bench.epsilon_calibrated =
            get_number(b, "bench.", "epsilon_calibrated", cfg.bench.epsilon_calibrated);
        cfg.bench.epsilon_rms = get_number(b, "bench.", "epsilon_rms", cfg.bench.epsilon_rms);
        cfg.bench.shots = get_integer(b, "bench.", "shots", cfg.bench.shots);
    }
    if (cfg.bench.pulse_counts.empty())
        for (int n = 4; n <= 40; n += 4) cfg.bench.pulse_counts.push_back(n);

    if (j.contains("output")) {
        const Json& o = j["output"];
        check_keys(o, "output.", {"dir", "format"});
        cfg.out_dir = get_string(o, "output.", "dir", "");
        cfg.format = get_string(o, "output.", "format", cfg.format);
        if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
            throw ConfigError("config key output.format must be csv, json or both");
    }

    return cfg;
}

RunConfig load_run_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ConfigError("config parse error in " + path + ": " + err.what());
    }
    return parse_run_config(j, command);
}

Json resolved_config_json(const RunConfig& cfg, const std::string& command) {
    Json j;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["trajectories"] = cfg.trajectories;
    j["engine"] = cfg.noise.engine == EngineKind::Exact ? "exact" : "phase_only";
    j["initial_state"] = cfg.initial_state == InitialState::Ground ? "ground" : "rho_p";
    j["curve_mode"] = cfg.curve_mode == CurveMode::Sampled ? "sampled" : "expectation";
    j["sequence"] = {{"tau_s", cfg.tau_s},
                     {"style", cfg.style == SequenceStyle::Reverse ? "reverse" : "plain"},
                     {"analysis_phase_rad", cfg.analysis_phase},
                     {"times_s", cfg.times_s}};
    j["qubit"] = {{"kind", cfg.noise.qubit_kind == QubitKind::Clock ? "clock" : "zeeman"}};
    j["environment"] = {{"b_field_gauss", cfg.noise.environment.b_field},
                        {"delta_b_gauss", cfg.noise.environment.delta_b},
                        {"common_sigma_gauss", cfg.noise.environment.common_noise_sigma},
                        {"common_tau_c_s", cfg.noise.environment.common_noise_tau_c}};
    Json noise = {{"hopping_rate_hz", cfg.noise.hopping.rate},
                  {"common_field", cfg.noise.common_field_enabled},
                  {"common_detuning_rad_s", cfg.noise.common_detuning},
                  {"lo_phase_sigma_rad", cfg.noise.lo_phase_sigma},
                  {"pulse_error_systematic", cfg.noise.pulse_errors.epsilon_systematic},
                  {"pulse_error_rms", cfg.noise.pulse_errors.epsilon_rms},
                  {"scattering", !cfg.noise.scatter_beams.empty()},
                  {"leakage", cfg.noise.leakage.has_value()}};
    if (cfg.noise.t_phi_override) noise["t_phi_s"] = *cfg.noise.t_phi_override;
    j["noise"] = noise;
    j["constants"] = {{"gamma_z_hz_per_gauss", cfg.noise.constants.gamma_z},
                      {"beta_hz_per_gauss2", cfg.noise.constants.beta},
                      {"hf_base_hz", cfg.noise.constants.hf_base},
                      {"gamma_p_rad_s", cfg.noise.constants.gamma_p},
                      {"delta_fs_rad_s", cfg.noise.constants.delta_fs},
                      {"lambda_0_m", cfg.noise.constants.lambda_0}};
    Json fit = {{"fix_offset", cfg.fit_fix_offset}, {"min_time_s", cfg.fit_min_time_s}};
    if (cfg.fit_anchor) fit["anchor_amplitude"] = *cfg.fit_anchor;
    j["fit"] = fit;
    if (cfg.readout) {
        j["readout"] = {{"enabled", true},
                        {"eps01", cfg.readout->ion1.eps01},
                        {"eps10", cfg.readout->ion1.eps10},
                        {"ba_mean_in_order", cfg.readout->ba_model.mean_in_order},
                        {"ba_mean_misordered", cfg.readout->ba_model.mean_misordered},
                        {"p_misorder", cfg.readout->p_misorder},
                        {"ba_threshold", cfg.readout->ba_threshold},
                        {"mitigate", cfg.readout->mitigate}};
    }
    if (command == "sweep") {
        Json cases = Json::array();
        for (const SweepCase& c : cfg.sweep_cases)
            cases.push_back({{"label", c.label},
                             {"t_phi_s", c.t_phi_s},
                             {"hopping_rate_hz", c.hopping_rate_hz},
                             {"tau_s", c.tau_s}});
        j["sweep"] = {{"cases", cases}};
    }
    if (command == "budget") {
        j["budget"] = {{"t_zeeman_s", cfg.budget.t_zeeman_s},
                       {"epsilon_rms", cfg.budget.epsilon_rms},
                       {"tau_s", cfg.budget.tau_s},
                       {"hopping_t_phi_s", cfg.budget.hopping_t_phi_s},
                       {"hopping_rate_hz", cfg.budget.hopping_rate_hz},
                       {"hopping_trajectories", cfg.budget.hopping_trajectories}};
    }
    if (command == "bench-pulses") {
        j["bench"] = {{"pulse_counts", cfg.bench.pulse_counts},
                      {"epsilon_systematic", cfg.bench.epsilon_systematic},
                      {"epsilon_calibrated", cfg.bench.epsilon_calibrated},
                      {"epsilon_rms", cfg.bench.epsilon_rms},
                      {"shots", cfg.bench.shots}};
    }
    return j;
}

// ---------------------------------------------------------------------------
// CSV

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);
    CsvTable table;
    std::string line;
    long line_no = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!header_done) {
            table.header = cells;
            header_done = true;
            continue;
        }
        if (cells.size() != table.header.size())
            throw IoError(path + ":" + std::to_string(line_no) +
                          ": wrong number of columns");
        std::vector<double> row;
        for (const std::string& c : cells) {
            try {
                size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size()) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(line_no) +
                              ": cannot parse number '" + c + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_done) throw IoError(path + ": missing CSV header");
    return table;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, const Json& metadata) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV file: " + path);
    out << "# config: " << metadata.dump() << "\n";
    for (size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_json_file(const std::string& path, const Json& payload) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write JSON file: " + path);
    out << payload.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Json curve_to_json(const ContrastCurve& curve) {
    return Json{{"time_s", curve.times},
                {"contrast", curve.contrast},
                {"std_err", curve.standard_error},
                {"shots_per_point", curve.shots_per_point}};
}

void write_curve_csv(const std::string& path, const ContrastCurve& curve,
                     const Json& metadata) {
    std::vector<std::vector<double>> rows;
    rows.reserve(curve.times.size());
    for (size_t i = 0; i < curve.times.size(); ++i)
        rows.push_back({curve.times[i], curve.contrast[i], curve.standard_error[i]});
    write_csv(path, {"time_s", "contrast", "std_err"}, rows, metadata);
}

Json fit_to_json(const FitResult& fit, FitModel model) {
    const std::vector<std::string> names = fit_param_names(model);
    Json params, sigmas;
    for (size_t i = 0; i < names.size(); ++i) {
        params[names[i]] = fit.params[i];
        sigmas[names[i]] = fit.sigmas[i];
    }
    std::vector<std::vector<double>> cov;
    for (int r = 0; r < fit.covariance.rows(); ++r) {
        std::vector<double> row;
        for (int c = 0; c < fit.covariance.cols(); ++c)
            row.push_back(fit.covariance(r, c));
        cov.push_back(std::move(row));
    }
    const char* model_name = model == FitModel::Exponential ? "exponential"
                             : model == FitModel::GaussianDecay ? "gaussian_decay"
                                                                : "cosine";
    return Json{{"model", model_name},       {"params", params},
                {"sigmas", sigmas},          {"chi2_reduced", fit.chi2_reduced},
                {"converged", fit.converged}, {"covariance", cov},
                {"iterations", fit.iterations}};
}

Json budget_to_json(const std::vector<BudgetEntry>& entries) {
    Json out = Json::array();
    int rank = 1;
    for (const BudgetEntry& e : entries)
        out.push_back({{"rank", rank++},
                       {"mechanism", e.mechanism},
                       {"limit_s", e.limit_s},
                       {"source", budget_source_name(e.source)}});
    return out;
}

std::string budget_to_text(const std::vector<BudgetEntry>& entries) {
    std::ostringstream os;
    size_t width = 12;
    for (const BudgetEntry& e : entries) width = std::max(width, e.mechanism.size());
    os << "rank  ";
    os.width(static_cast<std::streamsize>(width));
    os.setf(std::ios::left, std::ios::adjustfield);
    os << "mechanism";
    os << "  limit_s       source\n";
    int rank = 1;
    for (const BudgetEntry& e : entries) {
        char limit[32];
        std::snprintf(limit, sizeof(limit), "%-12.4g", e.limit_s);
        os << rank++ << "     ";
        os.width(static_cast<std::streamsize>(width));
        os << e.mechanism;
        os << "  " << limit << "  " << budget_source_name(e.source) << "\n";
    }
    return os.str();
}

}  // namespace dfs
