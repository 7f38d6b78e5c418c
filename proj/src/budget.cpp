#include "dfs/budget.hpp"

#include <algorithm>
#include <stdexcept>

namespace dfs {

std::string budget_source_name(BudgetSource source) {
    switch (source) {
        case BudgetSource::Analytic: return "analytic";
        case BudgetSource::MonteCarlo: return "monte-carlo";
        case BudgetSource::Recorded: return "recorded";
    }
    return "unknown";
}

std::vector<BudgetEntry> budget_report(const BudgetInputs& inputs) {
    if (inputs.mc_hopping_limit_s <= 0 || inputs.t_zeeman_s <= 0)
        throw std::invalid_argument("budget_report: limits must be positive");
    std::vector<ScatterBeam> beams = inputs.beams;
    if (beams.empty()) beams = {cooling_beam_493(), repump_beam_650()};

    std::vector<BudgetEntry> entries;
    entries.push_back({"ion exchange hopping", inputs.mc_hopping_limit_s,
                       BudgetSource::MonteCarlo});
    entries.push_back({"magnetic field noise",
                       project_clock_coherence(inputs.t_zeeman_s, inputs.b_field_gauss,
                                               inputs.constants),
                       BudgetSource::Analytic});
    entries.push_back({"photon scattering",
                       scattering_limit(beams, 2, inputs.constants),
                       BudgetSource::Analytic});
    entries.push_back({"pulse imperfections",
                       pulse_error_limit(inputs.epsilon_rms, inputs.tau_s),
                       BudgetSource::Analytic});
    entries.push_back({"microwave leakage", kLeakageLimitSeconds, BudgetSource::Recorded});
    entries.push_back({"T1 lifetime", kT1LimitSeconds, BudgetSource::Recorded});

    std::stable_sort(entries.begin(), entries.end(),
                     [](const BudgetEntry& a, const BudgetEntry& b) {
                         if (a.limit_s != b.limit_s) return a.limit_s < b.limit_s;
                         return a.mechanism < b.mechanism;
                     });
    return entries;
}

double mc_hopping_limit(double t_phi_s, double hopping_rate_hz, double tau_s,
                        long trajectories, uint64_t master_seed, EngineKind engine) {
    NoiseConfig cfg;
    cfg.engine = engine;
    cfg.hopping.rate = hopping_rate_hz;
    cfg.t_phi_override = t_phi_s;
    cfg.pulse_errors = PulseErrorModel{0.0, 0.0};

    // Grid spanning roughly one expected e-folding keeps the fit well posed.
    const double ratio = 2.0 * pi * tau_s / t_phi_s;
    const double t_est = ratio < 1.0
                             ? hop_oracle_slow_1e_time(hopping_rate_hz, tau_s, t_phi_s)
                             : 1.0 / hopping_rate_hz;
    const double horizon = std::clamp(t_est, 20.0 * tau_s, 3e5);
    CurveRequest req;
    req.tau = tau_s;
    req.mode = CurveMode::Expectation;
    req.initial_state = InitialState::RhoP;
    req.shots = trajectories;
    req.master_seed = master_seed;
    const int n_points = 16;
    for (int k = 1; k <= n_points; ++k) {
        double t = horizon * k / n_points;
        t = std::round(t / (2.0 * tau_s)) * 2.0 * tau_s;  // multiple of 2 tau
        if (t <= 0) t = 2.0 * tau_s;
        if (req.times.empty() || t > req.times.back()) req.times.push_back(t);
    }

    const ContrastCurve curve = contrast_curve(req, cfg);
    CoherenceOptions options;
    options.amplitude_anchor = 0.5;
    options.fix_offset = true;
    const CoherenceFit fit = coherence_time(curve, options);
    if (!fit.converged)
        throw std::runtime_error("mc_hopping_limit: coherence fit did not converge");
    return fit.time;
}

}  // namespace dfs
