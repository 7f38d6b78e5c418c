#pragma once

#include <string>
#include <vector>

#include "dfs/monte_carlo.hpp"

// Coherence-limit budget: one entry per decoherence mechanism, sorted from
// most to least detrimental (ascending limit).

namespace dfs {

enum class BudgetSource { Analytic, MonteCarlo, Recorded };

struct BudgetEntry {
    std::string mechanism;
    double limit_s = 0.0;
    BudgetSource source = BudgetSource::Analytic;
};

struct BudgetInputs {
    double mc_hopping_limit_s;       // fitted MC coherence time, hopping + gradient
    double t_zeeman_s = 145.0;       // measured Zeeman-probe decay time
    double b_field_gauss = 4.1;
    std::vector<ScatterBeam> beams;  // defaults to the two coolant beams
    double epsilon_rms = 1.7e-3;
    double tau_s = 100.0;
    PhysicalConstants constants;
};

// Assembles and ranks the budget. Ties break by mechanism label.
std::vector<BudgetEntry> budget_report(const BudgetInputs& inputs);

std::string budget_source_name(BudgetSource source);

// Fitted coherence time of a gradient + hopping Monte Carlo run, used for the
// budget's hopping entry.
double mc_hopping_limit(double t_phi_s, double hopping_rate_hz, double tau_s,
                        long trajectories, uint64_t master_seed,
                        EngineKind engine = EngineKind::PhaseOnly);

}  // namespace dfs
