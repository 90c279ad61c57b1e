// scenario.hpp — Pipelines over a configuration: oracle / analytic / compare
// runs, parameter sweeps, CSV emission.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ohe/config.hpp"
#include "ohe/lindblad.hpp"
#include "ohe/thermo.hpp"

namespace ohe::scenario {

// Trajectory-normalized maximum deviation: max_i |a_i - b_i| / max(eps, max_i |a_i|).
double relative_deviation(const std::vector<double>& reference, const std::vector<double>& other);

struct CompareReport {
    double dev_energy = 0.0;
    double dev_entropy = 0.0;
    double dev_w_max = 0.0;
    double dev_t_m = 0.0;
    double dev_amplitude = 0.0; // |<M>| against the analytic decay law
};

struct StateRun {
    std::string label;
    std::optional<thermo::WorkLedger> oracle;
    std::optional<thermo::WorkLedger> analytic;
    std::optional<CompareReport> compare;
    // oracle diagnostics
    double max_trace_err = 0.0;
    double max_top_pop_o = 0.0;
    double max_top_pop_m = 0.0;
    std::size_t rhs_evals = 0;
    // oracle moment series (for drift/diffusion fits)
    std::vector<double> times;
    std::vector<std::complex<double>> amplitude;
    std::vector<double> occupation;
};

struct RunArtifacts {
    config::ScenarioConfig cfg;
    baths::EngineRates rates;
    baths::RegimeMargins margins; // from the worst sample actually reached
    std::vector<std::string> warnings;
    std::vector<StateRun> runs;
};

// Executes the configured pipeline for every state entry.
RunArtifacts run_scenario(const config::ScenarioConfig& cfg);

// Writes per-state CSV ledgers (schema:
// t,E_M,S_M,W_max,W_unitary,T_M,J_h,J_c,P_max,eta,spohn_slack), compare CSVs,
// and a text summary. Returns the list of files written.
std::vector<std::string> write_artifacts(const RunArtifacts& art, const std::string& out_dir);

std::string summary_text(const RunArtifacts& art);

struct SweepRow {
    double value = 0.0;
    double gamma = 0.0;
    double d = 0.0;
    double n_o = 0.0;
    double peak_eta = 0.0;
    double beyond_carnot_duration = 0.0;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepRow> rows;
};

// One analytic run per axis value (first state entry), worker-pool parallel,
// merged in value order. Throws if `axis` is not a sweepable scalar key.
SweepResult sweep(const config::ScenarioConfig& cfg, const std::string& axis,
                  const std::vector<double>& values);

std::vector<std::string> write_sweep(const SweepResult& res, const std::string& out_dir);

// Full round-trip precision float formatting used by all CSV writers.
std::string format_double(double v);

} // namespace ohe::scenario
