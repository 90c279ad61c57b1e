// thermo.hpp — Power and efficiency bounds, entropy production, Spohn's
// inequality, and the work ledger assembled over a trajectory.

#pragma once

#include <cstddef>
#include <vector>

#include "ohe/baths.hpp"
#include "ohe/fock.hpp"
#include "ohe/lindblad.hpp"
#include "ohe/phasespace.hpp"

namespace ohe::thermo {

struct LedgerRow {
    double t = 0.0;
    double e_m = 0.0;       // mean mechanical energy
    double s_m = 0.0;       // von Neumann entropy
    double w_max = 0.0;     // bound ergotropy (equal-entropy Gibbs reference)
    double w_unitary = 0.0; // ergotropy (spectrum-preserving reference)
    double t_m = 0.0;       // effective temperature of the Gibbs equivalent
    double j_h = 0.0;
    double j_c = 0.0;
    double j_phonon = 0.0;  // not part of the CSV schema, kept for diagnostics
    double p_max = 0.0;     // dE/dt - T_M dS/dt
    double eta = 0.0;       // NaN outside engine mode (J_h <= 0)
    double spohn_slack = 0.0; // dS/dt - J_h/T_h - J_c/T_c
};

struct WorkLedger {
    double t_h = 0.0;
    double t_c = 0.0;
    std::vector<LedgerRow> rows;
};

// (dW/dt)_Max = dE/dt - T_M dS/dt.
double max_power(double de_dt, double ds_dt, double t_m);

// Low-temperature entropy-rate approximation
//   dS/dt ~= (gamma + Gamma_M + 2d)(<M†M> - |<M>|^2) + d.
double entropy_rate_low_t(double occupation, std::complex<double> amplitude, double gamma,
                          double gamma_m, double d);

struct EfficiencyReport {
    bool engine_mode = false;    // J_h > 0
    double eta = 0.0;            // meaningful only in engine mode
    double carnot_two_bath = 0.0;   // 1 - T_c/T_h
    double carnot_effective = 0.0;  // 1 - T_M/T_h
    bool beyond_carnot = false;     // T_M < T_c
    bool bound_violated = false;    // eta > 1 - T_M/T_h + 1e-6 (flagged, not thrown)
};

EfficiencyReport efficiency(double p_max, double j_h, double t_m, double t_h, double t_c);

struct SpohnResult {
    double min_slack = 0.0;
    bool pass = false; // min slack >= -1e-6
};

SpohnResult spohn_check(const WorkLedger& ledger);

// ---------------------------- analytic heat currents -------------------------
//
// Generator-decomposition attribution at the quasi-steady optical state. The
// optical occupation n_O* solves dn_O/dt = 0 including the q = ±1 pump at the
// current mechanical occupation n_M (product-state factorization):
//   up(n_O+1) = down n_O,
//   up   = G(-w0) + k [G(-w+)(n_M+1) + G(-w-) n_M]
//   down = G(w0)  + k [G(w+) n_M     + G(w-)(n_M+1)],  k = (g/Omega_M)^2.
// Each channel then contributes (quantum energy) x (event rate):
//   J_j = w0 [G_j(-w0)(n_O+1) - G_j(w0) n_O]
//       + w+ k [G_j(-w+)(n_O+1)(n_M+1) - G_j(w+) n_O n_M]
//       + w- k [G_j(-w-)(n_O+1) n_M    - G_j(w-) n_O (n_M+1)].
struct AnalyticCurrents {
    double j_h = 0.0;
    double j_c = 0.0;
    double j_phonon = 0.0;
    double n_o_effective = 0.0;
};

AnalyticCurrents analytic_heat_currents(const baths::EngineParams& p, double n_m);

// ------------------------------- ledger builders ----------------------------

struct LedgerOptions {
    std::size_t fock_dim = 0;   // analytic path: 0 picks the truncation rule
    bool acceptance_strict = false;
};

// From a Lindblad oracle trajectory: state-derived thermodynamics plus exact
// generator-trace heat currents. Entropy/energy rates via centered finite
// differences on the sample grid.
WorkLedger build_ledger(const lindblad::EvolveResult& traj, const lindblad::GeneratorSet& gens,
                        const baths::EngineParams& p);

// From the analytic phase-space path: Ornstein-Uhlenbeck propagation of the
// initial ensemble with rates (gamma + Gamma_M, d), Fock conversion for the
// entropic quantities, and the closed-form currents above.
WorkLedger build_ledger(const phasespace::PhaseEnsemble& initial, const baths::EngineRates& rates,
                        const baths::EngineParams& p, const std::vector<double>& t_grid,
                        const LedgerOptions& opt = {});

} // namespace ohe::thermo
