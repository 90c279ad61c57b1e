#include "ohe/thermo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ohe::thermo {

double max_power(double de_dt, double ds_dt, double t_m) {
    if (t_m < 0.0) throw std::invalid_argument("max_power: T_M must be >= 0");
    return de_dt - t_m * ds_dt;
}

double entropy_rate_low_t(double occupation, std::complex<double> amplitude, double gamma,
                          double gamma_m, double d) {
    const double variance = occupation - std::norm(amplitude);
    return (gamma + gamma_m + 2.0 * d) * variance + d;
}

EfficiencyReport efficiency(double p_max, double j_h, double t_m, double t_h, double t_c) {
    EfficiencyReport r;
    r.carnot_two_bath = 1.0 - t_c / t_h;
    r.carnot_effective = 1.0 - t_m / t_h;
    r.beyond_carnot = t_m < t_c;
    if (j_h <= 0.0) {
        r.engine_mode = false;
        r.eta = std::numeric_limits<double>::quiet_NaN();
        r.beyond_carnot = false;
        return r;
    }
    r.engine_mode = true;
    r.eta = p_max / j_h;
    r.bound_violated = r.eta > r.carnot_effective + 1e-6;
    return r;
}

SpohnResult spohn_check(const WorkLedger& ledger) {
    SpohnResult out;
    out.min_slack = std::numeric_limits<double>::infinity();
    for (const auto& row : ledger.rows) out.min_slack = std::min(out.min_slack, row.spohn_slack);
    out.pass = out.min_slack >= -1e-6;
    return out;
}

AnalyticCurrents analytic_heat_currents(const baths::EngineParams& p, double n_m) {
    const auto h = baths::sample_harmonics(p);
    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double w0 = p.omega_o, wp = p.omega_plus(), wm = p.omega_minus();

    const double n_o = baths::quasi_steady_occupation(p, n_m);

    AnalyticCurrents out;
    out.n_o_effective = n_o;
    for (int j = 0; j < 2; ++j) {
        const double jq0 = w0 * (h.g[j][1] * (n_o + 1.0) - h.g[j][0] * n_o);
        const double jqp =
            wp * k * (h.g[j][3] * (n_o + 1.0) * (n_m + 1.0) - h.g[j][2] * n_o * n_m);
        const double jqm =
            wm * k * (h.g[j][5] * (n_o + 1.0) * n_m - h.g[j][4] * n_o * (n_m + 1.0));
        const double jj = jq0 + jqp + jqm;
        if (j == 0) out.j_h = jj;
        else out.j_c = jj;
    }
    out.j_phonon = p.omega_m * p.gamma_m * (p.n_m_th - n_m);
    return out;
}

namespace {

// Centered finite differences on a (possibly non-uniform) grid; one-sided at
// the ends.
std::vector<double> grid_derivative(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> dy(n, 0.0);
    if (n < 2) return dy;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            dy[i] = (y[1] - y[0]) / (t[1] - t[0]);
        } else if (i + 1 == n) {
            dy[i] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
        } else {
            // three-point formula, exact for parabolas on non-uniform grids
            const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
            dy[i] = (y[i + 1] * h1 * h1 - y[i - 1] * h2 * h2 +
                     y[i] * (h2 * h2 - h1 * h1)) /
                    (h1 * h2 * (h1 + h2));
        }
    }
    return dy;
}

void finish_rows(WorkLedger& ledger, const std::vector<double>& times,
                 const std::vector<double>& energy, const std::vector<double>& entropy) {
    const auto de = grid_derivative(times, energy);
    const auto ds = grid_derivative(times, entropy);
    for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
        auto& row = ledger.rows[i];
        row.p_max = max_power(de[i], ds[i], row.t_m);
        const auto rep = efficiency(row.p_max, row.j_h, row.t_m, ledger.t_h, ledger.t_c);
        row.eta = rep.eta;
        row.spohn_slack = ds[i] - row.j_h / ledger.t_h - row.j_c / ledger.t_c;
    }
}

} // namespace

WorkLedger build_ledger(const lindblad::EvolveResult& traj, const lindblad::GeneratorSet& gens,
                        const baths::EngineParams& p) {
    if (traj.states.empty()) throw std::invalid_argument("build_ledger: empty trajectory");
    WorkLedger ledger;
    ledger.t_h = p.hot.temperature;
    ledger.t_c = p.cold.temperature;
    ledger.rows.resize(traj.states.size());

    std::vector<double> energy(traj.states.size()), entropy(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto m = lindblad::reduced_M(traj.states[i], p.omega_m);
        auto& row = ledger.rows[i];
        row.t = traj.times[i];
        row.e_m = hilbert::mean_energy(m);
        row.s_m = hilbert::von_neumann_entropy(m);
        row.w_unitary = hilbert::ergotropy(m);
        const auto gibbs = hilbert::gibbs_equivalent(m);
        row.w_max = row.e_m - hilbert::mean_energy(gibbs.state);
        row.t_m = gibbs.temperature;
        const auto j = lindblad::heat_currents(traj.states[i], gens);
        row.j_h = j.hot;
        row.j_c = j.cold;
        row.j_phonon = j.phonon;
        energy[i] = row.e_m;
        entropy[i] = row.s_m;
    }
    finish_rows(ledger, traj.times, energy, entropy);
    return ledger;
}

WorkLedger build_ledger(const phasespace::PhaseEnsemble& initial, const baths::EngineRates& rates,
                        const baths::EngineParams& p, const std::vector<double>& t_grid,
                        const LedgerOptions& opt) {
    if (t_grid.empty()) throw std::invalid_argument("build_ledger: empty time grid");
    WorkLedger ledger;
    ledger.t_h = p.hot.temperature;
    ledger.t_c = p.cold.temperature;
    ledger.rows.resize(t_grid.size());

    const phasespace::OUFlow flow{rates.drift(), rates.d};
    std::vector<double> energy(t_grid.size()), entropy(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const auto ens = phasespace::propagate(initial, flow, t_grid[i] - t_grid.front());
        auto& row = ledger.rows[i];
        row.t = t_grid[i];
        row.e_m = phasespace::mean_energy(ens);
        const auto fock = phasespace::to_fock(ens, opt.fock_dim);
        row.s_m = hilbert::von_neumann_entropy(fock);
        row.w_unitary = hilbert::ergotropy(fock);
        const auto gibbs = hilbert::gibbs_equivalent(fock);
        row.w_max = hilbert::mean_energy(fock) - hilbert::mean_energy(gibbs.state);
        row.t_m = gibbs.temperature;
        const auto j = analytic_heat_currents(p, phasespace::mean_occupation(ens));
        row.j_h = j.j_h;
        row.j_c = j.j_c;
        row.j_phonon = j.j_phonon;
        energy[i] = row.e_m;
        entropy[i] = row.s_m;
    }
    finish_rows(ledger, t_grid, energy, entropy);
    return ledger;
}

} // namespace ohe::thermo
