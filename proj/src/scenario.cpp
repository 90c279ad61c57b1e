#include "ohe/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ohe/phasespace.hpp"

namespace ohe::scenario {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double relative_deviation(const std::vector<double>& reference, const std::vector<double>& other) {
    if (reference.size() != other.size())
        throw std::invalid_argument("relative_deviation: length mismatch");
    double scale = 0.0, dev = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        scale = std::max(scale, std::abs(reference[i]));
        dev = std::max(dev, std::abs(reference[i] - other[i]));
    }
    return dev / std::max(scale, 1e-300);
}

namespace {

phasespace::PhaseEnsemble to_ensemble(const hilbert::StateSpec& spec) {
    using Kind = hilbert::StateSpec::Kind;
    switch (spec.kind) {
    case Kind::coherent:
        return phasespace::PhaseEnsemble::coherent(spec.beta, spec.omega);
    case Kind::thermal:
        return phasespace::PhaseEnsemble::thermal(spec.nbar, spec.omega);
    case Kind::phase_averaged_coherent:
        return phasespace::PhaseEnsemble::phase_averaged(spec.radius, 0.0, spec.omega);
    case Kind::mixture: {
        std::vector<std::pair<double, phasespace::GaussianPhaseState>> parts;
        for (const auto& [w, sub] : spec.components) {
            if (sub.kind == Kind::coherent) {
                parts.emplace_back(w, phasespace::GaussianPhaseState{sub.beta, 0.0, sub.omega});
            } else if (sub.kind == Kind::thermal) {
                parts.emplace_back(w,
                                   phasespace::GaussianPhaseState{{0.0, 0.0}, sub.nbar, sub.omega});
            } else {
                throw std::invalid_argument(
                    "analytic pipeline: mixture components must be coherent or thermal "
                    "(other states have no nonnegative P representation; use the oracle)");
            }
        }
        return phasespace::PhaseEnsemble::mixture(std::move(parts), spec.omega);
    }
    case Kind::fock:
        throw std::invalid_argument(
            "analytic pipeline: a Fock state has no nonnegative P representation; "
            "use the oracle pipeline");
    }
    throw std::invalid_argument("to_ensemble: unknown state kind");
}

std::vector<double> column(const thermo::WorkLedger& l, double thermo::LedgerRow::*field) {
    std::vector<double> v;
    v.reserve(l.rows.size());
    for (const auto& r : l.rows) v.push_back(r.*field);
    return v;
}

bool p_representable(const hilbert::StateSpec& spec) {
    using Kind = hilbert::StateSpec::Kind;
    switch (spec.kind) {
    case Kind::coherent:
    case Kind::thermal:
    case Kind::phase_averaged_coherent:
        return true;
    case Kind::fock:
        return false;
    case Kind::mixture:
        for (const auto& [w, sub] : spec.components) {
            if (sub.kind != Kind::coherent && sub.kind != Kind::thermal) return false;
        }
        return true;
    }
    return false;
}

StateRun run_state(const config::ScenarioConfig& cfg, const config::StateEntry& entry,
                   const baths::EngineRates& rates, std::vector<std::string>& warnings) {
    StateRun run;
    run.label = entry.label;
    const auto grid = cfg.time_grid();
    const bool want_oracle = cfg.pipeline != config::Pipeline::analytic;
    bool want_analytic = cfg.pipeline != config::Pipeline::oracle;
    if (want_analytic && cfg.pipeline == config::Pipeline::compare &&
        !p_representable(entry.spec)) {
        // Fock-family states have no nonnegative P function: compare runs keep
        // the oracle leg only
        warnings.push_back("state `" + entry.label +
                           "` has no nonnegative P representation; compare keeps the oracle only");
        want_analytic = false;
    }

    if (want_oracle) {
        const auto gens = lindblad::build_generators(cfg.params, cfg.dim_o, cfg.dim_m);
        const auto joint = lindblad::make_joint(cfg.params, entry.spec, cfg.dim_o, cfg.dim_m);
        const auto traj = lindblad::evolve(joint, gens, grid);
        run.oracle = thermo::build_ledger(traj, gens, cfg.params);
        run.max_trace_err = traj.max_trace_err;
        run.max_top_pop_o = traj.max_top_pop_o;
        run.max_top_pop_m = traj.max_top_pop_m;
        run.rhs_evals = traj.rhs_evals;
        run.times = traj.times;
        for (const auto& s : traj.states) {
            const auto m = lindblad::reduced_M(s, cfg.params.omega_m);
            run.amplitude.push_back(hilbert::mean_amplitude(m));
            run.occupation.push_back(hilbert::mean_occupation(m));
        }
        if (traj.max_top_pop_o > 1e-6 || traj.max_top_pop_m > 1e-6) {
            std::ostringstream os;
            os << "state `" << entry.label << "`: top Fock-level population reached "
               << std::max(traj.max_top_pop_o, traj.max_top_pop_m)
               << " (> 1e-6); raise dims.dim_o/dims.dim_m";
            warnings.push_back(os.str());
        }
    }
    if (want_analytic) {
        run.analytic = thermo::build_ledger(to_ensemble(entry.spec), rates, cfg.params, grid);
    }
    if (want_oracle && want_analytic) {
        CompareReport cmp;
        cmp.dev_energy = relative_deviation(column(*run.oracle, &thermo::LedgerRow::e_m),
                                            column(*run.analytic, &thermo::LedgerRow::e_m));
        cmp.dev_entropy = relative_deviation(column(*run.oracle, &thermo::LedgerRow::s_m),
                                             column(*run.analytic, &thermo::LedgerRow::s_m));
        cmp.dev_w_max = relative_deviation(column(*run.oracle, &thermo::LedgerRow::w_max),
                                           column(*run.analytic, &thermo::LedgerRow::w_max));
        cmp.dev_t_m = relative_deviation(column(*run.oracle, &thermo::LedgerRow::t_m),
                                         column(*run.analytic, &thermo::LedgerRow::t_m));
        // amplitude against the analytic decay law |<M>| e^{-(gamma+Gamma_M)t/2}
        std::vector<double> osc_amp, ana_amp;
        const auto ens0 = to_ensemble(entry.spec);
        for (std::size_t i = 0; i < run.times.size(); ++i) {
            osc_amp.push_back(std::abs(run.amplitude[i]));
            const auto ens = phasespace::propagate(ens0, {rates.drift(), rates.d}, run.times[i]);
            ana_amp.push_back(ens.kind == phasespace::PhaseEnsemble::Kind::gaussian
                                  ? std::abs(ens.gaussian.mean)
                                  : 0.0);
        }
        cmp.dev_amplitude = relative_deviation(osc_amp, ana_amp);
        run.compare = cmp;
    }
    return run;
}

} // namespace

RunArtifacts run_scenario(const config::ScenarioConfig& cfg) {
    RunArtifacts art;
    art.cfg = cfg;
    art.rates = baths::engine_rates(cfg.params);

    for (const auto& entry : cfg.states) {
        art.runs.push_back(run_state(cfg, entry, art.rates, art.warnings));
    }

    // regime margins from the largest mechanical occupation actually reported
    double max_n = 0.0;
    for (const auto& run : art.runs) {
        for (const auto* ledger : {run.oracle ? &*run.oracle : nullptr,
                                   run.analytic ? &*run.analytic : nullptr}) {
            if (!ledger) continue;
            for (const auto& row : ledger->rows) {
                max_n = std::max(max_n, row.e_m / cfg.params.omega_m);
            }
        }
    }
    art.margins = baths::regime_margins(cfg.params, max_n, cfg.t_end);
    if (!art.margins.in_regime()) {
        std::ostringstream os;
        os << "linear-regime margins exceeded: (g/Omega_M)^2 max<n_M> = "
           << art.margins.weak_coupling << ", (g^2/Omega_M)<n_O>^2 t_end = "
           << art.margins.quasi_steady << " (limit 0.1 each)";
        art.warnings.push_back(os.str());
    }
    return art;
}

namespace {

void write_ledger_csv(const thermo::WorkLedger& l, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,E_M,S_M,W_max,W_unitary,T_M,J_h,J_c,P_max,eta,spohn_slack\n";
    for (const auto& r : l.rows) {
        out << format_double(r.t) << ',' << format_double(r.e_m) << ',' << format_double(r.s_m)
            << ',' << format_double(r.w_max) << ',' << format_double(r.w_unitary) << ','
            << format_double(r.t_m) << ',' << format_double(r.j_h) << ',' << format_double(r.j_c)
            << ',' << format_double(r.p_max) << ',' << format_double(r.eta) << ','
            << format_double(r.spohn_slack) << '\n';
    }
}

} // namespace

std::string summary_text(const RunArtifacts& art) {
    std::ostringstream os;
    const auto& r = art.rates;
    os << "scenario: " << art.cfg.name << "\n";
    os << "rates: gamma = " << format_double(r.gamma) << ", d = " << format_double(r.d)
       << ", Gamma_M = " << format_double(r.gamma_m) << ", d_M = " << format_double(r.d_m)
       << ", n_O = " << format_double(r.n_o) << (r.gain() ? "  [gain]" : "  [no gain]") << "\n";
    os << "regime margins: weak-coupling " << format_double(art.margins.weak_coupling)
       << ", quasi-steady " << format_double(art.margins.quasi_steady) << "\n";
    for (const auto& run : art.runs) {
        os << "state " << run.label << ":";
        const thermo::WorkLedger* ledger =
            run.oracle ? &*run.oracle : (run.analytic ? &*run.analytic : nullptr);
        if (ledger && !ledger->rows.empty()) {
            const auto spohn = thermo::spohn_check(*ledger);
            double peak_eta = 0.0, beyond = 0.0;
            for (std::size_t i = 0; i < ledger->rows.size(); ++i) {
                const auto& row = ledger->rows[i];
                if (std::isfinite(row.eta)) peak_eta = std::max(peak_eta, row.eta);
                if (i + 1 < ledger->rows.size() && row.t_m < ledger->t_c) {
                    beyond += ledger->rows[i + 1].t - row.t;
                }
            }
            os << " dW_max = " << format_double(ledger->rows.back().w_max - ledger->rows.front().w_max)
               << ", peak eta = " << format_double(peak_eta)
               << ", spohn min slack = " << format_double(spohn.min_slack)
               << (spohn.pass ? " (pass)" : " (FAIL)");
        }
        if (run.compare) {
            os << "; compare dev: E " << format_double(run.compare->dev_energy) << ", S "
               << format_double(run.compare->dev_entropy) << ", W_max "
               << format_double(run.compare->dev_w_max) << ", T_M "
               << format_double(run.compare->dev_t_m) << ", |<M>| "
               << format_double(run.compare->dev_amplitude);
        }
        os << "\n";
    }
    for (const auto& w : art.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::vector<std::string> write_artifacts(const RunArtifacts& art, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<std::string> files;
    for (const auto& run : art.runs) {
        if (run.analytic) {
            const std::string p = out_dir + "/analytic_" + run.label + ".csv";
            write_ledger_csv(*run.analytic, p);
            files.push_back(p);
        }
        if (run.oracle) {
            const std::string p = out_dir + "/oracle_" + run.label + ".csv";
            write_ledger_csv(*run.oracle, p);
            files.push_back(p);
        }
        if (run.compare) {
            const std::string p = out_dir + "/compare_" + run.label + ".csv";
            std::ofstream out(p);
            if (!out) throw std::runtime_error("cannot write " + p);
            out << "observable,relative_deviation\n";
            out << "E_M," << format_double(run.compare->dev_energy) << '\n';
            out << "S_M," << format_double(run.compare->dev_entropy) << '\n';
            out << "W_max," << format_double(run.compare->dev_w_max) << '\n';
            out << "T_M," << format_double(run.compare->dev_t_m) << '\n';
            out << "amp," << format_double(run.compare->dev_amplitude) << '\n';
            files.push_back(p);
        }
    }
    const std::string sp = out_dir + "/summary.txt";
    std::ofstream out(sp);
    out << summary_text(art);
    files.push_back(sp);
    return files;
}

SweepResult sweep(const config::ScenarioConfig& cfg, const std::string& axis,
                  const std::vector<double>& values) {
    if (!config::is_scalar_key(axis))
        throw std::invalid_argument("sweep: `" + axis + "` is not a sweepable scalar config key");
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");

    auto run_point = [&](double value) {
        auto kv = cfg.raw;
        kv[axis] = format_double(value);
        auto point_cfg = config::config_from_map(kv, cfg.name);
        point_cfg.pipeline = config::Pipeline::analytic; // sweep rows are analytic summaries
        point_cfg.states.resize(1);

        SweepRow row;
        row.value = value;
        const auto rates = baths::engine_rates(point_cfg.params);
        row.gamma = rates.gamma;
        row.d = rates.d;
        row.n_o = rates.n_o;
        const auto ledger = thermo::build_ledger(
            to_ensemble(point_cfg.states.front().spec), rates, point_cfg.params,
            point_cfg.time_grid());
        for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
            const auto& r = ledger.rows[i];
            if (std::isfinite(r.eta)) row.peak_eta = std::max(row.peak_eta, r.eta);
            if (i + 1 < ledger.rows.size() && r.t_m < ledger.t_c) {
                row.beyond_carnot_duration += ledger.rows[i + 1].t - r.t;
            }
        }
        return row;
    };

    // worker pool; results merged in value order
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                       values.size()));
    SweepResult res;
    res.axis = axis;
    res.rows.resize(values.size());
    std::vector<std::future<void>> tasks;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w) {
        tasks.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= values.size()) return;
                res.rows[i] = run_point(values[i]);
            }
        }));
    }
    for (auto& t : tasks) t.get();
    return res;
}

std::vector<std::string> write_sweep(const SweepResult& res, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string p = out_dir + "/sweep.csv";
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p);
    out << "value,gamma,d,n_O,peak_eta,beyond_carnot_duration\n";
    for (const auto& r : res.rows) {
        out << format_double(r.value) << ',' << format_double(r.gamma) << ','
            << format_double(r.d) << ',' << format_double(r.n_o) << ','
            << format_double(r.peak_eta) << ',' << format_double(r.beyond_carnot_duration)
            << '\n';
    }
    return {p};
}

} // namespace ohe::scenario
