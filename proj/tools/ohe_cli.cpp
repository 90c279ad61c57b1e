// ohe_cli.cpp — scenario runner: rates / run / sweep / compare over flat
// key-value configs, emitting plot-ready CSV time series.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "ohe/baths.hpp"
#include "ohe/config.hpp"
#include "ohe/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitRegime = 4;

struct CommonOpts {
    std::string config;
    std::string out_dir = "out";
    bool strict = false;
    long seed = -1;
    long dim_o = -1;
    long dim_m = -1;
};

ohe::config::ScenarioConfig load(const CommonOpts& opts) {
    auto cfg = ohe::config::load_config(opts.config);
    if (opts.seed >= 0) cfg.seed = static_cast<unsigned long>(opts.seed);
    if (opts.dim_o >= 2) cfg.dim_o = static_cast<std::size_t>(opts.dim_o);
    if (opts.dim_m >= 2) cfg.dim_m = static_cast<std::size_t>(opts.dim_m);
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config, "config file path or bundled name")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--strict", opts.strict, "treat regime warnings as errors (exit 4)");
    cmd->add_option("--seed", opts.seed, "seed recorded with the run");
    cmd->add_option("--dim-o", opts.dim_o, "override optical truncation");
    cmd->add_option("--dim-m", opts.dim_m, "override mechanical truncation");
}

int finish_run(const ohe::scenario::RunArtifacts& art, const CommonOpts& opts) {
    const auto files = ohe::scenario::write_artifacts(art, opts.out_dir);
    std::cout << ohe::scenario::summary_text(art);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    if (opts.strict && !art.warnings.empty()) {
        std::cerr << "strict mode: regime warnings present\n";
        return kExitRegime;
    }
    return kExitOk;
}

int cmd_rates(const CommonOpts& opts) {
    const auto cfg = load(opts);
    const auto rates = ohe::baths::engine_rates(cfg.params);
    const auto full = ohe::baths::gamma_full(cfg.params);
    using ohe::scenario::format_double;
    std::cout << "scenario: " << cfg.name << "\n";
    std::cout << "gamma   = " << format_double(rates.gamma) << "\n";
    std::cout << "d       = " << format_double(rates.d) << "\n";
    std::cout << "Gamma_M = " << format_double(rates.gamma_m) << "\n";
    std::cout << "d_M     = " << format_double(rates.d_m) << "\n";
    std::cout << "n_O     = " << format_double(rates.n_o) << "\n";
    std::cout << "gamma + Gamma_M = " << format_double(rates.drift())
              << (rates.gain() ? "  [gain]" : "  [no gain]") << "\n";
    std::cout << "harmonic samples (hot/cold):\n";
    const char* names[6] = {"G(w0)", "G(-w0)", "G(w+)", "G(-w+)", "G(w-)", "G(-w-)"};
    for (int i = 0; i < 6; ++i) {
        std::cout << "  " << names[i] << " = " << format_double(rates.harmonics.g[0][i]) << " / "
                  << format_double(rates.harmonics.g[1][i]) << "\n";
    }
    std::cout << "full gamma decomposition (total " << format_double(full.total) << "):\n";
    for (const auto& t : full.terms) {
        std::cout << "  " << t.label << " = " << format_double(t.value)
                  << (t.may_be_negative ? "  [may be negative]" : "") << "\n";
    }
    return kExitOk;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"autonomous optomechanical heat-engine simulator"};
    app.require_subcommand(1);

    CommonOpts rates_opts, run_opts, sweep_opts, compare_opts;
    std::string sweep_axis, sweep_values;

    add_common(app.add_subcommand("rates", "print engine rates and the gamma decomposition"),
               rates_opts);
    add_common(app.add_subcommand("run", "run the configured pipeline"), run_opts);
    auto* sweep_cmd = app.add_subcommand("sweep", "sweep one scalar config key");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", sweep_axis, "dotted config key to sweep")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();
    add_common(app.add_subcommand("compare", "run both pipelines and report deviations"),
               compare_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("rates")) return cmd_rates(rates_opts);
        if (app.got_subcommand("run")) {
            const auto cfg = load(run_opts);
            return finish_run(ohe::scenario::run_scenario(cfg), run_opts);
        }
        if (app.got_subcommand("compare")) {
            auto cfg = load(compare_opts);
            cfg.pipeline = ohe::config::Pipeline::compare;
            return finish_run(ohe::scenario::run_scenario(cfg), compare_opts);
        }
        if (app.got_subcommand("sweep")) {
            const auto cfg = load(sweep_opts);
            const auto values = parse_values(sweep_values);
            const auto res = ohe::scenario::sweep(cfg, sweep_axis, values);
            const auto files = ohe::scenario::write_sweep(res, sweep_opts.out_dir);
            for (const auto& f : files) std::cout << "wrote " << f << "\n";
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
