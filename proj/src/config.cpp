#include "ohe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ohe::config {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::map<std::string, std::string> tokenize(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("line " + std::to_string(lineno) + ": expected `key = value`, got `" + line + "`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            fail("line " + std::to_string(lineno) + ": empty key or value");
        }
        if (kv.count(key)) fail("duplicate key `" + key + "`");
        kv[key] = val;
    }
    return kv;
}

struct Reader {
    const std::map<std::string, std::string>& kv;
    std::set<std::string> used;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string str(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) fail("missing key `" + key + "`");
        used.insert(key);
        return it->second;
    }

    std::string str_or(const std::string& key, const std::string& def) {
        return has(key) ? str(key) : def;
    }

    double num(const std::string& key) {
        const std::string v = str(key);
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &pos);
        } catch (const std::exception&) {
            fail("key `" + key + "`: `" + v + "` is not a number");
        }
        if (pos != v.size()) fail("key `" + key + "`: trailing characters in `" + v + "`");
        return out;
    }

    double num_or(const std::string& key, double def) { return has(key) ? num(key) : def; }

    long integer(const std::string& key) {
        const double v = num(key);
        if (v != std::floor(v)) fail("key `" + key + "`: expected an integer");
        return static_cast<long>(v);
    }

    long integer_or(const std::string& key, long def) {
        return has(key) ? integer(key) : def;
    }

    std::vector<double> num_list(const std::string& key) {
        std::istringstream in(str(key));
        std::vector<double> out;
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("key `" + key + "`: empty list item");
            out.push_back(std::stod(item));
        }
        if (out.empty()) fail("key `" + key + "`: empty list");
        return out;
    }

    void reject_unused() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : kv) {
            if (!used.count(k)) unknown.push_back(k);
        }
        if (!unknown.empty()) {
            std::string msg = "unknown keys:";
            for (const auto& k : unknown) msg += " `" + k + "`";
            fail(msg);
        }
    }
};

baths::Shape parse_shape(Reader& r, const std::string& prefix) {
    const std::string kind = r.str(prefix + ".shape");
    if (kind == "flat") {
        baths::FlatShape s;
        s.level = r.num(prefix + ".level");
        if (s.level < 0.0) fail(prefix + ".level must be >= 0");
        return s;
    }
    if (kind == "lorentzian") {
        baths::LorentzianShape s;
        s.center = r.num(prefix + ".center");
        s.width = r.num(prefix + ".width");
        s.peak = r.num(prefix + ".peak");
        if (s.width <= 0.0) fail(prefix + ".width must be > 0");
        if (s.peak < 0.0) fail(prefix + ".peak must be >= 0");
        return s;
    }
    if (kind == "band_stop") {
        baths::BandStopShape s;
        s.peak = r.num(prefix + ".peak");
        s.stop_lo = r.num(prefix + ".stop_lo");
        s.stop_hi = r.num(prefix + ".stop_hi");
        s.edge_width = r.num_or(prefix + ".edge_width", 2.0);
        if (s.peak < 0.0) fail(prefix + ".peak must be >= 0");
        if (s.stop_hi < s.stop_lo) fail(prefix + ": stop_hi must be >= stop_lo");
        if (s.edge_width <= 0.0) fail(prefix + ".edge_width must be > 0");
        return s;
    }
    if (kind == "tabulated") {
        baths::TabulatedShape s;
        s.omega = r.num_list(prefix + ".omegas");
        s.value = r.num_list(prefix + ".values");
        if (s.omega.size() != s.value.size())
            fail(prefix + ": omegas and values must have equal length");
        if (!std::is_sorted(s.omega.begin(), s.omega.end()))
            fail(prefix + ".omegas must be sorted ascending");
        for (double v : s.value) {
            if (v < 0.0) fail(prefix + ".values must be >= 0");
        }
        return s;
    }
    fail(prefix + ".shape: unknown shape `" + kind + "`");
}

hilbert::StateSpec parse_state(Reader& r, const std::string& prefix, double omega_m) {
    const std::string kind = r.str(prefix + ".kind");
    if (kind == "coherent") {
        return hilbert::StateSpec::coherent(
            {r.num(prefix + ".beta_re"), r.num_or(prefix + ".beta_im", 0.0)}, omega_m);
    }
    if (kind == "fock") {
        const long n = r.integer(prefix + ".n");
        if (n < 0) fail(prefix + ".n must be >= 0");
        return hilbert::StateSpec::fock(n, omega_m);
    }
    if (kind == "thermal") {
        const double nbar = r.num(prefix + ".nbar");
        if (nbar < 0.0) fail(prefix + ".nbar must be >= 0");
        return hilbert::StateSpec::thermal(nbar, omega_m);
    }
    if (kind == "phase_averaged") {
        const double radius = r.num(prefix + ".radius");
        if (radius < 0.0) fail(prefix + ".radius must be >= 0");
        return hilbert::StateSpec::phase_averaged(radius, omega_m);
    }
    if (kind == "mixture") {
        const long n = r.integer(prefix + ".ncomp");
        if (n < 1) fail(prefix + ".ncomp must be >= 1");
        std::vector<std::pair<double, hilbert::StateSpec>> parts;
        double wsum = 0.0;
        for (long i = 0; i < n; ++i) {
            const std::string cp = prefix + ".c" + std::to_string(i);
            const double w = r.num(cp + ".weight");
            if (w < 0.0) fail(cp + ".weight must be >= 0");
            wsum += w;
            parts.emplace_back(w, parse_state(r, cp, omega_m));
        }
        if (std::abs(wsum - 1.0) > 1e-9) fail(prefix + ": mixture weights must sum to 1");
        return hilbert::StateSpec::mixture(std::move(parts), omega_m);
    }
    fail(prefix + ".kind: unknown state kind `" + kind + "`");
}

} // namespace

std::vector<double> ScenarioConfig::time_grid() const {
    std::vector<double> t(samples);
    const double dt = samples > 1 ? t_end / static_cast<double>(samples - 1) : 0.0;
    for (std::size_t i = 0; i < samples; ++i) t[i] = dt * static_cast<double>(i);
    return t;
}

ScenarioConfig config_from_map(std::map<std::string, std::string> kv, const std::string& name) {
    Reader r{kv, {}};
    ScenarioConfig cfg;
    cfg.name = name;

    cfg.params.omega_o = r.num("engine.omega_o");
    cfg.params.omega_m = r.num("engine.omega_m");
    cfg.params.g = r.num("engine.g");
    cfg.params.gamma_m = r.num("engine.gamma_m");
    cfg.params.n_m_th = r.num_or("engine.n_m_th", 0.0);

    cfg.params.hot.label = baths::BathLabel::hot;
    cfg.params.hot.temperature = r.num("bath.hot.temperature");
    cfg.params.hot.shape = parse_shape(r, "bath.hot");
    cfg.params.cold.label = baths::BathLabel::cold;
    cfg.params.cold.temperature = r.num("bath.cold.temperature");
    cfg.params.cold.shape = parse_shape(r, "bath.cold");

    try {
        baths::validate(cfg.params);
    } catch (const std::exception& e) {
        fail(std::string("engine parameters: ") + e.what());
    }

    const long nstates = r.integer_or("state.count", 1);
    if (nstates < 1) fail("state.count must be >= 1");
    for (long i = 0; i < nstates; ++i) {
        const std::string prefix = "state." + std::to_string(i);
        StateEntry entry;
        entry.spec = parse_state(r, prefix, cfg.params.omega_m);
        entry.label = r.str_or(prefix + ".label", "state" + std::to_string(i));
        cfg.states.push_back(std::move(entry));
    }

    cfg.t_end = r.num("time.t_end");
    if (cfg.t_end <= 0.0) fail("time.t_end must be > 0");
    const long samples = r.integer("time.samples");
    if (samples < 2) fail("time.samples must be >= 2");
    cfg.samples = static_cast<std::size_t>(samples);

    const std::string pipe = r.str_or("pipeline", "analytic");
    if (pipe == "oracle") cfg.pipeline = Pipeline::oracle;
    else if (pipe == "analytic") cfg.pipeline = Pipeline::analytic;
    else if (pipe == "compare") cfg.pipeline = Pipeline::compare;
    else fail("pipeline must be oracle|analytic|compare, got `" + pipe + "`");

    const long dim_o = r.integer_or("dims.dim_o", 6);
    const long dim_m = r.integer_or("dims.dim_m", 20);
    if (dim_o < 2 || dim_m < 2) fail("dims must be >= 2");
    cfg.dim_o = static_cast<std::size_t>(dim_o);
    cfg.dim_m = static_cast<std::size_t>(dim_m);

    const long seed = r.integer_or("seed", 1);
    if (seed < 0) fail("seed must be >= 0");
    cfg.seed = static_cast<unsigned long>(seed);

    r.reject_unused();
    cfg.raw = std::move(kv);
    return cfg;
}

ScenarioConfig parse_config(const std::string& text, const std::string& name) {
    return config_from_map(tokenize(text), name);
}

bool is_scalar_key(const std::string& key) {
    static const std::set<std::string> scalar_prefixes = {
        "engine.omega_o", "engine.omega_m", "engine.g", "engine.gamma_m", "engine.n_m_th",
        "bath.hot.temperature", "bath.hot.peak", "bath.hot.level", "bath.hot.center",
        "bath.hot.width", "bath.hot.stop_lo", "bath.hot.stop_hi", "bath.hot.edge_width",
        "bath.cold.temperature", "bath.cold.peak", "bath.cold.level", "bath.cold.center",
        "bath.cold.width", "bath.cold.stop_lo", "bath.cold.stop_hi", "bath.cold.edge_width",
        "time.t_end"};
    if (scalar_prefixes.count(key)) return true;
    // per-state numeric fields are sweepable too
    if (key.rfind("state.", 0) == 0) {
        const auto tail = key.substr(key.find_last_of('.') + 1);
        return tail == "beta_re" || tail == "beta_im" || tail == "nbar" || tail == "radius";
    }
    return false;
}

// ------------------------------ bundled presets ------------------------------

namespace {

const std::map<std::string, std::string>& bundle() {
    static const std::map<std::string, std::string> b = {
        {"default_engine", R"(# default_engine — stop-band-filtered hot bath, narrow cold line,
# warm phonon environment; mechanical gain with a nonpassive launch window.
engine.omega_o = 6.0
engine.omega_m = 1.0
engine.g = 0.33333333333333331
engine.gamma_m = 0.00033333333333333332
engine.n_m_th = 70.0
bath.hot.temperature = 4.0
bath.hot.shape = band_stop
bath.hot.peak = 0.3
bath.hot.stop_lo = 0.0
bath.hot.stop_hi = 6.35
bath.hot.edge_width = 0.6
bath.cold.temperature = 2.4
bath.cold.shape = lorentzian
bath.cold.peak = 6.0
bath.cold.center = 6.0
bath.cold.width = 0.15
state.count = 1
state.0.label = coherent
state.0.kind = coherent
state.0.beta_re = 1.0
state.0.beta_im = 0.0
time.t_end = 250.0
time.samples = 251
pipeline = analytic
dims.dim_o = 7
dims.dim_m = 20
seed = 1
)"},
        {"single_bath", R"(# single_bath — hot and cold are the same flat spectrum at one temperature;
# no gain is possible and every state relaxes to the bath Gibbs state.
engine.omega_o = 6.0
engine.omega_m = 1.0
engine.g = 0.33333333333333331
engine.gamma_m = 0.00033333333333333332
engine.n_m_th = 1.5414940825367984
bath.hot.temperature = 2.0
bath.hot.shape = flat
bath.hot.level = 0.5
bath.cold.temperature = 2.0
bath.cold.shape = flat
bath.cold.level = 0.5
state.count = 3
state.0.label = coherent
state.0.kind = coherent
state.0.beta_re = 1.0
state.0.beta_im = 0.0
state.1.label = thermal
state.1.kind = thermal
state.1.nbar = 1.0
state.2.label = fock
state.2.kind = fock
state.2.n = 1
time.t_end = 470.0
time.samples = 48
pipeline = compare
dims.dim_o = 6
dims.dim_m = 27
seed = 1
)"},
        {"fig2_states", R"(# fig2_states — equal initial mean energy, four state families; low-diffusion
# gain point (cold line nearly dark) so the joint space stays desk-scale.
engine.omega_o = 6.0
engine.omega_m = 1.0
engine.g = 0.33333333333333331
engine.gamma_m = 0.00033333333333333332
engine.n_m_th = 8.0
bath.hot.temperature = 3.0
bath.hot.shape = band_stop
bath.hot.peak = 1.2
bath.hot.stop_lo = 0.0
bath.hot.stop_hi = 6.35
bath.hot.edge_width = 0.6
bath.cold.temperature = 0.8
bath.cold.shape = lorentzian
bath.cold.peak = 1.0
bath.cold.center = 6.0
bath.cold.width = 0.3
state.count = 4
state.0.label = coherent
state.0.kind = coherent
state.0.beta_re = 1.0
state.0.beta_im = 0.0
state.1.label = phase_averaged
state.1.kind = phase_averaged
state.1.radius = 1.0
state.2.label = fock
state.2.kind = fock
state.2.n = 1
state.3.label = thermal
state.3.kind = thermal
state.3.nbar = 1.0
time.t_end = 120.0
time.samples = 61
pipeline = compare
dims.dim_o = 7
dims.dim_m = 56
seed = 1
)"},
        {"thermal_noise_gain", R"(# thermal_noise_gain — thermal input amplified in the gain regime:
# energy grows while the work capacity stays zero.
engine.omega_o = 6.0
engine.omega_m = 1.0
engine.g = 0.33333333333333331
engine.gamma_m = 0.00033333333333333332
engine.n_m_th = 70.0
bath.hot.temperature = 4.0
bath.hot.shape = band_stop
bath.hot.peak = 0.3
bath.hot.stop_lo = 0.0
bath.hot.stop_hi = 6.35
bath.hot.edge_width = 0.6
bath.cold.temperature = 2.4
bath.cold.shape = lorentzian
bath.cold.peak = 6.0
bath.cold.center = 6.0
bath.cold.width = 0.15
state.count = 1
state.0.label = thermal
state.0.kind = thermal
state.0.nbar = 1.0
time.t_end = 250.0
time.samples = 251
pipeline = analytic
dims.dim_o = 7
dims.dim_m = 24
seed = 1
)"}};
    return b;
}

} // namespace

std::vector<std::string> bundled_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : bundle()) names.push_back(k);
    return names;
}

const std::string& bundled_text(const std::string& name) {
    const auto it = bundle().find(name);
    if (it == bundle().end()) fail("unknown bundled config `" + name + "`");
    return it->second;
}

ScenarioConfig load_config(const std::string& path_or_name) {
    if (bundle().count(path_or_name)) {
        return parse_config(bundled_text(path_or_name), path_or_name);
    }
    std::ifstream in(path_or_name);
    if (!in) {
        std::string msg = "cannot open config `" + path_or_name + "`; bundled names:";
        for (const auto& n : bundled_names()) msg += " " + n;
        fail(msg);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string name = path_or_name;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_config(ss.str(), name);
}

} // namespace ohe::config
