#include "ohe/baths.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ohe::baths {

namespace {

constexpr double kPi = 3.14159265358979323846;

double raised_cosine_up(double x) {
    // 0 at x = 0, 1 at x = 1, smooth
    return 0.5 * (1.0 - std::cos(kPi * std::clamp(x, 0.0, 1.0)));
}

} // namespace

double shape_value(const Shape& shape, double omega_abs) {
    if (omega_abs < 0.0) throw std::invalid_argument("shape_value: omega must be >= 0");
    if (const auto* f = std::get_if<FlatShape>(&shape)) return f->level;
    if (const auto* l = std::get_if<LorentzianShape>(&shape)) {
        const double hw = 0.5 * l->width;
        const double det = omega_abs - l->center;
        return l->peak * hw * hw / (det * det + hw * hw);
    }
    if (const auto* b = std::get_if<BandStopShape>(&shape)) {
        if (omega_abs >= b->stop_lo && omega_abs <= b->stop_hi) return 0.0;
        if (omega_abs > b->stop_hi) {
            return b->peak * raised_cosine_up((omega_abs - b->stop_hi) / b->edge_width);
        }
        return b->peak * raised_cosine_up((b->stop_lo - omega_abs) / b->edge_width);
    }
    const auto& t = std::get<TabulatedShape>(shape);
    if (t.omega.size() < 2 || t.omega.size() != t.value.size())
        throw std::invalid_argument("shape_value: tabulated shape needs >= 2 sorted points");
    if (omega_abs < t.omega.front() || omega_abs > t.omega.back()) {
        std::ostringstream os;
        os << "shape_value: tabulated query " << omega_abs << " outside ["
           << t.omega.front() << ", " << t.omega.back() << "] (no extrapolation)";
        throw std::invalid_argument(os.str());
    }
    const auto it = std::upper_bound(t.omega.begin(), t.omega.end(), omega_abs);
    const std::size_t hi = std::min<std::size_t>(
        static_cast<std::size_t>(it - t.omega.begin()), t.omega.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = t.omega[hi] - t.omega[lo];
    const double u = span > 0.0 ? (omega_abs - t.omega[lo]) / span : 0.0;
    return t.value[lo] + u * (t.value[hi] - t.value[lo]);
}

double response(const BathSpectrum& b, double omega) {
    if (b.temperature <= 0.0) throw std::invalid_argument("response: temperature must be > 0");
    if (omega >= 0.0) return shape_value(b.shape, omega);
    return std::exp(omega / b.temperature) * shape_value(b.shape, -omega);
}

void validate(const EngineParams& p) {
    if (!(p.omega_o > p.omega_m) || !(p.omega_m > 0.0))
        throw std::invalid_argument("EngineParams: need omega_O > Omega_M > 0");
    if (p.g < 0.0) throw std::invalid_argument("EngineParams: need g >= 0");
    if (p.gamma_m < 0.0) throw std::invalid_argument("EngineParams: need Gamma_M >= 0");
    if (p.n_m_th < 0.0) throw std::invalid_argument("EngineParams: need n_M_th >= 0");
    if (p.hot.temperature <= 0.0 || p.cold.temperature <= 0.0)
        throw std::invalid_argument("EngineParams: bath temperatures must be > 0");
}

double combined_response(const EngineParams& p, double omega) {
    return response(p.hot, omega) + response(p.cold, omega);
}

Eigen::VectorXd OpticalSteadyState::populations(std::size_t dim) const {
    Eigen::VectorXd pop(static_cast<Eigen::Index>(dim));
    double w = 1.0, sum = 0.0;
    for (std::size_t n = 0; n < dim; ++n) {
        pop(static_cast<Eigen::Index>(n)) = w;
        sum += w;
        w *= ratio;
    }
    pop /= sum;
    return pop;
}

OpticalSteadyState optical_steady_state(const EngineParams& p) {
    validate(p);
    const double g_down = combined_response(p, p.omega_o);
    const double g_up = combined_response(p, -p.omega_o);
    if (g_down <= 0.0)
        throw std::invalid_argument("optical_steady_state: G(omega_O) = 0, mode is undamped");
    const double r = g_up / g_down;
    if (r >= 1.0)
        throw std::invalid_argument("no optical steady state (population inversion)");
    OpticalSteadyState out;
    out.ratio = r;
    out.n_o = r / (1.0 - r);
    return out;
}

double quasi_steady_occupation(const EngineParams& p, double n_m) {
    if (n_m < 0.0) throw std::invalid_argument("quasi_steady_occupation: n_m must be >= 0");
    const HarmonicSamples h = sample_harmonics(p);
    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double up = h.total(1) + k * (h.total(3) * (n_m + 1.0) + h.total(5) * n_m);
    const double down = h.total(0) + k * (h.total(2) * n_m + h.total(4) * (n_m + 1.0));
    if (down <= up)
        throw std::invalid_argument("quasi_steady_occupation: no quasi-steady optical state");
    return up / (down - up);
}

HarmonicSamples sample_harmonics(const EngineParams& p) {
    HarmonicSamples h;
    const double w0 = p.omega_o, wp = p.omega_plus(), wm = p.omega_minus();
    const BathSpectrum* baths[2] = {&p.hot, &p.cold};
    for (int j = 0; j < 2; ++j) {
        h.g[j][0] = response(*baths[j], w0);
        h.g[j][1] = response(*baths[j], -w0);
        h.g[j][2] = response(*baths[j], wp);
        h.g[j][3] = response(*baths[j], -wp);
        h.g[j][4] = response(*baths[j], wm);
        h.g[j][5] = response(*baths[j], -wm);
    }
    return h;
}

EngineRates engine_rates(const EngineParams& p) {
    const OpticalSteadyState ss = optical_steady_state(p);
    const HarmonicSamples h = sample_harmonics(p);
    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double n = ss.n_o, np1 = ss.n_o + 1.0;

    EngineRates r;
    r.harmonics = h;
    r.n_o = n;
    r.gamma_m = p.gamma_m;
    r.d_m = p.gamma_m * p.n_m_th;
    const double up = h.total(3) * np1 + h.total(4) * n;   // G(-w+)<n+1> + G(w-)<n>
    const double down = h.total(2) * n + h.total(5) * np1; // G(w+)<n> + G(-w-)<n+1>
    r.gamma = k * (down - up);
    r.d = k * up + r.d_m;
    return r;
}

GammaFull gamma_full(const EngineParams& p) {
    const OpticalSteadyState ss = optical_steady_state(p);
    const HarmonicSamples h = sample_harmonics(p);
    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double w0 = p.omega_o, wp = p.omega_plus(), wm = p.omega_minus();
    const double bh = 1.0 / p.hot.temperature, bc = 1.0 / p.cold.temperature;

    // <n+1>_O / G(w0) = 1 / (G(w0) - G(-w0)); this is the normalization that
    // makes the per-bath product expression coincide with engine_rates.
    const double denom = h.total(0) - h.total(1);
    if (denom <= 0.0) throw std::invalid_argument("gamma_full: no optical steady state");
    const double norm = k / denom;

    const double Gh_p = h.g[0][2], Gh_m = h.g[0][4], Gh_0 = h.g[0][0];
    const double Gc_p = h.g[1][2], Gc_m = h.g[1][4], Gc_0 = h.g[1][0];

    GammaFull out;
    out.normalization = norm;
    auto add = [&](std::string label, double ga, double gb, double br, bool neg) {
        out.terms.push_back(GammaTerm{std::move(label), norm * ga * gb * br, neg});
    };
    add("Gh(w+)Gh(w0)", Gh_p, Gh_0, std::exp(-bh * w0) - std::exp(-bh * wp), false);
    add("Gc(w-)Gc(w0)", Gc_m, Gc_0, std::exp(-bc * wm) - std::exp(-bc * w0), false);
    add("Gh(w-)Gh(w0)", Gh_m, Gh_0, std::exp(-bh * wm) - std::exp(-bh * w0), false);
    add("Gc(w+)Gc(w0)", Gc_p, Gc_0, std::exp(-bc * w0) - std::exp(-bc * wp), false);
    add("Gc(w+)Gh(w0)", Gc_p, Gh_0, std::exp(-bh * w0) - std::exp(-bc * wp), false);
    add("Gh(w-)Gc(w0)", Gh_m, Gc_0, std::exp(-bh * wm) - std::exp(-bc * w0), false);
    // only these two may be negative: high-frequency absorption from the hot
    // bath paired with emission into the cold bath
    add("Gh(w+)Gc(w0)", Gh_p, Gc_0, std::exp(-bc * w0) - std::exp(-bh * wp), true);
    add("Gc(w-)Gh(w0)", Gc_m, Gh_0, std::exp(-bc * wm) - std::exp(-bh * w0), true);

    out.total = 0.0;
    for (const auto& t : out.terms) out.total += t.value;
    (void)ss;
    return out;
}

RegimeMargins regime_margins(const EngineParams& p, double max_n_m, double t_end) {
    RegimeMargins m;
    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double n_o = optical_steady_state(p).n_o;
    m.weak_coupling = k * max_n_m;
    m.quasi_steady = (p.g * p.g / p.omega_m) * n_o * n_o * t_end;
    return m;
}

} // namespace ohe::baths
