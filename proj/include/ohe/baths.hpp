// baths.hpp — Bath spectral-response models with KMS detailed balance, the
// optical quasi-steady state, and the indirect drift/diffusion rates.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "ohe/fock.hpp"

namespace ohe::baths {

enum class BathLabel { hot, cold, phonon };

// Spectral shapes, defined for omega >= 0 only; negative-frequency response is
// always derived through KMS and never stored.
struct FlatShape {
    double level = 0.0; // G_0
};

struct LorentzianShape {
    double center = 0.0; // omega_c
    double width = 1.0;  // FWHM kappa
    double peak = 0.0;   // G_0 at the center
};

// Pass level G_0 everywhere except the stop band [stop_lo, stop_hi]; the
// transitions are raised cosines of width `edge_width` outside the band.
struct BandStopShape {
    double peak = 0.0;
    double stop_lo = 0.0;
    double stop_hi = 0.0;
    double edge_width = 2.0; // default per the few-MHz-wide sharp cutoff
};

struct TabulatedShape {
    std::vector<double> omega; // sorted ascending
    std::vector<double> value; // >= 0, same length
};

using Shape = std::variant<FlatShape, LorentzianShape, BandStopShape, TabulatedShape>;

struct BathSpectrum {
    BathLabel label = BathLabel::hot;
    double temperature = 1.0; // > 0, energy units
    Shape shape = FlatShape{};
};

// Shape value at |omega|; throws for tabulated queries outside the table.
double shape_value(const Shape& shape, double omega_abs);

// G(omega) for omega >= 0, e^{-|omega|/T} G(|omega|) for omega < 0.
double response(const BathSpectrum& b, double omega);

// ------------------------------ engine parameters ---------------------------

struct EngineParams {
    double omega_o = 10.0; // optical frequency
    double omega_m = 1.0;  // mechanical frequency
    double g = 0.1;        // optomechanical coupling
    double gamma_m = 0.0;  // mechanical damping rate
    double n_m_th = 0.0;   // phonon-bath occupancy
    BathSpectrum hot;
    BathSpectrum cold;

    double omega_plus() const { return omega_o + omega_m; }
    double omega_minus() const { return omega_o - omega_m; }
};

void validate(const EngineParams& p); // throws on violated invariants

// Combined response G_h + G_c at a signed frequency.
double combined_response(const EngineParams& p, double omega);

struct OpticalSteadyState {
    double ratio = 0.0; // r = G(-omega_O)/G(omega_O)
    double n_o = 0.0;   // r / (1 - r)
    // Geometric populations r^n (1 - r), truncated and renormalized.
    Eigen::VectorXd populations(std::size_t dim) const;
};

// Throws "no optical steady state (population inversion)" when r >= 1.
OpticalSteadyState optical_steady_state(const EngineParams& p);

// Quasi-steady optical occupation including the q = ±1 pump at mechanical
// occupation n_m (product-state factorization):
//   up   = G(-w0) + k [G(-w+)(n_m+1) + G(-w-) n_m]
//   down = G(w0)  + k [G(w+) n_m     + G(w-)(n_m+1)],   n_O* = up/(down - up).
// Reduces to optical_steady_state().n_o at n_m = Planck occupancy when hot and
// cold share one temperature. Throws when down <= up.
double quasi_steady_occupation(const EngineParams& p, double n_m);

// Per-bath response samples at the five engine frequencies.
struct HarmonicSamples {
    // index 0: hot, 1: cold; frequencies +w0, -w0, +w+, -w+, +w-, -w-
    std::array<std::array<double, 6>, 2> g{};
    double total(int freq_index) const { return g[0][freq_index] + g[1][freq_index]; }
};

HarmonicSamples sample_harmonics(const EngineParams& p);

struct EngineRates {
    double gamma = 0.0;   // indirect drift rate, may be negative
    double d = 0.0;       // indirect diffusion rate, includes d_m
    double gamma_m = 0.0; // mechanical damping
    double d_m = 0.0;     // gamma_m * n_m_th
    double n_o = 0.0;     // optical steady-state occupancy
    HarmonicSamples harmonics;

    double drift() const { return gamma + gamma_m; } // a = gamma + Gamma_M
    bool gain() const { return drift() < 0.0; }
};

// Drift and diffusion rates of the linearized mechanical dynamics:
//   gamma = (g/Omega_M)^2 [G(w+)<n> + G(-w-)<n+1> - G(w-)<n> - G(-w+)<n+1>]
//   d     = (g/Omega_M)^2 [G(w-)<n> + G(-w+)<n+1>] + d_M
EngineRates engine_rates(const EngineParams& p);

// ------------------------------ full gamma expression ------------------------

struct GammaTerm {
    std::string label;          // e.g. "Gh(w+)Gh(w0)"
    double value = 0.0;         // contribution to gamma, normalization included
    bool may_be_negative = false; // the two hot-absorption/cold-emission cross terms
};

struct GammaFull {
    double total = 0.0;
    double normalization = 0.0; // (g/Omega_M)^2 / (G(w0) - G(-w0))
    std::vector<GammaTerm> terms;
};

// The eight-term per-bath product expression for gamma, term by term. The
// total equals engine_rates(p).gamma identically; the bracket is normalized by
// <n+1>_O / G(omega_O) = 1/(G(omega_O) - G(-omega_O)).
GammaFull gamma_full(const EngineParams& p);

// ------------------------------ regime check --------------------------------

struct RegimeMargins {
    double weak_coupling = 0.0;   // (g/Omega_M)^2 * max <n_M>
    double quasi_steady = 0.0;    // (g^2/Omega_M) * <n_O>^2 * t_end
    bool in_regime(double limit = 0.1) const {
        return weak_coupling <= limit && quasi_steady <= limit;
    }
};

RegimeMargins regime_margins(const EngineParams& p, double max_n_m, double t_end);

} // namespace ohe::baths
