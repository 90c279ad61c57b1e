// phasespace.hpp — Analytic Ornstein-Uhlenbeck propagation of the P-distribution,
// state-family work trajectories and phase-plane passivity tests.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "ohe/fock.hpp"

namespace ohe::phasespace {

// Mean amplitude and symmetric P-function width of a displaced thermal state.
// sigma2 = 0 is a coherent state; mean = 0 with sigma2 = nbar is thermal.
struct GaussianPhaseState {
    std::complex<double> mean{0.0, 0.0};
    double sigma2 = 0.0;
    double omega = 1.0;
};

struct PhaseEnsemble {
    enum class Kind { gaussian, phase_averaged, gaussian_mixture };

    Kind kind = Kind::gaussian;
    double omega = 1.0;

    GaussianPhaseState gaussian;  // kind == gaussian
    double radius = 0.0;          // kind == phase_averaged
    double sigma2 = 0.0;          // kind == phase_averaged
    std::vector<std::pair<double, GaussianPhaseState>> components; // mixture

    static PhaseEnsemble coherent(std::complex<double> beta, double omega = 1.0);
    static PhaseEnsemble thermal(double nbar, double omega = 1.0);
    static PhaseEnsemble displaced_thermal(std::complex<double> beta, double sigma2,
                                           double omega = 1.0);
    static PhaseEnsemble phase_averaged(double radius, double sigma2, double omega = 1.0);
    static PhaseEnsemble mixture(std::vector<std::pair<double, GaussianPhaseState>> parts,
                                 double omega = 1.0);
};

// Drift a = gamma + Gamma_M (signed) and diffusion d >= 0 of the flow
//   dP/dt = (a/2)(d_beta beta + c.c.) P + d d2P/(d_beta d_beta*).
struct OUFlow {
    double rate = 0.0;      // a, signed
    double diffusion = 0.0; // d >= 0
};

// Green's-function action of the flow over time t >= 0:
//   mean  -> mean e^{-a t / 2}
//   sigma2 -> sigma2 e^{-a t} + d (1 - e^{-a t}) / a   (d t in the a -> 0 limit)
PhaseEnsemble propagate(const PhaseEnsemble& e, const OUFlow& f, double t);

double mean_occupation(const PhaseEnsemble& e); // <n> = |mean|^2 + sigma2 etc.
double mean_energy(const PhaseEnsemble& e);

// Closed-form energy law for <E(t)> given <n(0)>, with the signed rate
// gamma + Gamma_M throughout.
double energy_trajectory(double n0, const OUFlow& f, double t, double omega = 1.0);

// Fock-space conversion; dim = 0 picks the truncation rule 4(<n>+1) + margin.
hilbert::FockState to_fock(const PhaseEnsemble& e, std::size_t dim = 0);

// Maximum extractable work. Gaussian states use the exact fast path
// Omega |mean|^2 (the equal-entropy Gibbs reference is the undisplaced
// thermal); everything else goes through Fock-space bound_ergotropy.
double work_capacity(const PhaseEnsemble& e, std::size_t dim = 0);

// True iff the sampled radial profile is non-increasing within 1e-9 of its
// normalized scale. Throws for profiles without positive finite mass.
bool is_passive_radial(const std::function<double(double)>& profile, double r_max,
                       std::size_t samples);

struct PhaseAveragedThreshold {
    double beta_prime_sq = 0.0; // 4 |beta0|^2 / (d t)
    bool nonpassive = false;    // beta_prime_sq > 1
};

// The phase-averaged nonpassivity threshold; t = 0 is singular and throws
// (the un-diffused ring is handled separately by its Fock representation).
PhaseAveragedThreshold phase_averaged_threshold(double beta0, double d, double t);

struct DisplacedToPassive {
    GaussianPhaseState state; // centered, same width
    double extracted_work = 0.0;
};

// Propagates by (f, t), then removes the mean by a displacement; the energy
// removed is the extracted work Omega |mean(t)|^2.
DisplacedToPassive displace_to_passive(const GaussianPhaseState& s, const OUFlow& f, double t);

// 1/T = ln((1 + d t)/(d t)) / Omega; T = 0 at t = 0.
double effective_temperature_coherent(double d, double t, double omega);

// Radial P profile of a propagated ensemble (isotropic inputs only:
// thermal / phase-averaged / centered mixtures).
std::function<double(double)> radial_profile(const PhaseEnsemble& e);

} // namespace ohe::phasespace
