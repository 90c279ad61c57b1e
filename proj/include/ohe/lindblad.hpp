// lindblad.hpp — Brute-force oracle: the full two-mode master equation on a
// truncated joint Fock space, with heat currents and reduced states.
//
// Basis ordering is |n_O> ⊗ |n_M>, O-index major: flat index = n_O*dim_M + n_M.
// The equation is integrated in the interaction picture (free phases removed),
// so the generators are time independent.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "ohe/baths.hpp"
#include "ohe/fock.hpp"

namespace ohe::lindblad {

using Matrix = Eigen::MatrixXcd;

struct JointState {
    std::size_t dim_o = 0;
    std::size_t dim_m = 0;
    Matrix matrix; // (dim_o*dim_m)^2, Hermitian, unit trace

    std::size_t size() const { return dim_o * dim_m; }
};

// One Lindblad dissipation channel D[A] with A a product of ladder operators:
// shift_o/shift_m in {-1, 0, +1} select annihilation/identity/creation on the
// respective mode; `rate` is the full D[A] prefactor.
struct Channel {
    baths::BathLabel bath = baths::BathLabel::hot;
    int q = 0;       // harmonic: 0 or ±1; phonon channels use q = 0
    int shift_o = 0;
    int shift_m = 0;
    double rate = 0.0;
    double g_sample = 0.0; // the raw bath response G_j(±omega_q) behind the rate
    std::string label;
};

struct GeneratorSet {
    std::size_t dim_o = 0;
    std::size_t dim_m = 0;
    baths::EngineParams params;
    bool quartic_correction = true; // -(g O†O)^2/Omega_M term in H_O
    std::vector<Channel> channels;

    Eigen::VectorXd h_diag;   // dressed H_O + H_M on the joint diagonal
    Eigen::VectorXd h_o_diag; // optical part only
    Eigen::VectorXd h_m_diag; // mechanical part only

    // per-channel jump coefficients c(src) (0 where the jump leaves the space)
    std::vector<Eigen::VectorXd> coeff;
    std::vector<long> offset;  // flat index shift of each channel
    Eigen::VectorXd w_total;   // sum_k rate_k c_k(src)^2 (anticommutator diagonal)
};

// Generators per the dressed weak-coupling master equation: q = 0 optical
// thermalization at G_j(±omega_O); q = ±1 two-mode channels O M / O†M† and
// O M† / O†M at (g/Omega_M)^2 G_j(±omega_±); thermal phonon pair at
// Gamma_M(n_th+1) / Gamma_M n_th.
GeneratorSet build_generators(const baths::EngineParams& p, std::size_t dim_o,
                              std::size_t dim_m, bool quartic_correction = true);

// Dense matrix of one channel's jump operator (for verification).
Matrix channel_matrix(const GeneratorSet& g, std::size_t index);

// out = L rho (all channels). `out` is resized as needed.
void apply_generator(const GeneratorSet& g, const Matrix& rho, Matrix& out);

// Same, restricted to the channels of one bath.
void apply_bath_generator(const GeneratorSet& g, baths::BathLabel bath, const Matrix& rho,
                          Matrix& out);

// Optical steady state ⊗ mechanical state from a spec.
JointState make_joint(const baths::EngineParams& p, const hilbert::StateSpec& spec,
                      std::size_t dim_o, std::size_t dim_m);

JointState product_state(const hilbert::FockState& o, const hilbert::FockState& m);

struct EvolveOptions {
    double tol = 1e-9;          // step-doubling error tolerance per step
    double h_init = 1e-3;
    double h_min = 1e-12;
    std::size_t max_rejects = 60;
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<JointState> states;
    // run diagnostics
    double max_trace_err = 0.0;
    double max_top_pop_o = 0.0; // largest top-Fock-level population seen (O)
    double max_top_pop_m = 0.0; // same for M
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evals = 0;
};

// Adaptive RK4 with step-doubling error control on the density matrix.
// Aborts with a diagnostic if the error estimate cannot be brought under
// tolerance within max_rejects halvings.
EvolveResult evolve(const JointState& state, const GeneratorSet& gens,
                    const std::vector<double>& t_grid, const EvolveOptions& opt = {});

// Partial traces. Small negative eigenvalues in [-1e-8, 0) are clamped to zero
// with renormalization (the positivity floor); larger violations throw.
hilbert::FockState reduced_M(const JointState& s, double omega_m = 1.0);
hilbert::FockState reduced_O(const JointState& s, double omega_o = 1.0);

struct HeatCurrents {
    double hot = 0.0;
    double cold = 0.0;
    double phonon = 0.0;
    double total() const { return hot + cold + phonon; }
};

// J_j = Tr[(H_O + H_M) L_j rho] per bath.
HeatCurrents heat_currents(const JointState& s, const GeneratorSet& g);

struct DriftDiffusionFit {
    double gamma = 0.0; // empirical indirect drift
    double d = 0.0;     // empirical diffusion
    double amp_residual = 0.0; // rms residual of the log-amplitude fit
    double n_residual = 0.0;   // rms residual of the occupation fit
};

// Fits d<M>/dt = -((gamma+Gamma_M)/2)<M> and the occupation rate equation to
// moment series. Throws with a condition diagnostic when the fit is
// ill-posed (vanishing amplitude or degenerate time grid).
DriftDiffusionFit extract_drift_diffusion(const std::vector<double>& times,
                                          const std::vector<std::complex<double>>& amplitude,
                                          const std::vector<double>& occupation,
                                          double gamma_m);

DriftDiffusionFit extract_drift_diffusion(const EvolveResult& traj, double gamma_m);

} // namespace ohe::lindblad
