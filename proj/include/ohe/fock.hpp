// fock.hpp — Truncated Fock-space states: constructors, entropy, passivity,
// ergotropy and the equal-entropy Gibbs reference. ħ = k_B = 1 throughout.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ohe::hilbert {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Validation tolerances for density matrices.
struct Tolerances {
    double hermiticity = 1e-10;     // max |rho - rho†|
    double trace = 1e-9;            // |tr rho - 1|
    double eigen_floor = -1e-10;    // smallest admissible eigenvalue
    double truncation_budget = 1e-8;// population allowed above the top level
};

// Density matrix of a single bosonic mode on a truncated Fock basis.
// `matrix` is dim x dim, Hermitian, unit trace; `omega` is the mode frequency
// so that H = omega * a†a (no zero-point term).
struct FockState {
    std::size_t dim = 0;
    double omega = 1.0;
    Matrix matrix;
};

// ------------------------------ ladder operators -----------------------------

Matrix annihilation(std::size_t dim);
Matrix creation(std::size_t dim);
Matrix number_operator(std::size_t dim);

// ------------------------------ state specification --------------------------

struct StateSpec {
    enum class Kind { coherent, fock, thermal, phase_averaged_coherent, mixture };

    Kind kind = Kind::fock;
    double omega = 1.0;

    std::complex<double> beta{0.0, 0.0}; // coherent amplitude
    long fock_n = 0;                     // Fock level
    double nbar = 0.0;                   // thermal mean occupancy
    double radius = 0.0;                 // |beta| of a phase-averaged coherent state
    std::vector<std::pair<double, StateSpec>> components; // mixture weights/specs

    static StateSpec coherent(std::complex<double> beta, double omega = 1.0);
    static StateSpec fock(long n, double omega = 1.0);
    static StateSpec thermal(double nbar, double omega = 1.0);
    static StateSpec phase_averaged(double radius, double omega = 1.0);
    static StateSpec mixture(std::vector<std::pair<double, StateSpec>> parts, double omega = 1.0);
};

// Validates Hermiticity, trace and spectrum, then returns the state.
// Throws std::invalid_argument with a diagnostic on violation.
FockState make_fock_state(Matrix rho, double omega, const Tolerances& tol = Tolerances{});

// Builds the requested state on `dim` levels. Enforces the truncation budget
// (population beyond the top level below tol.truncation_budget) and the
// coherent-amplitude safety rule |beta|^2 <= dim/4; the error message names
// the dimension that would be required.
FockState make_state(const StateSpec& spec, std::size_t dim, const Tolerances& tol = Tolerances{});

// ------------------------------ observables ---------------------------------

double mean_energy(const FockState& s);          // omega * sum_n n rho_nn
double mean_occupation(const FockState& s);      // sum_n n rho_nn
std::complex<double> mean_amplitude(const FockState& s); // <a>

// Eigenvalues ascending, clamped at the validation floor.
Eigen::VectorXd spectrum(const FockState& s);

// -sum lambda ln lambda, with 0 ln 0 := 0. Result >= -1e-10.
double von_neumann_entropy(const FockState& s);

// ------------------------------ passivity toolkit ---------------------------

// Spectrum sorted descending onto Fock levels 0,1,2,... (stable order on ties).
FockState passive_state(const FockState& s);

// mean_energy(s) - mean_energy(passive_state(s)); >= -1e-9 by construction.
double ergotropy(const FockState& s);

struct GibbsEquivalent {
    FockState state;     // truncated thermal state with the entropy of the input
    double temperature;  // omega / ln(1 + 1/nbar); 0 for pure input
    double nbar;
};

// Thermal state with the same von Neumann entropy, by bisection on nbar over
// [0, dim] against the truncated-thermal entropy (monotone in nbar).
// Throws if the requested entropy exceeds the truncated-family maximum.
GibbsEquivalent gibbs_equivalent(const FockState& s);

// mean_energy(s) - mean_energy(gibbs_equivalent(s).state); >= ergotropy - 1e-9.
double bound_ergotropy(const FockState& s);

// ------------------------------ thermal helpers -----------------------------

// Closed-form oscillator entropy (nbar+1)ln(nbar+1) - nbar ln nbar.
double thermal_entropy(double nbar);

// Entropy of the truncated, renormalized geometric state on `dim` levels.
double truncated_thermal_entropy(double nbar, std::size_t dim);

// Exactly unitary displacement exp(beta a† - beta* a) on the truncated space.
Matrix displacement_operator(std::complex<double> beta, std::size_t dim);

// D(beta) rho_th(sigma2) D†; spectrum is exactly the truncated thermal one.
FockState displaced_thermal(std::complex<double> beta, double sigma2, double omega,
                            std::size_t dim);

// Zeroes all off-diagonal elements (exact phase average).
FockState dephase(const FockState& s);

// Uhlmann fidelity between two states on the same dimension.
double fidelity(const FockState& a, const FockState& b);

} // namespace ohe::hilbert
