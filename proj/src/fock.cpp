#include "ohe/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ohe::hilbert {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

// ------------------------------ ladder operators -----------------------------

Matrix annihilation(std::size_t dim) {
    require(dim >= 1, "annihilation: dim must be >= 1");
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t n = 1; n < dim; ++n) {
        a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) =
            std::sqrt(static_cast<double>(n));
    }
    return a;
}

Matrix creation(std::size_t dim) { return annihilation(dim).adjoint(); }

Matrix number_operator(std::size_t dim) {
    Matrix n = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        n(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = static_cast<double>(k);
    }
    return n;
}

// ------------------------------ state specification --------------------------

StateSpec StateSpec::coherent(std::complex<double> beta, double omega) {
    StateSpec s;
    s.kind = Kind::coherent;
    s.beta = beta;
    s.omega = omega;
    return s;
}

StateSpec StateSpec::fock(long n, double omega) {
    StateSpec s;
    s.kind = Kind::fock;
    s.fock_n = n;
    s.omega = omega;
    return s;
}

StateSpec StateSpec::thermal(double nbar, double omega) {
    StateSpec s;
    s.kind = Kind::thermal;
    s.nbar = nbar;
    s.omega = omega;
    return s;
}

StateSpec StateSpec::phase_averaged(double radius, double omega) {
    StateSpec s;
    s.kind = Kind::phase_averaged_coherent;
    s.radius = radius;
    s.omega = omega;
    return s;
}

StateSpec StateSpec::mixture(std::vector<std::pair<double, StateSpec>> parts, double omega) {
    StateSpec s;
    s.kind = Kind::mixture;
    s.components = std::move(parts);
    s.omega = omega;
    return s;
}

FockState make_fock_state(Matrix rho, double omega, const Tolerances& tol) {
    require(rho.rows() == rho.cols() && rho.rows() >= 2, "make_fock_state: need a square matrix, dim >= 2");
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermiticity) {
        std::ostringstream os;
        os << "make_fock_state: not Hermitian, max |rho - rho†| = " << herm;
        throw std::invalid_argument(os.str());
    }
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream os;
        os << "make_fock_state: trace " << tr << " deviates from 1 by more than " << tol.trace;
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    require(es.info() == Eigen::Success, "make_fock_state: eigen decomposition failed");
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min < tol.eigen_floor) {
        std::ostringstream os;
        os << "make_fock_state: negative eigenvalue " << lam_min;
        throw std::invalid_argument(os.str());
    }
    FockState s;
    s.dim = static_cast<std::size_t>(rho.rows());
    s.omega = omega;
    s.matrix = std::move(rho);
    return s;
}

namespace {

// Truncated coherent vector, normalized after truncation; reports the leaked tail.
Vector coherent_vector(std::complex<double> beta, std::size_t dim, double& leak) {
    Vector v(static_cast<Eigen::Index>(dim));
    const double b2 = std::norm(beta);
    // amplitudes beta^n / sqrt(n!) times e^{-|beta|^2/2}
    std::complex<double> amp = std::exp(-0.5 * b2);
    for (std::size_t n = 0; n < dim; ++n) {
        v(static_cast<Eigen::Index>(n)) = amp;
        amp *= beta / std::sqrt(static_cast<double>(n + 1));
    }
    const double kept = v.squaredNorm();
    leak = std::max(0.0, 1.0 - kept);
    v /= std::sqrt(kept);
    return v;
}

void check_budget(double leak, std::size_t dim, double budget, const char* what,
                  double quanta_hint) {
    if (leak <= budget) return;
    // recommended dimension from the coherent-family rule dim >= 4(<n> + 1)
    const std::size_t want = static_cast<std::size_t>(std::ceil(4.0 * (quanta_hint + 1.0)));
    std::ostringstream os;
    os << what << ": truncation budget violated, leaked population " << leak << " > " << budget
       << " at dim = " << dim << "; need dim >= " << std::max(want, dim + 1);
    throw std::invalid_argument(os.str());
}

Matrix build_matrix(const StateSpec& spec, std::size_t dim, const Tolerances& tol) {
    const auto D = static_cast<Eigen::Index>(dim);
    switch (spec.kind) {
    case StateSpec::Kind::fock: {
        require(spec.fock_n >= 0, "make_state: fock level must be >= 0");
        if (static_cast<std::size_t>(spec.fock_n) >= dim) {
            std::ostringstream os;
            os << "make_state: fock(" << spec.fock_n << ") needs dim >= " << spec.fock_n + 1
               << ", got " << dim;
            throw std::invalid_argument(os.str());
        }
        Matrix rho = Matrix::Zero(D, D);
        rho(spec.fock_n, spec.fock_n) = 1.0;
        return rho;
    }
    case StateSpec::Kind::coherent: {
        const double b2 = std::norm(spec.beta);
        if (b2 > static_cast<double>(dim) / 4.0) {
            std::ostringstream os;
            os << "make_state: coherent |beta|^2 = " << b2 << " exceeds dim/4 = " << dim / 4.0
               << "; need dim >= " << static_cast<std::size_t>(std::ceil(4.0 * (b2 + 1.0)));
            throw std::invalid_argument(os.str());
        }
        double leak = 0.0;
        Vector v = coherent_vector(spec.beta, dim, leak);
        check_budget(leak, dim, tol.truncation_budget, "make_state(coherent)", b2);
        return v * v.adjoint();
    }
    case StateSpec::Kind::thermal: {
        require(spec.nbar >= 0.0, "make_state: thermal nbar must be >= 0");
        Matrix rho = Matrix::Zero(D, D);
        if (spec.nbar == 0.0) {
            rho(0, 0) = 1.0;
            return rho;
        }
        const double r = spec.nbar / (spec.nbar + 1.0);
        double w = 1.0, sum = 0.0;
        for (std::size_t n = 0; n < dim; ++n) {
            rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = w;
            sum += w;
            w *= r;
        }
        const double leak = 1.0 - sum * (1.0 - r); // geometric tail beyond dim
        check_budget(leak, dim, tol.truncation_budget, "make_state(thermal)", spec.nbar);
        rho /= sum;
        return rho;
    }
    case StateSpec::Kind::phase_averaged_coherent: {
        require(spec.radius >= 0.0, "make_state: phase-averaged radius must be >= 0");
        const double b2 = spec.radius * spec.radius;
        if (b2 > static_cast<double>(dim) / 4.0) {
            std::ostringstream os;
            os << "make_state: phase-averaged |beta|^2 = " << b2 << " exceeds dim/4 = "
               << dim / 4.0 << "; need dim >= "
               << static_cast<std::size_t>(std::ceil(4.0 * (b2 + 1.0)));
            throw std::invalid_argument(os.str());
        }
        Matrix rho = Matrix::Zero(D, D);
        double w = std::exp(-b2), sum = 0.0; // Poisson weights e^{-b2} b2^n / n!
        for (std::size_t n = 0; n < dim; ++n) {
            rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = w;
            sum += w;
            w *= b2 / static_cast<double>(n + 1);
        }
        check_budget(1.0 - sum, dim, tol.truncation_budget, "make_state(phase_averaged)", b2);
        rho /= sum;
        return rho;
    }
    case StateSpec::Kind::mixture: {
        require(!spec.components.empty(), "make_state: empty mixture");
        double wsum = 0.0;
        for (const auto& [w, part] : spec.components) {
            require(w >= 0.0, "make_state: mixture weights must be >= 0");
            wsum += w;
        }
        if (std::abs(wsum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "make_state: mixture weights sum to " << wsum << ", expected 1";
            throw std::invalid_argument(os.str());
        }
        Matrix rho = Matrix::Zero(D, D);
        for (const auto& [w, part] : spec.components) rho += w * build_matrix(part, dim, tol);
        return rho;
    }
    }
    throw std::invalid_argument("make_state: unknown state kind");
}

} // namespace

FockState make_state(const StateSpec& spec, std::size_t dim, const Tolerances& tol) {
    require(dim >= 2, "make_state: dim must be >= 2");
    return make_fock_state(build_matrix(spec, dim, tol), spec.omega, tol);
}

// ------------------------------ observables ---------------------------------

double mean_occupation(const FockState& s) {
    double e = 0.0;
    for (std::size_t n = 0; n < s.dim; ++n) {
        e += static_cast<double>(n) *
             s.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
    }
    return e;
}

double mean_energy(const FockState& s) { return s.omega * mean_occupation(s); }

std::complex<double> mean_amplitude(const FockState& s) {
    std::complex<double> m{0.0, 0.0};
    for (std::size_t n = 1; n < s.dim; ++n) {
        // <a> = sum_n sqrt(n) rho_{n, n-1}
        m += std::sqrt(static_cast<double>(n)) *
             s.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n - 1));
    }
    return m;
}

Eigen::VectorXd spectrum(const FockState& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolve failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::max(lam(i), 0.0);
    return lam;
}

namespace {

double entropy_of_probs(const Eigen::VectorXd& lam) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double p = lam(i);
        if (p > 0.0) s -= p * std::log(p);
    }
    return std::max(s, 0.0);
}

} // namespace

double von_neumann_entropy(const FockState& s) { return entropy_of_probs(spectrum(s)); }

// ------------------------------ passivity toolkit ---------------------------

FockState passive_state(const FockState& s) {
    Eigen::VectorXd lam = spectrum(s); // ascending
    const auto D = static_cast<Eigen::Index>(s.dim);
    Matrix rho = Matrix::Zero(D, D);
    for (Eigen::Index n = 0; n < D; ++n) rho(n, n) = lam(D - 1 - n); // descending onto levels
    // renormalize away the eigenvalue clamp
    rho /= rho.trace().real();
    FockState out;
    out.dim = s.dim;
    out.omega = s.omega;
    out.matrix = std::move(rho);
    return out;
}

double ergotropy(const FockState& s) { return mean_energy(s) - mean_energy(passive_state(s)); }

double thermal_entropy(double nbar) {
    if (nbar <= 0.0) return 0.0;
    return (nbar + 1.0) * std::log(nbar + 1.0) - nbar * std::log(nbar);
}

double truncated_thermal_entropy(double nbar, std::size_t dim) {
    if (nbar <= 0.0) return 0.0;
    const double r = nbar / (nbar + 1.0);
    // p_n = r^n (1-r) / (1 - r^dim), n < dim
    const double norm = 1.0 - std::pow(r, static_cast<double>(dim));
    double s = 0.0, w = (1.0 - r) / norm;
    for (std::size_t n = 0; n < dim; ++n) {
        if (w > 0.0) s -= w * std::log(w);
        w *= r;
    }
    return s;
}

GibbsEquivalent gibbs_equivalent(const FockState& s) {
    const double target = von_neumann_entropy(s);
    GibbsEquivalent out;
    if (target < 1e-10) {
        out.state = make_state(StateSpec::thermal(0.0, s.omega), s.dim);
        out.temperature = 0.0;
        out.nbar = 0.0;
        return out;
    }
    const double nmax = static_cast<double>(s.dim);
    if (target > truncated_thermal_entropy(nmax, s.dim)) {
        std::ostringstream os;
        os << "gibbs_equivalent: entropy " << target
           << " exceeds the truncated thermal maximum at dim = " << s.dim;
        throw std::invalid_argument(os.str());
    }
    double lo = 0.0, hi = nmax;
    // entropy is strictly increasing in nbar: plain bisection
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double sm = truncated_thermal_entropy(mid, s.dim);
        if (std::abs(sm - target) < 1e-10) {
            lo = hi = mid;
            break;
        }
        (sm < target ? lo : hi) = mid;
    }
    const double nb = 0.5 * (lo + hi);
    out.state = make_state(StateSpec::thermal(nb, s.omega), s.dim,
                           Tolerances{.truncation_budget = 1.0}); // family member; tail folded in
    out.nbar = nb;
    out.temperature = nb > 0.0 ? s.omega / std::log(1.0 + 1.0 / nb) : 0.0;
    return out;
}

double bound_ergotropy(const FockState& s) {
    return mean_energy(s) - mean_energy(gibbs_equivalent(s).state);
}

// ------------------------------ thermal helpers -----------------------------

Matrix displacement_operator(std::complex<double> beta, std::size_t dim) {
    const auto D = static_cast<Eigen::Index>(dim);
    // X = beta a† - beta* a is anti-Hermitian; exponentiate via iX Hermitian.
    Matrix a = annihilation(dim);
    Matrix x = beta * a.adjoint() - std::conj(beta) * a;
    Matrix h = std::complex<double>(0.0, 1.0) * x;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("displacement_operator: eigensolve failed");
    Vector phases(D);
    for (Eigen::Index i = 0; i < D; ++i) {
        phases(i) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(i)));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

FockState displaced_thermal(std::complex<double> beta, double sigma2, double omega,
                            std::size_t dim) {
    Tolerances tol;
    const double quanta = std::norm(beta) + sigma2;
    if (std::norm(beta) > static_cast<double>(dim) / 4.0) {
        std::ostringstream os;
        os << "displaced_thermal: |beta|^2 = " << std::norm(beta) << " exceeds dim/4; need dim >= "
           << static_cast<std::size_t>(std::ceil(4.0 * (quanta + 1.0)));
        throw std::invalid_argument(os.str());
    }
    FockState th = make_state(StateSpec::thermal(sigma2, omega), dim, tol);
    Matrix d = displacement_operator(beta, dim);
    FockState out;
    out.dim = dim;
    out.omega = omega;
    out.matrix = d * th.matrix * d.adjoint();
    return out;
}

FockState dephase(const FockState& s) {
    FockState out;
    out.dim = s.dim;
    out.omega = s.omega;
    out.matrix = s.matrix.diagonal().asDiagonal();
    return out;
}

double fidelity(const FockState& a, const FockState& b) {
    if (a.dim != b.dim) throw std::invalid_argument("fidelity: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix);
    if (es.info() != Eigen::Success) throw std::runtime_error("fidelity: eigensolve failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(lam(i), 0.0));
    Matrix sq = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es2(sq * b.matrix * sq);
    if (es2.info() != Eigen::Success) throw std::runtime_error("fidelity: eigensolve failed");
    double t = 0.0;
    for (Eigen::Index i = 0; i < es2.eigenvalues().size(); ++i) {
        t += std::sqrt(std::max(es2.eigenvalues()(i), 0.0));
    }
    return t * t;
}

} // namespace ohe::hilbert
