#include "ohe/phasespace.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ohe::phasespace {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// (1 - e^{-a t}) / a, continuous at a = 0.
double decay_integral(double a, double t) {
    if (a == 0.0) return t;
    return -std::expm1(-a * t) / a;
}

double propagate_sigma2(double sigma2, const OUFlow& f, double t) {
    return sigma2 * std::exp(-f.rate * t) + f.diffusion * decay_integral(f.rate, t);
}

double log_bessel_i0(double x) {
    if (x < 30.0) return std::log(std::cyl_bessel_i(0.0, x));
    return x - 0.5 * std::log(2.0 * kPi * x); // asymptotic form
}

} // namespace

PhaseEnsemble PhaseEnsemble::coherent(std::complex<double> beta, double omega) {
    PhaseEnsemble e;
    e.kind = Kind::gaussian;
    e.omega = omega;
    e.gaussian = GaussianPhaseState{beta, 0.0, omega};
    return e;
}

PhaseEnsemble PhaseEnsemble::thermal(double nbar, double omega) {
    require(nbar >= 0.0, "PhaseEnsemble::thermal: nbar must be >= 0");
    PhaseEnsemble e;
    e.kind = Kind::gaussian;
    e.omega = omega;
    e.gaussian = GaussianPhaseState{{0.0, 0.0}, nbar, omega};
    return e;
}

PhaseEnsemble PhaseEnsemble::displaced_thermal(std::complex<double> beta, double sigma2,
                                               double omega) {
    require(sigma2 >= 0.0, "PhaseEnsemble::displaced_thermal: sigma2 must be >= 0");
    PhaseEnsemble e;
    e.kind = Kind::gaussian;
    e.omega = omega;
    e.gaussian = GaussianPhaseState{beta, sigma2, omega};
    return e;
}

PhaseEnsemble PhaseEnsemble::phase_averaged(double radius, double sigma2, double omega) {
    require(radius >= 0.0 && sigma2 >= 0.0,
            "PhaseEnsemble::phase_averaged: radius and sigma2 must be >= 0");
    PhaseEnsemble e;
    e.kind = Kind::phase_averaged;
    e.omega = omega;
    e.radius = radius;
    e.sigma2 = sigma2;
    return e;
}

PhaseEnsemble PhaseEnsemble::mixture(std::vector<std::pair<double, GaussianPhaseState>> parts,
                                     double omega) {
    require(!parts.empty(), "PhaseEnsemble::mixture: empty component list");
    double wsum = 0.0;
    for (const auto& [w, c] : parts) {
        require(w >= 0.0 && c.sigma2 >= 0.0, "PhaseEnsemble::mixture: invalid component");
        wsum += w;
    }
    require(std::abs(wsum - 1.0) <= 1e-9, "PhaseEnsemble::mixture: weights must sum to 1");
    PhaseEnsemble e;
    e.kind = Kind::gaussian_mixture;
    e.omega = omega;
    e.components = std::move(parts);
    return e;
}

PhaseEnsemble propagate(const PhaseEnsemble& e, const OUFlow& f, double t) {
    require(t >= 0.0, "propagate: t must be >= 0");
    require(f.diffusion >= 0.0, "propagate: diffusion must be >= 0");
    const double decay_half = std::exp(-0.5 * f.rate * t);
    PhaseEnsemble out = e;
    switch (e.kind) {
    case PhaseEnsemble::Kind::gaussian:
        out.gaussian.mean *= decay_half;
        out.gaussian.sigma2 = propagate_sigma2(e.gaussian.sigma2, f, t);
        break;
    case PhaseEnsemble::Kind::phase_averaged:
        out.radius *= decay_half;
        out.sigma2 = propagate_sigma2(e.sigma2, f, t);
        break;
    case PhaseEnsemble::Kind::gaussian_mixture:
        for (auto& [w, c] : out.components) {
            c.mean *= decay_half;
            c.sigma2 = propagate_sigma2(c.sigma2, f, t);
        }
        break;
    }
    return out;
}

double mean_occupation(const PhaseEnsemble& e) {
    switch (e.kind) {
    case PhaseEnsemble::Kind::gaussian:
        return std::norm(e.gaussian.mean) + e.gaussian.sigma2;
    case PhaseEnsemble::Kind::phase_averaged:
        return e.radius * e.radius + e.sigma2;
    case PhaseEnsemble::Kind::gaussian_mixture: {
        double n = 0.0;
        for (const auto& [w, c] : e.components) n += w * (std::norm(c.mean) + c.sigma2);
        return n;
    }
    }
    return 0.0;
}

double mean_energy(const PhaseEnsemble& e) { return e.omega * mean_occupation(e); }

double energy_trajectory(double n0, const OUFlow& f, double t, double omega) {
    return omega * (f.diffusion * decay_integral(f.rate, t) + std::exp(-f.rate * t) * n0);
}

namespace {

std::size_t auto_dim(double coherent_part, double sigma2_max) {
    // coherent offset: dim >= 4(|beta|^2 + 1); thermal tail: geometric decay
    // below the truncation budget 1e-8.
    double dim = 4.0 * (coherent_part + 1.0);
    if (sigma2_max > 1e-12) dim += 18.5 / std::log1p(1.0 / sigma2_max);
    dim += 8.0;
    if (dim > 4096.0)
        throw std::invalid_argument("to_fock: required dimension exceeds 4096");
    return static_cast<std::size_t>(std::ceil(dim));
}

} // namespace

hilbert::FockState to_fock(const PhaseEnsemble& e, std::size_t dim) {
    switch (e.kind) {
    case PhaseEnsemble::Kind::gaussian: {
        if (dim == 0) dim = auto_dim(std::norm(e.gaussian.mean), e.gaussian.sigma2);
        return hilbert::displaced_thermal(e.gaussian.mean, e.gaussian.sigma2, e.omega, dim);
    }
    case PhaseEnsemble::Kind::phase_averaged: {
        if (dim == 0) dim = auto_dim(e.radius * e.radius, e.sigma2);
        // the exact phase average keeps the diagonal of the displaced thermal
        return hilbert::dephase(hilbert::displaced_thermal(e.radius, e.sigma2, e.omega, dim));
    }
    case PhaseEnsemble::Kind::gaussian_mixture: {
        if (dim == 0) {
            double coh = 0.0, s2 = 0.0;
            for (const auto& [w, c] : e.components) {
                coh = std::max(coh, std::norm(c.mean));
                s2 = std::max(s2, c.sigma2);
            }
            dim = auto_dim(coh, s2);
        }
        hilbert::Matrix rho =
            hilbert::Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (const auto& [w, c] : e.components) {
            rho += w * hilbert::displaced_thermal(c.mean, c.sigma2, e.omega, dim).matrix;
        }
        return hilbert::make_fock_state(std::move(rho), e.omega);
    }
    }
    throw std::invalid_argument("to_fock: unknown ensemble kind");
}

double work_capacity(const PhaseEnsemble& e, std::size_t dim) {
    if (e.kind == PhaseEnsemble::Kind::gaussian) {
        // displaced thermal: the equal-entropy Gibbs state is the undisplaced
        // thermal, so W = Omega |mean|^2 exactly
        return e.omega * std::norm(e.gaussian.mean);
    }
    return hilbert::bound_ergotropy(to_fock(e, dim));
}

bool is_passive_radial(const std::function<double(double)>& profile, double r_max,
                       std::size_t samples) {
    require(r_max > 0.0 && samples >= 3, "is_passive_radial: need r_max > 0, samples >= 3");
    const double dr = r_max / static_cast<double>(samples - 1);
    std::vector<double> p(samples);
    double mass = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double r = dr * static_cast<double>(i);
        p[i] = profile(r);
        if (!std::isfinite(p[i]) || p[i] < 0.0)
            throw std::invalid_argument("is_passive_radial: profile not a finite density");
        const double w = (i == 0 || i + 1 == samples) ? 0.5 : 1.0;
        mass += w * 2.0 * kPi * r * p[i] * dr;
    }
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::invalid_argument("is_passive_radial: profile is not normalizable");
    for (std::size_t i = 0; i + 1 < samples; ++i) {
        if (p[i + 1] / mass > p[i] / mass + 1e-9) return false;
    }
    return true;
}

PhaseAveragedThreshold phase_averaged_threshold(double beta0, double d, double t) {
    require(beta0 >= 0.0, "phase_averaged_threshold: radius must be >= 0");
    if (t == 0.0)
        throw std::invalid_argument(
            "phase_averaged_threshold: t = 0 is singular (un-diffused coherent ring)");
    require(d > 0.0 && t > 0.0, "phase_averaged_threshold: need d t > 0");
    PhaseAveragedThreshold out;
    out.beta_prime_sq = 4.0 * beta0 * beta0 / (d * t);
    out.nonpassive = out.beta_prime_sq > 1.0;
    return out;
}

DisplacedToPassive displace_to_passive(const GaussianPhaseState& s, const OUFlow& f, double t) {
    GaussianPhaseState evolved;
    evolved.omega = s.omega;
    evolved.mean = s.mean * std::exp(-0.5 * f.rate * t);
    evolved.sigma2 = propagate_sigma2(s.sigma2, f, t);
    DisplacedToPassive out;
    out.extracted_work = s.omega * std::norm(evolved.mean);
    evolved.mean = {0.0, 0.0};
    out.state = evolved;
    return out;
}

double effective_temperature_coherent(double d, double t, double omega) {
    require(d >= 0.0 && t >= 0.0, "effective_temperature_coherent: need d, t >= 0");
    const double dt = d * t;
    if (dt == 0.0) return 0.0;
    return omega / std::log((1.0 + dt) / dt);
}

std::function<double(double)> radial_profile(const PhaseEnsemble& e) {
    switch (e.kind) {
    case PhaseEnsemble::Kind::gaussian: {
        require(std::norm(e.gaussian.mean) == 0.0,
                "radial_profile: gaussian profile must be centered");
        const double s2 = e.gaussian.sigma2;
        require(s2 > 0.0, "radial_profile: zero-width P distribution is singular");
        return [s2](double r) { return std::exp(-r * r / s2) / (kPi * s2); };
    }
    case PhaseEnsemble::Kind::phase_averaged: {
        const double s2 = e.sigma2, r0 = e.radius;
        require(s2 > 0.0, "radial_profile: zero-width P distribution is singular");
        return [s2, r0](double r) {
            const double lg =
                -(r * r + r0 * r0) / s2 + log_bessel_i0(2.0 * r * r0 / s2) - std::log(kPi * s2);
            return std::exp(lg);
        };
    }
    case PhaseEnsemble::Kind::gaussian_mixture: {
        auto parts = e.components;
        for (const auto& [w, c] : parts) {
            require(std::norm(c.mean) == 0.0 && c.sigma2 > 0.0,
                    "radial_profile: mixture components must be centered with positive width");
        }
        return [parts](double r) {
            double p = 0.0;
            for (const auto& [w, c] : parts) {
                p += w * std::exp(-r * r / c.sigma2) / (kPi * c.sigma2);
            }
            return p;
        };
    }
    }
    throw std::invalid_argument("radial_profile: unknown ensemble kind");
}

} // namespace ohe::phasespace
