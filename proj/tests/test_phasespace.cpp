#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "ohe/fock.hpp"
#include "ohe/phasespace.hpp"

using namespace ohe;
using phasespace::OUFlow;
using phasespace::PhaseEnsemble;

TEST_CASE("propagate closed forms") {
    auto coh = PhaseEnsemble::coherent({1.0, 0.0});

    // t = 0 is the identity
    auto same = phasespace::propagate(coh, {0.3, 0.1}, 0.0);
    CHECK(same.gaussian.mean == std::complex<double>(1.0, 0.0));
    CHECK(same.gaussian.sigma2 == 0.0);

    // damped thermal state approaches width d/a
    auto th = PhaseEnsemble::thermal(2.0);
    auto late = phasespace::propagate(th, {0.5, 0.2}, 80.0);
    CHECK(std::abs(late.gaussian.mean) == 0.0);
    CHECK(late.gaussian.sigma2 == doctest::Approx(0.2 / 0.5).epsilon(1e-9));

    // gain regime closed form
    auto grown = phasespace::propagate(coh, {-0.2, 0.05}, 5.0);
    CHECK(grown.gaussian.mean.real() == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    CHECK(grown.gaussian.sigma2 ==
          doctest::Approx(0.05 * (std::exp(1.0) - 1.0) / 0.2).epsilon(1e-12));

    // a -> 0 limit: pure diffusion
    auto diff = phasespace::propagate(coh, {0.0, 0.05}, 5.0);
    CHECK(diff.gaussian.sigma2 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("propagate matches a Monte-Carlo OU sampler") {
    // 10^6 trajectories sampled from the exact one-step transition kernel
    const OUFlow f{-0.2, 0.05};
    const double t = 5.0;
    const std::size_t n_traj = 1'000'000;
    std::mt19937_64 rng(987654321);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double decay = std::exp(-0.5 * f.rate * t);
    const double var_per_quad = 0.5 * f.diffusion * (-std::expm1(-f.rate * t)) / f.rate;
    const double sd = std::sqrt(var_per_quad);

    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n_traj; ++i) {
        const double x = 1.0 * decay + sd * gauss(rng);
        const double y = 0.0 + sd * gauss(rng);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
    }
    const double nn = static_cast<double>(n_traj);
    const double mean_x = sx / nn, mean_y = sy / nn;
    const double var = sxx / nn - mean_x * mean_x + syy / nn - mean_y * mean_y;

    auto prop = phasespace::propagate(PhaseEnsemble::coherent({1.0, 0.0}), f, t);
    const double se_mean = sd / std::sqrt(nn);
    CHECK(std::abs(prop.gaussian.mean.real() - mean_x) < 3.0 * se_mean);
    CHECK(std::abs(prop.gaussian.mean.imag() - mean_y) < 3.0 * se_mean);
    const double se_var = 2.0 * var_per_quad * std::sqrt(2.0 / nn); // ~ chi^2 error, 2 quadratures
    CHECK(std::abs(prop.gaussian.sigma2 - var) < 3.0 * se_var);
}

TEST_CASE("semigroup property") {
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const OUFlow f{0.4 * uni(rng), 0.2 * std::abs(uni(rng))};
        const double t1 = 2.0 * std::abs(uni(rng)), t2 = 3.0 * std::abs(uni(rng));
        auto e0 = PhaseEnsemble::displaced_thermal({uni(rng), uni(rng)}, std::abs(uni(rng)));
        auto once = phasespace::propagate(e0, f, t1 + t2);
        auto twice = phasespace::propagate(phasespace::propagate(e0, f, t1), f, t2);
        CHECK(std::abs(once.gaussian.mean - twice.gaussian.mean) < 1e-12);
        CHECK(std::abs(once.gaussian.sigma2 - twice.gaussian.sigma2) < 1e-12);
    }
}

TEST_CASE("energy evolution") {
    auto coh = PhaseEnsemble::coherent({1.0, 0.0}, 2.0);
    CHECK(phasespace::mean_energy(coh) == doctest::Approx(2.0));

    // long-time limit independent of the initial state
    const OUFlow f{0.3, 0.12};
    auto late = phasespace::propagate(coh, f, 120.0);
    CHECK(phasespace::mean_energy(late) == doctest::Approx(2.0 * 0.12 / 0.3).epsilon(1e-8));
    CHECK(phasespace::energy_trajectory(1.0, f, 1e9, 2.0) ==
          doctest::Approx(2.0 * 0.4).epsilon(1e-9));

    // the closed-form energy law agrees with the moment propagation per family
    const OUFlow gain{-0.0125, 0.0129};
    for (double t : {0.0, 10.0, 40.0, 80.0}) {
        auto prop = phasespace::propagate(coh, gain, t);
        CHECK(phasespace::mean_energy(prop) ==
              doctest::Approx(phasespace::energy_trajectory(1.0, gain, t, 2.0)).epsilon(1e-11));
        auto pa = PhaseEnsemble::phase_averaged(1.0, 0.0, 2.0);
        auto pa_t = phasespace::propagate(pa, gain, t);
        CHECK(phasespace::mean_energy(pa_t) ==
              doctest::Approx(phasespace::energy_trajectory(1.0, gain, t, 2.0)).epsilon(1e-11));
    }
}

TEST_CASE("work capacity") {
    CHECK(phasespace::work_capacity(PhaseEnsemble::thermal(1.3)) == 0.0);

    // exponentially growing coherent work capacity
    auto coh = PhaseEnsemble::coherent({1.0, 0.0});
    const OUFlow gain{-0.2, 0.05};
    auto grown = phasespace::propagate(coh, gain, 5.0);
    CHECK(phasespace::work_capacity(grown) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

    // fast path agrees with the Fock-space route
    auto dt = PhaseEnsemble::displaced_thermal({0.9, -0.3}, 0.4);
    const double fast = phasespace::work_capacity(dt);
    const double fock = hilbert::bound_ergotropy(phasespace::to_fock(dt));
    CHECK(std::abs(fast - fock) < 1e-6);

    // nonpassive phase-averaged state carries positive work capacity
    auto ring = PhaseEnsemble::phase_averaged(1.0, 0.25);
    CHECK(phasespace::phase_averaged_threshold(1.0, 0.05, 5.0).beta_prime_sq ==
          doctest::Approx(16.0));
    CHECK(phasespace::work_capacity(ring) > 1e-3);
}

TEST_CASE("radial passivity classifier") {
    // centered Gaussian: passive
    CHECK(phasespace::is_passive_radial(
        [](double r) { return std::exp(-r * r); }, 6.0, 400));

    // ring-peaked paper profile e^{-r^2}(1 + R^2 r^2): nonpassive for R^2 > 1
    CHECK(!phasespace::is_passive_radial(
        [](double r) { return std::exp(-r * r) * (1.0 + 2.0 * r * r); }, 6.0, 400));

    // boundary R^2 = 1: derivative vanishes at the origin, classified passive
    CHECK(phasespace::is_passive_radial(
        [](double r) { return std::exp(-r * r) * (1.0 + r * r); }, 6.0, 400));

    CHECK_THROWS_AS(phasespace::is_passive_radial([](double) { return 0.0; }, 6.0, 100),
                    std::invalid_argument);
}

TEST_CASE("phase averaged threshold") {
    auto a = phasespace::phase_averaged_threshold(1.0, 1.0, 2.0);
    CHECK(a.beta_prime_sq == doctest::Approx(2.0));
    CHECK(a.nonpassive);
    auto b = phasespace::phase_averaged_threshold(1.0, 1.0, 8.0);
    CHECK(b.beta_prime_sq == doctest::Approx(0.5));
    CHECK(!b.nonpassive);
    auto c = phasespace::phase_averaged_threshold(0.0, 1.0, 2.0);
    CHECK(c.beta_prime_sq == 0.0);
    CHECK(!c.nonpassive);
    CHECK_THROWS_AS(phasespace::phase_averaged_threshold(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("displace to passive") {
    phasespace::GaussianPhaseState s{{0.0, 0.0}, 0.5, 1.0};
    auto r0 = phasespace::displace_to_passive(s, {0.0, 0.0}, 0.0);
    CHECK(r0.extracted_work == 0.0);
    CHECK(r0.state.sigma2 == 0.5);

    phasespace::GaussianPhaseState s2{{2.0, 0.0}, 0.3, 1.0};
    auto r2 = phasespace::displace_to_passive(s2, {0.0, 0.0}, 0.0);
    CHECK(r2.extracted_work == doctest::Approx(4.0));
    CHECK(r2.state.sigma2 == doctest::Approx(0.3));

    // removed work equals the work capacity of the propagated state
    const OUFlow gain{-0.15, 0.02};
    phasespace::GaussianPhaseState s3{{1.0, 0.5}, 0.0, 1.0};
    auto r3 = phasespace::displace_to_passive(s3, gain, 7.0);
    auto prop = phasespace::propagate(PhaseEnsemble::displaced_thermal({1.0, 0.5}, 0.0), gain, 7.0);
    CHECK(std::abs(r3.extracted_work - phasespace::work_capacity(prop)) < 1e-9);
}

TEST_CASE("effective temperature of the diffused coherent state") {
    CHECK(phasespace::effective_temperature_coherent(0.5, 0.0, 1.0) == 0.0);
    CHECK(phasespace::effective_temperature_coherent(1.0, 1.0, 1.0) ==
          doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));

    // root-finder cross-check at d t = 3
    auto th = hilbert::displaced_thermal({0.7, 0.0}, 3.0, 1.0, 80);
    const double t_root = hilbert::gibbs_equivalent(th).temperature;
    const double t_formula = phasespace::effective_temperature_coherent(3.0, 1.0, 1.0);
    CHECK(std::abs(t_formula - t_root) / t_root < 0.01);
}

TEST_CASE("passivity is preserved by the flow") {
    std::mt19937 rng(31415);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 25; ++i) {
        // random passive input: centered gaussian mixture (radially non-increasing)
        std::vector<std::pair<double, phasespace::GaussianPhaseState>> parts;
        const int ncomp = 1 + static_cast<int>(uni(rng) * 3.0);
        double wsum = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            const double w = 0.2 + uni(rng);
            parts.push_back({w, {{0.0, 0.0}, 0.05 + 2.0 * uni(rng), 1.0}});
            wsum += w;
        }
        for (auto& [w, g] : parts) w /= wsum;
        auto ens = PhaseEnsemble::mixture(parts);
        CHECK(phasespace::is_passive_radial(phasespace::radial_profile(ens), 10.0, 500));

        // any flow, including gain, keeps the profile radially non-increasing
        const OUFlow f{-0.5 + 1.0 * uni(rng), 0.3 * uni(rng)};
        const double t = 3.0 * uni(rng);
        auto prop = phasespace::propagate(ens, f, t);
        CHECK(phasespace::is_passive_radial(phasespace::radial_profile(prop), 14.0, 500));
    }
}

TEST_CASE("thermal states remain thermal; energy grows without work") {
    const OUFlow gain{-0.0125, 0.0129};
    auto th = PhaseEnsemble::thermal(1.0);
    double prev_e = phasespace::mean_energy(th);
    for (double t : {20.0, 40.0, 80.0}) {
        auto prop = phasespace::propagate(th, gain, t);
        CHECK(std::abs(prop.gaussian.mean) == 0.0);
        const double expect = 1.0 * std::exp(-gain.rate * t) +
                              gain.diffusion * (-std::expm1(-gain.rate * t)) / gain.rate;
        CHECK(prop.gaussian.sigma2 == doctest::Approx(expect).epsilon(1e-12));
        const double e = phasespace::mean_energy(prop);
        CHECK(e > prev_e);
        prev_e = e;
        CHECK(phasespace::work_capacity(prop) == 0.0);
    }
}
