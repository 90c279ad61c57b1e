#include "ohe/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ohe::lindblad {

namespace {

using baths::BathLabel;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Jump coefficient of a single-mode ladder factor acting on level n.
double ladder_coeff(int shift, std::size_t n, std::size_t dim) {
    if (shift == 0) return 1.0;
    if (shift < 0) return n >= 1 ? std::sqrt(static_cast<double>(n)) : 0.0;
    return n + 1 < dim ? std::sqrt(static_cast<double>(n + 1)) : 0.0;
}

} // namespace

GeneratorSet build_generators(const baths::EngineParams& p, std::size_t dim_o,
                              std::size_t dim_m, bool quartic_correction) {
    require(dim_o >= 2 && dim_m >= 2, "build_generators: dims must be >= 2");
    baths::validate(p);

    GeneratorSet g;
    g.dim_o = dim_o;
    g.dim_m = dim_m;
    g.params = p;
    g.quartic_correction = quartic_correction;

    const double k = (p.g / p.omega_m) * (p.g / p.omega_m);
    const double wp = p.omega_plus(), wm = p.omega_minus(), w0 = p.omega_o;

    const BathLabel labels[2] = {BathLabel::hot, BathLabel::cold};
    const baths::BathSpectrum* spectra[2] = {&p.hot, &p.cold};
    const char* names[2] = {"h", "c"};

    for (int j = 0; j < 2; ++j) {
        const auto& b = *spectra[j];
        // q = 0: optical thermalization
        g.channels.push_back({labels[j], 0, -1, 0, baths::response(b, w0),
                              baths::response(b, w0), std::string("G") + names[j] + "(w0) O"});
        g.channels.push_back({labels[j], 0, +1, 0, baths::response(b, -w0),
                              baths::response(b, -w0), std::string("G") + names[j] + "(-w0) O+"});
        // q = +1: W1 = O M at G(w+), W1† = O†M† at G(-w+)
        g.channels.push_back({labels[j], +1, -1, -1, k * baths::response(b, wp),
                              baths::response(b, wp), std::string("G") + names[j] + "(w+) OM"});
        g.channels.push_back({labels[j], +1, +1, +1, k * baths::response(b, -wp),
                              baths::response(b, -wp), std::string("G") + names[j] + "(-w+) O+M+"});
        // q = -1: W-1 = O M† at G(w-), W-1† = O†M at G(-w-)
        g.channels.push_back({labels[j], -1, -1, +1, k * baths::response(b, wm),
                              baths::response(b, wm), std::string("G") + names[j] + "(w-) OM+"});
        g.channels.push_back({labels[j], -1, +1, -1, k * baths::response(b, -wm),
                              baths::response(b, -wm), std::string("G") + names[j] + "(-w-) O+M"});
    }
    // phonon bath on M: thermal GKLS pair
    g.channels.push_back({BathLabel::phonon, 0, 0, -1, p.gamma_m * (p.n_m_th + 1.0), 0.0,
                          "Gamma_M(n_th+1) M"});
    g.channels.push_back({BathLabel::phonon, 0, 0, +1, p.gamma_m * p.n_m_th, 0.0,
                          "Gamma_M n_th M+"});

    const std::size_t n = dim_o * dim_m;
    g.h_diag.resize(static_cast<Eigen::Index>(n));
    g.h_o_diag.resize(static_cast<Eigen::Index>(n));
    g.h_m_diag.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < dim_o; ++i) {
        double ho = p.omega_o * static_cast<double>(i);
        if (quartic_correction) {
            const double gi = p.g * static_cast<double>(i);
            ho -= gi * gi / p.omega_m;
        }
        for (std::size_t jm = 0; jm < dim_m; ++jm) {
            const auto idx = static_cast<Eigen::Index>(i * dim_m + jm);
            g.h_o_diag(idx) = ho;
            g.h_m_diag(idx) = p.omega_m * static_cast<double>(jm);
            g.h_diag(idx) = ho + g.h_m_diag(idx);
        }
    }

    g.w_total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    g.coeff.reserve(g.channels.size());
    g.offset.reserve(g.channels.size());
    for (const auto& ch : g.channels) {
        Eigen::VectorXd c(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < dim_o; ++i) {
            const double co = ladder_coeff(ch.shift_o, i, dim_o);
            for (std::size_t jm = 0; jm < dim_m; ++jm) {
                c(static_cast<Eigen::Index>(i * dim_m + jm)) =
                    co * ladder_coeff(ch.shift_m, jm, dim_m);
            }
        }
        g.w_total += ch.rate * c.cwiseProduct(c);
        g.coeff.push_back(std::move(c));
        g.offset.push_back(static_cast<long>(ch.shift_o) * static_cast<long>(dim_m) +
                           static_cast<long>(ch.shift_m));
    }
    return g;
}

Matrix channel_matrix(const GeneratorSet& g, std::size_t index) {
    require(index < g.channels.size(), "channel_matrix: index out of range");
    const std::size_t n = g.dim_o * g.dim_m;
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto& c = g.coeff[index];
    const long off = g.offset[index];
    for (std::size_t src = 0; src < n; ++src) {
        const double cs = c(static_cast<Eigen::Index>(src));
        if (cs == 0.0) continue;
        a(static_cast<Eigen::Index>(static_cast<long>(src) + off),
          static_cast<Eigen::Index>(src)) = cs;
    }
    return a;
}

namespace {

// out += rate * A rho A† for one structured channel: both indices shift by the
// same flat offset, so this is a weighted diagonal-band copy.
void accumulate_jump(const Eigen::VectorXd& c, long off, double rate, const Matrix& rho,
                     Matrix& out) {
    const auto n = rho.rows();
    const std::complex<double>* src = rho.data();
    std::complex<double>* dst = out.data();
    const double* cv = c.data();
    for (Eigen::Index col = 0; col < n; ++col) {
        const double cc = cv[col];
        if (cc == 0.0) continue;
        const double rc = rate * cc;
        const std::complex<double>* scol = src + col * n;
        std::complex<double>* dcol = dst + (col + off) * n + off;
        for (Eigen::Index row = 0; row < n; ++row) {
            const double cr = cv[row];
            if (cr == 0.0) continue;
            dcol[row] += (rc * cr) * scol[row];
        }
    }
}

void apply_channels(const GeneratorSet& g, const Matrix& rho, Matrix& out, int bath_filter) {
    const auto n = rho.rows();
    out.resize(n, n);
    // anticommutator part: -(w[r] + w[c])/2 * rho(r, c)
    if (bath_filter < 0) {
        const double* w = g.w_total.data();
        const std::complex<double>* src = rho.data();
        std::complex<double>* dst = out.data();
        for (Eigen::Index col = 0; col < n; ++col) {
            const double wc = w[col];
            const std::complex<double>* scol = src + col * n;
            std::complex<double>* dcol = dst + col * n;
            for (Eigen::Index row = 0; row < n; ++row) {
                dcol[row] = -0.5 * (w[row] + wc) * scol[row];
            }
        }
        for (std::size_t k = 0; k < g.channels.size(); ++k) {
            if (g.channels[k].rate == 0.0) continue;
            accumulate_jump(g.coeff[k], g.offset[k], g.channels[k].rate, rho, out);
        }
        return;
    }
    // single-bath variant: rebuild the diagonal weight for that bath only
    out.setZero();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < g.channels.size(); ++k) {
        if (static_cast<int>(g.channels[k].bath) != bath_filter || g.channels[k].rate == 0.0)
            continue;
        w += g.channels[k].rate * g.coeff[k].cwiseProduct(g.coeff[k]);
        accumulate_jump(g.coeff[k], g.offset[k], g.channels[k].rate, rho, out);
    }
    const std::complex<double>* src = rho.data();
    std::complex<double>* dst = out.data();
    for (Eigen::Index col = 0; col < n; ++col) {
        const double wc = w(col);
        for (Eigen::Index row = 0; row < n; ++row) {
            dst[col * n + row] -= 0.5 * (w(row) + wc) * src[col * n + row];
        }
    }
}

} // namespace

void apply_generator(const GeneratorSet& g, const Matrix& rho, Matrix& out) {
    apply_channels(g, rho, out, -1);
}

void apply_bath_generator(const GeneratorSet& g, baths::BathLabel bath, const Matrix& rho,
                          Matrix& out) {
    apply_channels(g, rho, out, static_cast<int>(bath));
}

JointState product_state(const hilbert::FockState& o, const hilbert::FockState& m) {
    JointState s;
    s.dim_o = o.dim;
    s.dim_m = m.dim;
    const auto n = static_cast<Eigen::Index>(o.dim * m.dim);
    s.matrix.resize(n, n);
    const auto dm = static_cast<Eigen::Index>(m.dim);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(o.dim); ++i) {
        for (Eigen::Index kk = 0; kk < static_cast<Eigen::Index>(o.dim); ++kk) {
            s.matrix.block(i * dm, kk * dm, dm, dm) = o.matrix(i, kk) * m.matrix;
        }
    }
    return s;
}

JointState make_joint(const baths::EngineParams& p, const hilbert::StateSpec& spec,
                      std::size_t dim_o, std::size_t dim_m) {
    // launch state of the running engine: the optical mode sits at its
    // pump-dressed quasi-steady occupation for the given mechanical state,
    // not at the bare two-bath equilibrium
    hilbert::FockState m = hilbert::make_state(spec, dim_m);
    baths::OpticalSteadyState ss;
    const double n_star = baths::quasi_steady_occupation(p, hilbert::mean_occupation(m));
    ss.n_o = n_star;
    ss.ratio = n_star / (n_star + 1.0);
    Eigen::VectorXd pop = ss.populations(dim_o);
    hilbert::Matrix rho_o =
        hilbert::Matrix::Zero(static_cast<Eigen::Index>(dim_o), static_cast<Eigen::Index>(dim_o));
    for (std::size_t i = 0; i < dim_o; ++i) {
        rho_o(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            pop(static_cast<Eigen::Index>(i));
    }
    hilbert::FockState o = hilbert::make_fock_state(std::move(rho_o), p.omega_o);
    return product_state(o, m);
}

namespace {

struct Rk4Scratch {
    Matrix k1, k2, k3, k4, tmp, full, half;
    void resize(Eigen::Index n) {
        k1.resize(n, n);
        k2.resize(n, n);
        k3.resize(n, n);
        k4.resize(n, n);
        tmp.resize(n, n);
        full.resize(n, n);
        half.resize(n, n);
    }
};

// One classical RK4 step: out = rho + h/6 (k1 + 2k2 + 2k3 + k4).
void rk4_step(const GeneratorSet& g, const Matrix& rho, double h, Matrix& out, Rk4Scratch& s,
              std::size_t& evals) {
    apply_generator(g, rho, s.k1);
    s.tmp = rho + (0.5 * h) * s.k1;
    apply_generator(g, s.tmp, s.k2);
    s.tmp = rho + (0.5 * h) * s.k2;
    apply_generator(g, s.tmp, s.k3);
    s.tmp = rho + h * s.k3;
    apply_generator(g, s.tmp, s.k4);
    out = rho + (h / 6.0) * (s.k1 + 2.0 * s.k2 + 2.0 * s.k3 + s.k4);
    evals += 4;
}

void record_sample(EvolveResult& res, const JointState& proto, const Matrix& rho, double t) {
    JointState s;
    s.dim_o = proto.dim_o;
    s.dim_m = proto.dim_m;
    s.matrix = 0.5 * (rho + rho.adjoint().eval());
    // diagnostics: trace drift and top-level populations
    const double tr = s.matrix.trace().real();
    res.max_trace_err = std::max(res.max_trace_err, std::abs(tr - 1.0));
    const auto dm = static_cast<Eigen::Index>(proto.dim_m);
    const auto dim_o = static_cast<Eigen::Index>(proto.dim_o);
    double top_o = 0.0, top_m = 0.0;
    for (Eigen::Index j = 0; j < dm; ++j) {
        top_o += s.matrix((dim_o - 1) * dm + j, (dim_o - 1) * dm + j).real();
    }
    for (Eigen::Index i = 0; i < dim_o; ++i) {
        top_m += s.matrix(i * dm + dm - 1, i * dm + dm - 1).real();
    }
    res.max_top_pop_o = std::max(res.max_top_pop_o, top_o);
    res.max_top_pop_m = std::max(res.max_top_pop_m, top_m);
    res.times.push_back(t);
    res.states.push_back(std::move(s));
}

} // namespace

EvolveResult evolve(const JointState& state, const GeneratorSet& gens,
                    const std::vector<double>& t_grid, const EvolveOptions& opt) {
    require(!t_grid.empty(), "evolve: empty time grid");
    require(state.dim_o == gens.dim_o && state.dim_m == gens.dim_m,
            "evolve: state/generator dimension mismatch");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        require(t_grid[i] > t_grid[i - 1], "evolve: time grid must be strictly increasing");
    }

    const auto n = static_cast<Eigen::Index>(state.size());
    EvolveResult res;
    res.states.reserve(t_grid.size());

    Matrix rho = state.matrix;
    Rk4Scratch scratch;
    scratch.resize(n);

    record_sample(res, state, rho, t_grid.front());

    double t = t_grid.front();
    double h = opt.h_init;
    const double norm_scale = std::max(1.0, rho.norm());

    for (std::size_t seg = 1; seg < t_grid.size(); ++seg) {
        const double t_target = t_grid[seg];
        while (t < t_target) {
            const bool clipped = h >= t_target - t;
            const double h_try = clipped ? (t_target - t) : h;
            std::size_t rejects = 0;
            double h_cur = h_try;
            for (;;) {
                rk4_step(gens, rho, h_cur, scratch.full, scratch, res.rhs_evals);
                rk4_step(gens, rho, 0.5 * h_cur, scratch.half, scratch, res.rhs_evals);
                rk4_step(gens, scratch.half, 0.5 * h_cur, scratch.tmp, scratch, res.rhs_evals);
                scratch.half = scratch.tmp;
                const double err = (scratch.half - scratch.full).norm() / 15.0;
                const double tol_abs = opt.tol * norm_scale;
                if (err <= tol_abs || h_cur <= opt.h_min) {
                    // accept with local extrapolation
                    rho = scratch.half + (scratch.half - scratch.full) / 15.0;
                    t += h_cur;
                    ++res.accepted_steps;
                    // controller: grow gently, shrink hard
                    const double ratio = err > 0.0 ? std::pow(tol_abs / err, 0.2) : 4.0;
                    const double grow = std::min(4.0, std::max(0.2, 0.9 * ratio));
                    if (!clipped || grow < 1.0) h = h_cur * grow;
                    else h = std::max(h, h_cur * grow);
                    break;
                }
                ++res.rejected_steps;
                if (++rejects > opt.max_rejects) {
                    std::ostringstream os;
                    os << "evolve: step-size failure at t = " << t << " (h = " << h_cur
                       << ", error estimate " << err << " > " << tol_abs << " after "
                       << opt.max_rejects << " halvings)";
                    throw std::runtime_error(os.str());
                }
                h_cur *= 0.5;
            }
        }
        record_sample(res, state, rho, t_target);
    }
    return res;
}

namespace {

// Clamp eigenvalues in [-1e-8, 0) to zero and renormalize; larger violations
// throw. Keeps truncation noise out of entropy computations.
hilbert::FockState floor_to_state(hilbert::Matrix rho, double omega) {
    rho = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<hilbert::Matrix> es(rho);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("positivity floor: eigensolve failed");
    const double lam_min = es.eigenvalues().minCoeff();
    // [-1e-8, 0) is benign truncation noise per the state contract; longer
    // runs accumulate integrator noise up to a few 1e-8, still clamped. A
    // violation past 1e-6 means the trajectory itself is bad.
    if (lam_min < -1e-6) {
        std::ostringstream os;
        os << "reduced state: eigenvalue " << lam_min << " below the positivity floor";
        throw std::runtime_error(os.str());
    }
    if (lam_min < 0.0) {
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        lam /= lam.sum();
        rho = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    }
    return hilbert::make_fock_state(std::move(rho), omega);
}

} // namespace

hilbert::FockState reduced_M(const JointState& s, double omega_m) {
    const auto dm = static_cast<Eigen::Index>(s.dim_m);
    const auto dim_o = static_cast<Eigen::Index>(s.dim_o);
    hilbert::Matrix rho = hilbert::Matrix::Zero(dm, dm);
    for (Eigen::Index i = 0; i < dim_o; ++i) {
        rho += s.matrix.block(i * dm, i * dm, dm, dm);
    }
    return floor_to_state(std::move(rho), omega_m);
}

hilbert::FockState reduced_O(const JointState& s, double omega_o) {
    const auto dm = static_cast<Eigen::Index>(s.dim_m);
    const auto dim_o = static_cast<Eigen::Index>(s.dim_o);
    hilbert::Matrix rho = hilbert::Matrix::Zero(dim_o, dim_o);
    for (Eigen::Index i = 0; i < dim_o; ++i) {
        for (Eigen::Index kk = 0; kk < dim_o; ++kk) {
            std::complex<double> sum{0.0, 0.0};
            for (Eigen::Index j = 0; j < dm; ++j) sum += s.matrix(i * dm + j, kk * dm + j);
            rho(i, kk) = sum;
        }
    }
    return floor_to_state(std::move(rho), omega_o);
}

HeatCurrents heat_currents(const JointState& s, const GeneratorSet& g) {
    require(s.dim_o == g.dim_o && s.dim_m == g.dim_m, "heat_currents: dimension mismatch");
    HeatCurrents j;
    const auto n = static_cast<Eigen::Index>(s.size());
    for (std::size_t k = 0; k < g.channels.size(); ++k) {
        const auto& ch = g.channels[k];
        if (ch.rate == 0.0) continue;
        // Tr[H D[A] rho] = rate * sum_src c(src)^2 rho_src,src (H[src+off]-H[src])
        const auto& c = g.coeff[k];
        const long off = g.offset[k];
        double jj = 0.0;
        for (Eigen::Index src = 0; src < n; ++src) {
            const double cs = c(src);
            if (cs == 0.0) continue;
            jj += cs * cs * s.matrix(src, src).real() *
                  (g.h_diag(src + off) - g.h_diag(src));
        }
        jj *= ch.rate;
        switch (ch.bath) {
        case baths::BathLabel::hot: j.hot += jj; break;
        case baths::BathLabel::cold: j.cold += jj; break;
        case baths::BathLabel::phonon: j.phonon += jj; break;
        }
    }
    return j;
}

DriftDiffusionFit extract_drift_diffusion(const std::vector<double>& times,
                                          const std::vector<std::complex<double>>& amplitude,
                                          const std::vector<double>& occupation,
                                          double gamma_m) {
    const std::size_t n = times.size();
    require(n >= 3 && amplitude.size() == n && occupation.size() == n,
            "extract_drift_diffusion: need >= 3 aligned samples");

    // drift: least-squares slope of ln|<M>| over t
    double tbar = 0.0, ybar = 0.0;
    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(amplitude[i]);
        if (m < 1e-12) {
            std::ostringstream os;
            os << "extract_drift_diffusion: |<M>| = " << m << " at t = " << times[i]
               << " is too small for a drift fit (ill-conditioned)";
            throw std::runtime_error(os.str());
        }
        logs[i] = std::log(m);
        tbar += times[i];
        ybar += logs[i];
    }
    tbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (times[i] - tbar) * (times[i] - tbar);
        sxy += (times[i] - tbar) * (logs[i] - ybar);
    }
    if (sxx < 1e-18) throw std::runtime_error("extract_drift_diffusion: degenerate time grid");
    const double slope = sxy / sxx;
    const double a_emp = -2.0 * slope;

    DriftDiffusionFit fit;
    fit.gamma = a_emp - gamma_m;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = ybar + slope * (times[i] - tbar);
        ss += (logs[i] - pred) * (logs[i] - pred);
    }
    fit.amp_residual = std::sqrt(ss / static_cast<double>(n));

    // diffusion: occupation n(t) = n0 e^{-a t} + d (1 - e^{-a t})/a;
    // regress y = n - n0 e^{-a t} on x = (1 - e^{-a t})/a through the origin
    const double n0 = occupation.front();
    double sxx2 = 0.0, sxy2 = 0.0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = times[i] - times.front();
        const double decay = std::exp(-a_emp * dt);
        xs[i] = a_emp != 0.0 ? (1.0 - decay) / a_emp : dt;
        ys[i] = occupation[i] - n0 * decay;
        sxx2 += xs[i] * xs[i];
        sxy2 += xs[i] * ys[i];
    }
    if (sxx2 < 1e-18)
        throw std::runtime_error(
            "extract_drift_diffusion: diffusion regressor is degenerate (window too short)");
    fit.d = sxy2 / sxx2;
    double ss2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ss2 += (ys[i] - fit.d * xs[i]) * (ys[i] - fit.d * xs[i]);
    }
    fit.n_residual = std::sqrt(ss2 / static_cast<double>(n));
    return fit;
}

DriftDiffusionFit extract_drift_diffusion(const EvolveResult& traj, double gamma_m) {
    std::vector<std::complex<double>> amp;
    std::vector<double> occ;
    amp.reserve(traj.states.size());
    occ.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        const auto m = reduced_M(s);
        amp.push_back(hilbert::mean_amplitude(m));
        occ.push_back(hilbert::mean_occupation(m));
    }
    return extract_drift_diffusion(traj.times, amp, occ, gamma_m);
}

} // namespace ohe::lindblad
