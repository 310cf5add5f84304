#include "nsk/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

#include "nsk/error.hpp"
#include "nsk/linear.hpp"
#include "nsk/symbol.hpp"

namespace nsk {

namespace {

const Interval& equilibrium_phase(const FluidModel& model, const EquilibriumState& eq) {
    if (eq.phase_index < 0 || eq.phase_index >= static_cast<int>(model.phases().size())) {
        throw Error(ErrorKind::parameter, "equilibrium does not belong to this model");
    }
    return model.phases()[eq.phase_index];
}

void check_sizes(const SpectralGrid& grid, const Fft& fft, std::size_t nv, std::size_t nu) {
    const auto n = static_cast<std::size_t>(grid.size());
    if (nv != n || nu != n || fft.size() != grid.size()) {
        throw Error(ErrorKind::grid_mismatch, "state does not match the grid");
    }
}

// Flushes subnormals to zero while alive. Decaying high modes otherwise
// drift into the subnormal range, where arithmetic is many times slower.
class FlushDenormals {
public:
#if defined(__SSE2__)
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#endif
};

void check_point(const Interval& phase, double total, double value) {
    if (!std::isfinite(value) || !std::isfinite(total)) throw Error(ErrorKind::blow_up, "non-finite value in the state");
    if (!phase.contains(total, kPhaseMargin)) {
        throw Error(ErrorKind::domain_violation, "v_bar + v left the phase interval");
    }
}

// Full momentum flux -p(V) + mu(V)/V u_x - kappa(V) v_xx - kappa'(V) v_x^2 / 2.
double full_flux(const FluidModel& m, double vol, double ux, double vx, double vxx) {
    return -m.pressure(vol) + m.viscosity(vol) / vol * ux - m.capillarity(vol) * vxx -
           0.5 * m.capillarity_deriv(vol) * vx * vx;
}

double linear_flux(const EquilibriumState& eq, double w, double ux, double vxx) {
    return eq.q_bar * w + eq.diffusivity() * ux - eq.kappa_bar * vxx;
}

struct Derivatives {
    std::vector<double> vx, vxx, ux;
};

Derivatives physical_derivatives(const SpectralGrid& grid, const Fft& fft, std::span<const double> v,
                                 std::span<const double> u) {
    return {spectral_derivative(grid, fft, v, 1), spectral_derivative(grid, fft, v, 2),
            spectral_derivative(grid, fft, u, 1)};
}

CVec2 apply(const CMat2& m, cplx a, cplx b) { return {{m(0, 0) * a + m(0, 1) * b, m(1, 0) * a + m(1, 1) * b}}; }

// The nonlinear term only has a u component, so only the second column of
// each coefficient matrix acts on it.
CVec2 apply_u(const CMat2& m, cplx n) { return {{m(0, 1) * n, m(1, 1) * n}}; }

CMat2 real_part(CMat2 m) {
    for (auto& x : m.a) x = x.real();
    return m;
}

}  // namespace

std::vector<double> H2_eval(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid,
                            const Fft& fft, const PerturbationState& state) {
    check_sizes(grid, fft, state.v.size(), state.u.size());
    const Interval& phase = equilibrium_phase(model, eq);
    const auto d = physical_derivatives(grid, fft, state.v, state.u);
    const double p_bar = model.pressure(eq.v_bar);
    const double visc_bar = eq.diffusivity();
    std::vector<double> h(state.v.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
        const double w = state.v[j];
        const double vol = eq.v_bar + w;
        check_point(phase, vol, state.u[j]);
        h[j] = -(model.pressure(vol) - p_bar + eq.q_bar * w) + (model.viscosity(vol) / vol - visc_bar) * d.ux[j] -
               (model.capillarity(vol) - eq.kappa_bar) * d.vxx[j] - 0.5 * model.capillarity_deriv(vol) * d.vx[j] * d.vx[j];
    }
    return h;
}

SpectralField rhs(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                  const PerturbationState& state, RhsForm form) {
    check_sizes(grid, fft, state.v.size(), state.u.size());
    const Interval& phase = equilibrium_phase(model, eq);
    SpectralField out;
    out.v = spectral_derivative(grid, fft, state.u, 1);
    if (form == RhsForm::full) {
        const auto d = physical_derivatives(grid, fft, state.v, state.u);
        std::vector<double> flux(state.v.size());
        for (std::size_t j = 0; j < flux.size(); ++j) {
            const double vol = eq.v_bar + state.v[j];
            check_point(phase, vol, state.u[j]);
            flux[j] = full_flux(model, vol, d.ux[j], d.vx[j], d.vxx[j]);
        }
        out.u = spectral_derivative(grid, fft, flux, 1);
        return out;
    }
    const auto h = H2_eval(model, eq, grid, fft, state);
    const auto hx = spectral_derivative(grid, fft, h, 1);
    const auto vx = spectral_derivative(grid, fft, state.v, 1);
    const auto uxx = spectral_derivative(grid, fft, state.u, 2);
    const auto vxxx = spectral_derivative(grid, fft, state.v, 3);
    out.u.resize(state.u.size());
    for (std::size_t j = 0; j < out.u.size(); ++j) {
        out.u[j] = eq.q_bar * vx[j] + eq.diffusivity() * uxx[j] - eq.kappa_bar * vxxx[j] + hx[j];
    }
    return out;
}

cplx phi(int k, cplx z) {
    if (k < 0) throw Error(ErrorKind::parameter, "phi needs k >= 0");
    if (k == 0) return std::exp(z);
    if (std::abs(z) >= 1.0) {
        // phi_k = (phi_{k-1} - 1/(k-1)!) / z, cancellation-free for |z| >= 1.
        cplx p = std::exp(z);
        double fact = 1.0;
        for (int j = 1; j <= k; ++j) {
            p = (p - 1.0 / fact) / z;
            fact *= j;
        }
        return p;
    }
    double fact = std::tgamma(k + 1.0);
    cplx term = 1.0 / fact;
    cplx sum = term;
    for (int j = 1; j < 30; ++j) {
        term *= z / static_cast<double>(j + k);
        sum += term;
    }
    return sum;
}

Etdrk4::Etdrk4(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid, double dt)
    : model_(model), eq_(eq), phase_(equilibrium_phase(model, eq)), grid_(grid), fft_(grid.size()), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::parameter, "time step must be positive");
    const int n = grid.size();
    const auto xi = grid.xi();
    modes_.reserve(n);
    keep_.resize(n);
    const double h = dt;
    auto f1 = [](cplx z) { return phi(1, z) - 3.0 * phi(2, z) + 4.0 * phi(3, z); };
    auto f2 = [](cplx z) { return phi(2, z) - 2.0 * phi(3, z); };
    auto f3 = [](cplx z) { return -phi(2, z) + 4.0 * phi(3, z); };
    auto p1 = [](cplx z) { return phi(1, z); };
    for (int k = 0; k < n; ++k) {
        keep_[k] = grid.dealias_keep(k);
        const ModePropagator prop(eq, xi[k]);
        const CMat2 hm = h * prop.generator();
        ModeCoeffs c{prop.exp(h), prop.exp(0.5 * h), (0.5 * h) * matrix_function(p1, 0.5 * hm),
                     h * matrix_function(f1, hm), h * matrix_function(f2, hm), h * matrix_function(f3, hm)};
        if (k == n / 2) {
            c = {real_part(c.e), real_part(c.e2), real_part(c.q), real_part(c.f1), real_part(c.f2), real_part(c.f3)};
        }
        modes_.push_back(c);
    }
}

void Etdrk4::nonlinear_u(const std::vector<cplx>& v, const std::vector<cplx>& u, std::vector<cplx>& out) const {
    const int n = grid_.size();
    const auto xi = grid_.xi();
    // Two real fields per complex transform: (v + i v_x) and (v_xx + i u_x).
    thread_local std::vector<cplx> za, zb, g;
    za.resize(n);
    zb.resize(n);
    g.resize(n);
    const cplx i(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        const cplx ik(0.0, k == n / 2 ? 0.0 : xi[k]);
        za[k] = v[k] + i * (ik * v[k]);
        zb[k] = -xi[k] * xi[k] * v[k] + i * (ik * u[k]);
    }
    fft_.inverse(za, za);
    fft_.inverse(zb, zb);
    const double p_bar = model_.pressure(eq_.v_bar);
    for (int j = 0; j < n; ++j) {
        const double w = za[j].real(), vx = za[j].imag();
        const double vxx = zb[j].real(), ux = zb[j].imag();
        const double vol = eq_.v_bar + w;
        check_point(phase_, vol, ux);
        g[j] = full_flux(model_, vol, ux, vx, vxx) + p_bar - linear_flux(eq_, w, ux, vxx);
    }
    fft_.forward(g, g);
    out.resize(n);
    for (int k = 0; k < n; ++k) out[k] = keep_[k] ? cplx(0.0, xi[k]) * g[k] : cplx(0.0);
}

SpectralCoeffs Etdrk4::nonlinear_term(const SpectralCoeffs& c) const {
    SpectralCoeffs out{std::vector<cplx>(c.v.size()), {}};
    nonlinear_u(c.v, c.u, out.u);
    return out;
}

SpectralCoeffs Etdrk4::step(const SpectralCoeffs& c) const {
    const int n = grid_.size();
    if (static_cast<int>(c.v.size()) != n || static_cast<int>(c.u.size()) != n) {
        throw Error(ErrorKind::grid_mismatch, "state does not match the integrator grid");
    }
    // Stage buffers are reused across steps.
    thread_local std::vector<cplx> nu, na, nb, nc, ev, eu, av, au, bv, bu;
    for (auto* w : {&ev, &eu, &av, &au, &bv, &bu}) w->resize(n);
    nonlinear_u(c.v, c.u, nu);
    for (int k = 0; k < n; ++k) {
        // e^{L dt/2} c is shared by the first two stages.
        const CVec2 x = apply(modes_[k].e2, c.v[k], c.u[k]);
        ev[k] = x[0];
        eu[k] = x[1];
        const CVec2 y = x + apply_u(modes_[k].q, nu[k]);
        av[k] = y[0];
        au[k] = y[1];
    }
    nonlinear_u(av, au, na);
    for (int k = 0; k < n; ++k) {
        const CVec2 y = CVec2{{ev[k], eu[k]}} + apply_u(modes_[k].q, na[k]);
        bv[k] = y[0];
        bu[k] = y[1];
    }
    nonlinear_u(bv, bu, nb);
    for (int k = 0; k < n; ++k) {
        const CVec2 y = apply(modes_[k].e2, av[k], au[k]) + apply_u(modes_[k].q, 2.0 * nb[k] - nu[k]);
        bv[k] = y[0];
        bu[k] = y[1];
    }
    nonlinear_u(bv, bu, nc);
    SpectralCoeffs out{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (int k = 0; k < n; ++k) {
        const ModeCoeffs& m = modes_[k];
        const CVec2 x = apply(m.e, c.v[k], c.u[k]) + apply_u(m.f1, nu[k]) + apply_u(m.f2, 2.0 * (na[k] + nb[k])) +
                        apply_u(m.f3, nc[k]);
        if (!std::isfinite(x[0].real() + x[0].imag() + x[1].real() + x[1].imag())) {
            throw Error(ErrorKind::blow_up, "non-finite Fourier coefficient");
        }
        out.v[k] = x[0];
        out.u[k] = x[1];
    }
    return out;
}

PerturbationState Etdrk4::step(const PerturbationState& s) const {
    check_sizes(grid_, fft_, s.v.size(), s.u.size());
    const auto next = step(to_spectral(fft_, SpectralField{s.v, s.u}));
    auto field = to_physical(fft_, next);
    return {std::move(field.v), std::move(field.u), s.t + dt_};
}

PerturbationState step(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid,
                       const PerturbationState& state, double dt) {
    return Etdrk4(model, eq, grid, dt).step(state);
}

double default_time_step(const EquilibriumState& eq, const SpectralGrid& grid, double cap) {
    double max_im = 0.0;
    for (const double xi : grid.xi()) max_im = std::max(max_im, std::abs(dispersion(eq, xi).lambda_plus.imag()));
    const double dx = grid.dx();
    const double scale = max_im > 0.0 ? std::min(1.0, 1.0 / (dx * max_im)) : 1.0;
    return std::min(cap, 0.5 * dx * scale);
}

InitialData::Shape parse_shape(const std::string& name) {
    if (name == "gaussian") return InitialData::Shape::gaussian;
    if (name == "sech2") return InitialData::Shape::sech2;
    if (name == "random") return InitialData::Shape::random;
    throw Error(ErrorKind::config, "unknown initial shape '" + name + "'");
}

PerturbationState make_initial_state(const SpectralGrid& grid, const InitialData& init) {
    if (!(init.width > 0.0)) throw Error(ErrorKind::parameter, "initial width must be positive");
    const int n = grid.size();
    const double centre = 0.5 * grid.length();
    PerturbationState s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
    switch (init.shape) {
        case InitialData::Shape::gaussian:
            for (int j = 0; j < n; ++j) {
                const double y = (grid.x(j) - centre) / init.width;
                s.v[j] = init.amplitude * std::exp(-y * y);
            }
            break;
        case InitialData::Shape::sech2:
            for (int j = 0; j < n; ++j) {
                const double c = 1.0 / std::cosh((grid.x(j) - centre) / init.width);
                s.v[j] = init.amplitude * c * c;
            }
            break;
        case InitialData::Shape::random: {
            std::mt19937_64 rng(init.seed);
            std::normal_distribution<double> normal(0.0, 1.0);
            const Fft fft(n);
            const auto xi = grid.xi();
            auto draw = [&]() {
                std::vector<cplx> c(n, 0.0);
                for (int k = 1; k < n / 2; ++k) {
                    if (std::abs(xi[k]) > 1.0 / init.width) continue;
                    c[k] = cplx(normal(rng), normal(rng));
                    c[n - k] = std::conj(c[k]);
                }
                auto f = fft.inverse_real(c);
                const double peak = std::accumulate(f.begin(), f.end(), 0.0,
                                                    [](double m, double x) { return std::max(m, std::abs(x)); });
                for (auto& x : f) x = peak > 0.0 ? init.amplitude * x / peak : 0.0;
                return f;
            };
            s.v = draw();
            s.u = draw();
            break;
        }
    }
    return s;
}

std::vector<double> SimulationResult::norm_s_minus_1() const {
    const auto& orders = trace.orders;
    const auto it = std::find(orders.begin(), orders.end(), static_cast<int>(orders.size()) - 2);
    return trace.column(static_cast<std::size_t>(it - orders.begin()));
}

SimulationResult simulate(const FluidModel& model, const EquilibriumState& eq, const SimulationConfig& config) {
    const SpectralGrid grid(config.length, config.points);
    return simulate(model, eq, config, make_initial_state(grid, config.init));
}

SimulationResult simulate(const FluidModel& model, const EquilibriumState& eq, const SimulationConfig& config,
                          const PerturbationState& initial) {
    if (config.s < 3) throw Error(ErrorKind::parameter, "s must be at least 3");
    if (!(config.t_final > 0.0)) throw Error(ErrorKind::parameter, "final time must be positive");
    if (config.save_every < 0) throw Error(ErrorKind::parameter, "save_every must be nonnegative");
    if (config.dt < 0.0) throw Error(ErrorKind::parameter, "time step must be nonnegative");
    const SpectralGrid grid(config.length, config.points);
    const int n = grid.size();
    const int s = config.s;

    const double dt_req = config.dt > 0.0 ? config.dt : default_time_step(eq, grid);
    const long steps = std::max(1L, static_cast<long>(std::ceil(config.t_final / dt_req - 1e-9)));
    const double dt = config.t_final / static_cast<double>(steps);
    const Etdrk4 integ(model, eq, grid, dt);
    const Fft& fft = integ.fft();
    check_sizes(grid, fft, initial.v.size(), initial.u.size());

    SpectralCoeffs c = to_spectral(fft, SpectralField{initial.v, initial.u});
    const double initial_size = std::sqrt(sobolev_norm_sq(grid, c.v, s + 1) + sobolev_norm_sq(grid, c.u, s));
    if (initial_size > config.amplitude_cap) {
        throw Error(ErrorKind::parameter, "initial data exceed the amplitude cap");
    }
    const int save_every =
        config.save_every > 0 ? config.save_every : std::max(1, static_cast<int>(std::lround(1.0 / dt)));

    SimulationResult res;
    res.dt = dt;
    res.steps = steps;
    NormTrace& tr = res.trace;
    for (int l = 0; l <= s; ++l) tr.orders.push_back(l);
    const double mean_v0 = c.v[0].real() / n;
    const double mean_u0 = c.u[0].real() / n;
    double norm0 = 0.0;
    double sup_part = 0.0;
    double integral = 0.0;
    double prev_t = 0.0, prev_rate = 0.0;
    double es = 0.0;

    auto record = [&](double t) {
        std::vector<double> row;
        for (int l = 0; l <= s; ++l) row.push_back(state_norm(grid, c, l));
        const double ns1 = row[s - 1];
        tr.times.push_back(t);
        tr.sobolev.push_back(row);
        tr.l2.push_back(std::sqrt(sobolev_norm_sq(grid, c.v, 0) + sobolev_norm_sq(grid, c.u, 0)));

        sup_part = std::max(sup_part, sobolev_norm_sq(grid, c.v, s + 1) + sobolev_norm_sq(grid, c.u, s));
        const double rate = derivative_sobolev_norm_sq(grid, c.v, 1, s + 1) + derivative_sobolev_norm_sq(grid, c.u, 1, s);
        if (tr.times.size() > 1) integral += 0.5 * (t - prev_t) * (rate + prev_rate);
        prev_t = t;
        prev_rate = rate;
        tr.triple.push_back(std::sqrt(sup_part + integral));
        es = std::max(es, std::pow(1.0 + t, 0.25) * ns1);
        tr.E_s.push_back(es);

        res.mean_drift = std::max({res.mean_drift, std::abs(c.v[0].real() / n - mean_v0),
                                   std::abs(c.u[0].real() / n - mean_u0)});
        double high = 0.0, total = 0.0;
        for (int k = 0; k < n; ++k) {
            const double e = std::norm(c.v[k]) + std::norm(c.u[k]);
            total += e;
            if (!grid.dealias_keep(k)) high += e;
        }
        if (total > 0.0) res.max_high_fraction = std::max(res.max_high_fraction, high / total);
        double imag = 0.0;
        to_physical(fft, c, &imag);
        res.max_imag_residue = std::max(res.max_imag_residue, imag);

        if (tr.times.size() == 1) {
            norm0 = ns1;
        } else if (!std::isfinite(ns1) || (norm0 > 0.0 && ns1 > config.blow_up_factor * norm0)) {
            throw Error(ErrorKind::blow_up, "norm grew beyond the blow-up threshold");
        }
    };

    const FlushDenormals ftz;
    record(0.0);
    for (long i = 1; i <= steps; ++i) {
        c = integ.step(c);
        if (i % save_every == 0 || i == steps) record(static_cast<double>(i) * dt);
    }

    const double hi = std::min(config.fit_hi, config.t_final);
    if (config.fit_lo > 0.0 && hi >= 10.0 * config.fit_lo) {
        res.fit = fit_decay_exponent(tr.times, res.norm_s_minus_1(), config.fit_lo, hi);
    }
    tr.slopes.assign(tr.orders.size(), std::nullopt);
    if (res.fit) {
        tr.slopes[s - 1] = res.fit->slope;
        res.passed = res.fit->slope >= config.exponent_lo && res.fit->slope <= config.exponent_hi;
    } else {
        res.passed = norm0 == 0.0;
    }
    return res;
}

}  // namespace nsk
