#include "nsk/linear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nsk/error.hpp"
#include "nsk/fit.hpp"

namespace nsk {

CMat2 mode_generator(const EquilibriumState& eq, double xi, Dissipation d) {
    const cplx ixi(0.0, xi);
    const double damping = d == Dissipation::physical ? xi * xi * eq.diffusivity() : 0.0;
    return {0.0, ixi, ixi * eq.beta(xi), -damping};
}

cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

ModePropagator::ModePropagator(const EquilibriumState& eq, double xi) : xi_(xi), m_(mode_generator(eq, xi)) {
    const DispersionPoint p = dispersion(eq, xi);
    lambda_plus_ = p.lambda_plus;
    lambda_minus_ = p.lambda_minus;
    jordan_ = std::abs(lambda_plus_ - lambda_minus_) < kJordanTol * std::max(1.0, std::abs(lambda_plus_));
}

CMat2 ModePropagator::exp(double t) const {
    const CMat2 id = CMat2::identity();
    if (jordan_) {
        const cplx lam = 0.5 * (lambda_plus_ + lambda_minus_);
        return std::exp(lam * t) * (id + t * (m_ - lam * id));
    }
    // Newton form around the node with the larger real part, so the
    // divided difference only sees e^{z} with Re z <= 0.
    const cplx z1 = t * lambda_plus_;
    const cplx z2 = t * lambda_minus_;
    const cplx e1 = std::exp(z1);
    if (z1 == z2) return e1 * id;
    const cplx dd = e1 * expm1(z2 - z1) / (z2 - z1);
    return e1 * id + dd * (t * m_ - z1 * id);
}

ModePropagator mode_propagator(const EquilibriumState& eq, double xi) { return ModePropagator(eq, xi); }

double v_metric_norm(const EquilibriumState& eq, const CMat2& p, double xi) {
    const double s = std::sqrt(eq.beta(xi));
    const CMat2 conj{p(0, 0), s * p(0, 1), p(1, 0) / s, p(1, 1)};
    return operator_norm(conj);
}

double weighted_u_norm(const CMat2& p, double xi) {
    const double w = std::sqrt(1.0 + xi * xi);
    const CMat2 conj{p(0, 0), w * p(0, 1), p(1, 0) / w, p(1, 1)};
    return operator_norm(conj);
}

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::parameter, "delta must lie in (0, 1)");
}

// i K~(xi), Hermitian.
CMat2 i_k_tilde(const EquilibriumState& eq, double xi) { return cplx(0.0, 1.0) * to_complex(compensating_K(eq, xi)); }

// Generator in V coordinates: -(i xi A~ + xi^2 Bbar).
CMat2 v_generator(const EquilibriumState& eq, double xi) {
    return -1.0 * (cplx(0.0, xi) * to_complex(symbol_A_tilde(eq, xi)) + (xi * xi) * to_complex(symbol_B_bar(eq)));
}

double mixing(double delta, double xi) { return delta * xi / (1.0 + xi * xi); }

template <typename Pred>
double largest_passing_k(Pred passes) {
    double hi = 1.0;
    while (passes(hi) && hi < 1e6) hi *= 2.0;
    if (passes(hi)) return hi;
    double lo = 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (passes(mid)) lo = mid;
        else hi = mid;
    }
    return lo;
}

constexpr double kEnergyTol = 1e-12;

}  // namespace

double energy_functional(const EquilibriumState& eq, double xi, const CVec2& v, double delta) {
    check_delta(delta);
    const cplx cross = inner(v, i_k_tilde(eq, xi) * v);
    return norm2(v) - mixing(delta, xi) * cross.real();
}

double energy_rate(const EquilibriumState& eq, double xi, const CVec2& v, double delta) {
    check_delta(delta);
    const CVec2 vt = v_generator(eq, xi) * v;
    const CVec2 hv = i_k_tilde(eq, xi) * v;
    return 2.0 * inner(vt, v).real() - mixing(delta, xi) * 2.0 * inner(vt, hv).real();
}

EnergyForms energy_forms(const EquilibriumState& eq, double xi, double delta) {
    check_delta(delta);
    const CMat2 h = i_k_tilde(eq, xi);
    const CMat2 g = v_generator(eq, xi);
    const CMat2 gs = adjoint(g);
    const double c = mixing(delta, xi);
    return {CMat2::identity() - c * h, (gs + g) - c * (gs * h + h * g)};
}

EnergyCheck verify_energy_inequality(const EquilibriumState& eq, double delta, std::span<const double> xi_grid,
                                     std::span<const CVec2> v_samples) {
    check_delta(delta);
    struct Sample {
        double r, e, rate, scale;
    };
    std::vector<Sample> samples;
    samples.reserve(xi_grid.size() * v_samples.size());
    EnergyCheck out;
    for (const double xi : xi_grid) {
        for (const CVec2& v : v_samples) {
            const Sample s{xi * xi / (1.0 + xi * xi), energy_functional(eq, xi, v, delta),
                           energy_rate(eq, xi, v, delta), norm2(v)};
            if (s.rate > kEnergyTol * s.scale && !out.witness_xi) {
                out.witness_xi = xi;
                out.witness_vector = v;
            }
            samples.push_back(s);
        }
    }
    auto passes = [&](double k) {
        return std::all_of(samples.begin(), samples.end(), [k](const Sample& s) {
            return s.rate + k * s.r * s.e <= kEnergyTol * s.scale;
        });
    };
    if (!passes(0.0)) return out;
    out.passed = true;
    out.k = largest_passing_k(passes);
    return out;
}

EnergyCheck verify_energy_inequality_all_directions(const EquilibriumState& eq, double delta,
                                                    std::span<const double> xi_grid) {
    check_delta(delta);
    struct Form {
        double r;
        EnergyForms f;
    };
    std::vector<Form> forms;
    forms.reserve(xi_grid.size());
    for (const double xi : xi_grid) forms.push_back({xi * xi / (1.0 + xi * xi), energy_forms(eq, xi, delta)});
    auto passes = [&](double k) {
        return std::all_of(forms.begin(), forms.end(), [k](const Form& f) {
            return hermitian_max_eigenvalue(f.f.rate + (k * f.r) * f.f.energy) <= kEnergyTol;
        });
    };
    EnergyCheck out;
    if (!passes(0.0)) return out;
    out.passed = true;
    out.k = largest_passing_k(passes);
    return out;
}

double sufficient_delta(const EquilibriumState& eq) {
    const double d = eq.v_bar * std::sqrt(eq.q_bar) / eq.mu_bar;
    return std::clamp(d, 0.0, 1.0 - 1e-12);
}

bool energy_equivalence_holds(const EquilibriumState& eq, double delta, std::span<const double> xi_grid, double c1) {
    for (const double xi : xi_grid) {
        // E = V* (I - c iK~) V; iK~ has eigenvalues +-|K~|.
        const double spread = std::abs(mixing(delta, xi)) * operator_norm(compensating_K(eq, xi));
        if (1.0 - spread < 1.0 / c1 || 1.0 + spread > c1) return false;
    }
    return true;
}

std::vector<CVec2> random_unit_vectors(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<CVec2> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        CVec2 v{{cplx(normal(rng), normal(rng)), cplx(normal(rng), normal(rng))}};
        const double n = std::sqrt(norm2(v));
        if (n < 1e-12) continue;
        out.push_back((1.0 / n) * v);
    }
    return out;
}

EnergyParams select_delta(const EquilibriumState& eq, std::span<const double> xi_grid,
                          std::span<const CVec2> v_samples) {
    if (xi_grid.empty()) throw Error(ErrorKind::parameter, "select_delta needs a grid");
    constexpr double kC1 = 2.0;
    auto attempt = [&](double delta) -> std::optional<EnergyParams> {
        if (!energy_equivalence_holds(eq, delta, xi_grid, kC1)) return std::nullopt;
        const EnergyCheck chk = verify_energy_inequality(eq, delta, xi_grid, v_samples);
        if (!chk.passed || !(chk.k > 0.0)) return std::nullopt;
        return EnergyParams{delta, chk.k, kC1};
    };
    if (auto p = attempt(0.5)) return *p;
    double lo = 0.0, hi = 0.5;
    std::optional<EnergyParams> best;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (auto p = attempt(mid)) {
            best = p;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (!best) throw Error(ErrorKind::structural, "no admissible delta found for the mode energy");
    return *best;
}

EnergyParams select_delta(const EquilibriumState& eq, std::span<const double> xi_grid) {
    const auto samples = random_unit_vectors(20, 0x5eed);
    return select_delta(eq, xi_grid, samples);
}

EnvelopeReport verify_pointwise_decay(const EquilibriumState& eq, std::span<const double> xi_grid,
                                      std::span<const double> t_grid) {
    if (xi_grid.empty() || t_grid.empty()) throw Error(ErrorKind::parameter, "envelope needs xi and t samples");
    std::vector<double> nonzero;
    for (const double xi : xi_grid)
        if (xi != 0.0) nonzero.push_back(xi);
    const double c = nonzero.empty() ? 1.0 : strict_dissipativity_scan(eq, nonzero).c;

    struct Point {
        double rt;  // xi^2 t / (1 + xi^2)
        double v_norm;
        double u_norm;
    };
    std::vector<Point> pts;
    pts.reserve(xi_grid.size() * t_grid.size());
    for (const double xi : xi_grid) {
        const ModePropagator prop(eq, xi);
        for (const double t : t_grid) {
            if (t < 0.0) throw Error(ErrorKind::parameter, "envelope times must be nonnegative");
            const CMat2 e = prop.exp(t);
            pts.push_back({xi * xi * t / (1.0 + xi * xi), v_metric_norm(eq, e, xi), weighted_u_norm(e, xi)});
        }
    }

    EnvelopeReport rep;
    constexpr int kLadder = 20;
    for (int i = 0; i < kLadder; ++i) rep.ladder.push_back(c * (kLadder - i) / kLadder);
    for (const double k : rep.ladder) {
        if (k < kEnvelopeMinK) break;
        double cv = 1.0, cu = 1.0;
        for (const auto& p : pts) {
            const double grow = std::exp(k * p.rt);
            cv = std::max(cv, p.v_norm * grow);
            cu = std::max(cu, p.u_norm * grow);
        }
        if (cv <= kEnvelopeMaxC && cu * cu <= kEnvelopeMaxC) {
            rep.v_form = {cv, k};
            rep.u_form = {cu * cu, k};
            return rep;
        }
    }
    throw Error(ErrorKind::structural, "no decay envelope with C <= 100 and k >= 1e-3");
}

std::vector<EnvelopeSample> envelope_samples(const EquilibriumState& eq, const DecayEnvelope& env,
                                             std::span<const double> xi_grid, std::span<const double> t_grid) {
    std::vector<EnvelopeSample> out;
    out.reserve(xi_grid.size() * t_grid.size());
    for (const double xi : xi_grid) {
        const ModePropagator prop(eq, xi);
        for (const double t : t_grid) {
            EnvelopeSample s;
            s.xi = xi;
            s.t = t;
            s.opnorm = v_metric_norm(eq, prop.exp(t), xi);
            s.bound = env.C * std::exp(-env.k * xi * xi * t / (1.0 + xi * xi));
            s.ok = s.opnorm <= s.bound * (1.0 + 1e-12);
            out.push_back(s);
        }
    }
    return out;
}

SpectralCoeffs semigroup_apply(const EquilibriumState& eq, const SpectralGrid& grid, const SpectralCoeffs& f,
                               double t) {
    const int n = grid.size();
    if (static_cast<int>(f.v.size()) != n || static_cast<int>(f.u.size()) != n) {
        throw Error(ErrorKind::grid_mismatch, "field does not match the grid");
    }
    if (t == 0.0) return f;
    SpectralCoeffs out{std::vector<cplx>(n), std::vector<cplx>(n)};
    const auto xi = grid.xi();
    for (int k = 0; k < n; ++k) {
        CMat2 e = ModePropagator(eq, xi[k]).exp(t);
        if (k == n / 2) {
            for (auto& x : e.a) x = x.real();
        }
        out.v[k] = e(0, 0) * f.v[k] + e(0, 1) * f.u[k];
        out.u[k] = e(1, 0) * f.v[k] + e(1, 1) * f.u[k];
    }
    return out;
}

SpectralField semigroup_apply(const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                              const SpectralField& f, double t) {
    if (static_cast<int>(f.v.size()) != grid.size() || static_cast<int>(f.u.size()) != grid.size() ||
        fft.size() != grid.size()) {
        throw Error(ErrorKind::grid_mismatch, "field does not match the grid");
    }
    if (t == 0.0) return f;
    return to_physical(fft, semigroup_apply(eq, grid, to_spectral(fft, f), t));
}

double linear_decay_norm(const SpectralGrid& grid, const SpectralCoeffs& c, int l) {
    const double a = derivative_sobolev_norm_sq(grid, c.v, l, 1.0);
    const double b = derivative_sobolev_norm_sq(grid, c.u, l, 0.0);
    return std::sqrt(a + b);
}

NormTrace linear_decay_experiment(const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                                  const SpectralField& f, std::span<const int> orders, std::span<const double> t_grid,
                                  FitWindow window) {
    if (!(window.t_lo > 0.0) || window.t_hi < 10.0 * window.t_lo) {
        throw Error(ErrorKind::fit, "decay fit window must span at least one decade");
    }
    const SpectralCoeffs f_hat = to_spectral(fft, f);
    const int n = grid.size();
    const auto xi = grid.xi();
    std::vector<ModePropagator> props;
    props.reserve(n);
    for (int k = 0; k < n; ++k) props.emplace_back(eq, xi[k]);

    NormTrace trace;
    trace.orders.assign(orders.begin(), orders.end());
    SpectralCoeffs c{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (const double t : t_grid) {
        for (int k = 0; k < n; ++k) {
            CMat2 e = props[k].exp(t);
            if (k == n / 2) {
                for (auto& x : e.a) x = x.real();
            }
            c.v[k] = e(0, 0) * f_hat.v[k] + e(0, 1) * f_hat.u[k];
            c.u[k] = e(1, 0) * f_hat.v[k] + e(1, 1) * f_hat.u[k];
        }
        std::vector<double> row;
        row.reserve(orders.size());
        for (const int l : orders) row.push_back(linear_decay_norm(grid, c, l));
        trace.times.push_back(t);
        trace.sobolev.push_back(std::move(row));
    }
    for (std::size_t j = 0; j < orders.size(); ++j) {
        const auto col = trace.column(j);
        const auto fit = fit_decay_exponent(trace.times, col, window.t_lo, window.t_hi);
        trace.slopes.push_back(fit ? std::optional<double>(fit->slope) : std::nullopt);
    }
    return trace;
}

}  // namespace nsk
