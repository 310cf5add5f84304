// Acceptance checks. `acceptance <n>` runs criterion n, prints detail lines
// and one PASS/FAIL line, and exits nonzero on failure. With no argument
// every criterion runs in turn.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nsk/error.hpp"
#include "nsk/fit.hpp"
#include "nsk/linear.hpp"
#include "nsk/nonlinear.hpp"
#include "nsk/quadrature.hpp"
#include "nsk/symbol.hpp"

using namespace nsk;
using std::numbers::pi;

namespace {

// Tolerances and budgets.
constexpr double kCoercivityTol = 1e-12;
constexpr double kDispersionTol = 1e-10;  // relative to max(1, xi^2 / 2)
constexpr double kDissipativityC = 0.5;
constexpr double kDissipativityTol = 1e-6;
constexpr double kIdentityTol = 1e-12;
constexpr double kEnvelopeMinK = 0.1;
constexpr double kEnvelopeMaxC = 10.0;
constexpr double kEnergyC1 = 2.0;
constexpr double kEnergyMinK = 0.1;
constexpr double kEnergyTol = 1e-12;
constexpr double kSlopeSlack = 0.05;
constexpr double kMeanDriftTol = 1e-10;
constexpr double kExponentLo = -0.40;
constexpr double kExponentHi = -0.15;
constexpr double kLinearMatchTol = 0.03;
constexpr double kMinOrder = 3.5;
constexpr double kOneStepTol = 1e-6;
constexpr double kI2Ref = 5.2441;
constexpr double kI2RelTol = 0.02;
constexpr double kEllipticTol = 1e-4;
constexpr double kStableChange = 0.01;

struct Outcome {
    bool pass = true;
    void require(bool ok, const std::string& what) {
        std::printf("  %-4s %s\n", ok ? "ok" : "FAIL", what.c_str());
        pass = pass && ok;
    }
};

std::string fmt(const char* f, double a) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

EquilibriumState vdw_liquid() {
    static const FluidModel m = make_vdw_model(3.0, 1.0 / 3.0, 8.0 / 3.0, 0.9, 10.0);
    return make_equilibrium(m, 0.5, 0.0);
}

SpectralField gaussian(const SpectralGrid& grid, double width) {
    SpectralField f;
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j) - grid.length() / 2;
        f.v.push_back(std::exp(-x * x / (width * width)));
        f.u.push_back(0.0);
    }
    return f;
}

void structural(Outcome& out) {
    const auto xi = default_nonzero_xi_grid();
    const auto full = default_xi_grid();
    const std::pair<const char*, EquilibriumState> states[] = {{"canonical", canonical_equilibrium()},
                                                              {"vdw liquid", vdw_liquid()}};
    for (const auto& [name, eq] : states) {
        const std::string tag = std::string(name) + ": ";
        const CouplingReport c = genuine_coupling_check(eq, xi);
        out.require(c.coupled, tag + "genuinely coupled" + fmt(" (min angle %.3g)", c.min_angle));
        const FriedrichsReport f = friedrichs_infeasibility(eq);
        out.require(f.null_space.empty() && !f.friedrichs_symmetrizable,
                    tag + "no constant symmetrizer" + fmt(" (solution dimension %.0f)", double(f.null_space.size())));
        const CoercivityReport co = verify_coercivity(eq, full);
        out.require(co.max_deviation <= kCoercivityTol,
                    tag + fmt("[K A]^s + B = (mu/4v) diag(1,3), deviation %.3g", co.max_deviation));
        out.require(co.theta_bar == eq.mu_bar / (4.0 * eq.v_bar), tag + fmt("theta_bar = %.17g", co.theta_bar));
    }
    out.require(verify_coercivity(canonical_equilibrium(), full).theta_bar == 0.25, "canonical theta_bar is 1/4");
}

EquilibriumState random_equilibrium(std::mt19937_64& rng, std::vector<FluidModel>& keep) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    TransportLaws t;
    t.viscosity = unit(rng) < 0.5 ? CoefficientLaw::constant(in(0.2, 5.0)) : CoefficientLaw::power(in(0.2, 5.0), in(-1, 1));
    t.capillarity = unit(rng) < 0.5 ? CoefficientLaw::constant(in(0.2, 5.0))
                                    : CoefficientLaw::eulerian_power(in(0.2, 5.0), in(0, 2));
    const double pick = unit(rng);
    if (pick < 0.4) {
        keep.push_back(make_adiabatic_model(in(0.5, 3.0), in(1.1, 3.0), 10.0, t));
    } else if (pick < 0.7) {
        keep.push_back(make_power_model(in(0.5, 3.0), in(0.5, 3.0), 10.0, t));
    } else {
        keep.push_back(make_vdw_model(3.0, 1.0 / 3.0, 8.0 / 3.0, in(0.7, 0.95), 10.0, t));
    }
    const FluidModel& m = keep.back();
    const Interval ph = m.phases()[static_cast<std::size_t>(unit(rng) * m.phases().size())];
    const double v = ph.lo + ph.width() * in(0.05, 0.95);
    return make_equilibrium(m, v, in(-2.0, 2.0));
}

void dispersion_suite(Outcome& out) {
    const EquilibriumState eq = canonical_equilibrium();
    const auto xi = default_nonzero_xi_grid();
    double worst = 0.0;
    for (const double x : xi) {
        const DispersionPoint d = dispersion(eq, x);
        const double scale = std::max(1.0, 0.5 * x * x);
        worst = std::max({worst, std::abs(d.lambda_plus.real() + 0.5 * x * x) / scale,
                          std::abs(d.lambda_minus.real() + 0.5 * x * x) / scale});
    }
    out.require(xi.size() == 2000 && worst <= kDispersionTol,
                fmt("Re lambda = -xi^2/2 on %.0f points, worst relative error %.3g", double(xi.size()), worst));
    const DissipativityScan s = strict_dissipativity_scan(eq, xi);
    out.require(std::abs(s.c - kDissipativityC) <= kDissipativityTol, fmt("dissipativity constant c = %.9f", s.c));

    std::mt19937_64 rng(2024);
    std::vector<FluidModel> models;
    double max_re = -1e300, worst_id = 0.0;
    for (int i = 0; i < 20; ++i) {
        const EquilibriumState e = random_equilibrium(rng, models);
        const DissipativityScan si = strict_dissipativity_scan(e, xi);
        max_re = std::max(max_re, si.max_re_lambda);
        for (const double x : xi) {
            const DispersionPoint d = dispersion(e, x);
            const double tr = -x * x * e.diffusivity(), det = x * x * e.beta(x);
            worst_id = std::max({worst_id, std::abs(d.lambda_plus + d.lambda_minus - tr) / std::abs(tr),
                                 std::abs(d.lambda_plus * d.lambda_minus - det) / det});
        }
    }
    out.require(max_re < 0.0, fmt("20 random equilibria: max Re lambda = %.3g", max_re));
    out.require(worst_id <= kIdentityTol, fmt("trace/determinant identities, worst relative error %.3g", worst_id));
}

void envelope_suite(Outcome& out) {
    const EquilibriumState eq = canonical_equilibrium();
    const auto xi = default_xi_grid();
    const std::vector<double> t{0.1, 1.0, 10.0, 100.0};
    const EnvelopeReport r = verify_pointwise_decay(eq, xi, t);
    out.require(r.v_form.k >= kEnvelopeMinK && r.v_form.C <= kEnvelopeMaxC,
                fmt("V envelope k = %.4f, C = %.4f", r.v_form.k, r.v_form.C));
    bool all = true;
    for (const auto& s : envelope_samples(eq, r.v_form, xi, t)) all = all && s.ok;
    out.require(all, "V envelope holds at every (xi, t) sample");

    // Weighted U form, re-checked from the propagators.
    const double c_u = std::sqrt(r.u_form.C);
    bool u_ok = true;
    for (const double x : xi) {
        const ModePropagator p(eq, x);
        for (const double s : t) {
            const double rate = x * x * s / (1.0 + x * x);
            const double n = weighted_u_norm(p.exp(s), x);
            u_ok = u_ok && n * n <= r.u_form.C * std::exp(-2.0 * r.u_form.k * rate) * (1 + 1e-12);
        }
    }
    out.require(u_ok && r.u_form.k >= kEnvelopeMinK && c_u <= kEnvelopeMaxC,
                fmt("weighted U envelope k = %.4f, C = %.4f", r.u_form.k, c_u));
}

void energy_suite(Outcome& out) {
    const EquilibriumState eq = canonical_equilibrium();
    const auto xi = default_nonzero_xi_grid();
    const auto vs = random_unit_vectors(20, 20240601);
    const EnergyParams p = select_delta(eq, xi, vs);
    out.require(p.C1 == kEnergyC1 && energy_equivalence_holds(eq, p.delta, xi, kEnergyC1),
                fmt("delta = %.6f gives equivalence constant %.1f", p.delta, kEnergyC1));
    double worst = -1e300, lo = 1e300, hi = 0.0;
    for (const double x : xi) {
        const double r = x * x / (1.0 + x * x);
        for (const CVec2& v : vs) {
            const double e = energy_functional(eq, x, v, p.delta);
            worst = std::max(worst, energy_rate(eq, x, v, p.delta) + p.k * r * e - kEnergyTol * norm2(v));
            lo = std::min(lo, e / norm2(v));
            hi = std::max(hi, e / norm2(v));
        }
    }
    out.require(lo >= 1.0 / kEnergyC1 && hi <= kEnergyC1, fmt("E / |V|^2 in [%.4f, %.4f]", lo, hi));
    out.require(p.k >= kEnergyMinK && worst <= 0.0,
                fmt("dE/dt + k r E <= 1e-12 |V|^2 at 2000 x 20 samples with k = %.4f", p.k));
}

void linear_rates(Outcome& out) {
    const EquilibriumState eq = canonical_equilibrium();
    const SpectralGrid grid(16384.0, 32768);
    const Fft fft(grid.size());
    const std::vector<int> orders{0, 1, 2};
    const auto t = log_space(1.0, 1e4, 41);
    const NormTrace tr = linear_decay_experiment(eq, grid, fft, gaussian(grid, 5.0), orders, t, {1e2, 1e4});
    for (std::size_t j = 0; j < orders.size(); ++j) {
        const double bound = -(orders[j] / 2.0 + 0.25) + kSlopeSlack;
        const bool ok = tr.slopes[j] && *tr.slopes[j] <= bound;
        out.require(ok, fmt("l = %.0f: slope %.4f", orders[j], tr.slopes[j].value_or(NAN)) + fmt(" <= %.2f", bound));
    }
}

void nonlinear_decay(Outcome& out) {
    const FluidModel model = canonical_model();
    const EquilibriumState eq = canonical_equilibrium();
    SimulationConfig cfg;
    cfg.length = 400.0 * pi;
    cfg.points = 4096;
    cfg.t_final = 500.0;

    auto run = [&](double eps) {
        SimulationConfig c = cfg;
        c.init.amplitude = eps;
        return simulate(model, eq, c);
    };

    const SpectralGrid grid(cfg.length, cfg.points);
    const Fft fft(cfg.points);
    const std::vector<int> order0{0};
    const auto t = log_space(1.0, cfg.t_final, 41);
    const NormTrace lin = linear_decay_experiment(eq, grid, fft, gaussian(grid, cfg.init.width), order0, t,
                                                  {cfg.fit_lo, cfg.fit_hi});

    for (const double eps : {1e-2, 1e-6}) {
        const bool is_big = eps == 1e-2;
        try {
            const SimulationResult r = run(eps);
            const std::string tag = is_big ? "eps = 1e-2: " : "eps = 1e-6: ";
            out.require(true, tag + fmt("no blow-up over %.0f steps of dt = %.6f", double(r.steps), r.dt));
            out.require(r.mean_drift <= kMeanDriftTol, tag + fmt("mean drift %.3g", r.mean_drift));
            const double slope = r.fit ? r.fit->slope : NAN;
            if (is_big) {
                out.require(slope >= kExponentLo && slope <= kExponentHi,
                            tag + fmt("fitted exponent %.4f", slope) + fmt(" in [%.2f, %.2f]", kExponentLo, kExponentHi));
            } else {
                const double target = lin.slopes[0].value_or(NAN);
                out.require(std::abs(slope - target) <= kLinearMatchTol,
                            tag + fmt("fitted exponent %.4f vs linear l = 0 slope %.4f", slope, target));
            }
        } catch (const Error& e) {
            out.require(false, std::string(is_big ? "eps = 1e-2: " : "eps = 1e-6: ") + e.what());
        }
    }
}

double l2_diff(const PerturbationState& a, const PerturbationState& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) r += std::pow(a.v[i] - b.v[i], 2) + std::pow(a.u[i] - b.u[i], 2);
    return std::sqrt(r);
}

void integrator_order(Outcome& out) {
    const FluidModel model = canonical_model();
    const EquilibriumState eq = canonical_equilibrium();
    const SpectralGrid grid(400.0 * pi, 4096);
    InitialData init;
    init.amplitude = 1e-2;
    const PerturbationState s0 = make_initial_state(grid, init);
    std::vector<PerturbationState> sol;
    for (const double dt : {0.25, 0.125, 0.0625}) {
        const Etdrk4 e(model, eq, grid, dt);
        PerturbationState s = s0;
        for (long i = 0, n = std::lround(1.0 / dt); i < n; ++i) s = e.step(s);
        sol.push_back(s);
    }
    const double ratio = l2_diff(sol[0], sol[1]) / l2_diff(sol[1], sol[2]);
    out.require(std::log2(ratio) >= kMinOrder, fmt("error ratio %.3f, order %.3f", ratio, std::log2(ratio)));

    init.amplitude = 1e-8;
    const PerturbationState tiny = make_initial_state(grid, init);
    const Fft fft(grid.size());
    for (const double dt : {default_time_step(eq, grid), 0.1}) {
        const PerturbationState one = step(model, eq, grid, tiny, dt);
        const SpectralField ex = semigroup_apply(eq, grid, fft, SpectralField{tiny.v, tiny.u}, dt);
        double norm = 0.0;
        for (int j = 0; j < grid.size(); ++j) norm += ex.v[j] * ex.v[j] + ex.u[j] * ex.u[j];
        const double rel = l2_diff(one, PerturbationState{ex.v, ex.u, dt}) / std::sqrt(norm);
        out.require(rel <= kOneStepTol, fmt("one step of dt = %.5f: relative deviation %.3g", dt, rel));
    }
}

void integral_bounds(Outcome& out) {
    for (int l = 0; l <= 3; ++l) {
        const double v = I0(0.0, l, 1.0), exact = 2.0 / (2 * l + 1);
        out.require(std::abs(v - exact) <= 2.0 * std::numeric_limits<double>::epsilon() * exact,
                    fmt("I0(0, %.0f) = %.17g", l, v));
    }
    const double i2 = I2(1e4);
    out.require(std::abs(i2 - kI2Ref) <= kI2RelTol * kI2Ref,
                fmt("I2(1e4) = %.6f, relative gap to 5.2441 is %.4f", i2, std::abs(i2 - kI2Ref) / kI2Ref));
    const double f4 = 4.0 * elliptic_F(pi / 2, -1.0);
    out.require(std::abs(f4 - kI2Ref) <= kEllipticTol, fmt("4 F(pi/2 | -1) = %.9f", f4));

    const auto t = default_integral_times();
    std::vector<IntegralReport> reports;
    for (int l = 0; l <= 3; ++l) reports.push_back(I0_report(t, l, 1.0));
    reports.push_back(I1_report(t, 1.0));
    reports.push_back(I2_report(t));
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const IntegralReport& r = reports[i];
        const std::string name = i < 4 ? "I0 (l = " + std::to_string(i) + ")" : r.name;
        const double change = last_decade_change(r);
        out.require(std::isfinite(r.sup) && change < kStableChange,
                    name + fmt(": sup %.6f, last-decade change %.4f", r.sup, change));
    }
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {"structural suite", 5.0, structural},       {"dispersion suite", 5.0, dispersion_suite},
        {"envelope suite", 30.0, envelope_suite},    {"energy suite", 30.0, energy_suite},
        {"linear decay rates", 120.0, linear_rates}, {"nonlinear decay", 600.0, nonlinear_decay},
        {"integrator order", 120.0, integrator_order}, {"integral bounds", 60.0, integral_bounds},
    };
    return all;
}

bool run_criterion(int n) {
    const Criterion& c = criteria().at(n - 1);
    std::printf("criterion %d: %s\n", n, c.name);
    std::fflush(stdout);
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.run(out);
    } catch (const std::exception& e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(elapsed <= c.budget_s, fmt("runtime %.2f s (budget %.0f s)", elapsed, c.budget_s));
    std::printf("%s criterion %d: %s\n", out.pass ? "PASS" : "FAIL", n, c.name);
    std::fflush(stdout);
    return out.pass;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 2) {
        std::fprintf(stderr, "usage: acceptance [criterion 1-8]\n");
        return 2;
    }
    if (argc == 2) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > static_cast<int>(criteria().size())) {
            std::fprintf(stderr, "unknown criterion %s\n", argv[1]);
            return 2;
        }
        return run_criterion(n) ? 0 : 1;
    }
    bool all = true;
    for (int n = 1; n <= static_cast<int>(criteria().size()); ++n) all = run_criterion(n) && all;
    return all ? 0 : 1;
}
