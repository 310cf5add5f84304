#include "nsk/model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "nsk/error.hpp"

namespace nsk {
namespace {

constexpr int kValidationSamples = 2000;
constexpr int kSpinodalSamples = 10000;
constexpr double kBisectionRelTol = 1e-12;

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

struct CoefficientFns {
    ScalarFn value;
    ScalarFn deriv;
};

CoefficientFns lagrangian_coefficient(const CoefficientLaw& law, bool is_capillarity) {
    const double c = law.coef;
    const double e = law.exponent;
    switch (law.kind) {
        case CoefficientLaw::Kind::constant:
            return {[c](double) { return c; }, [](double) { return 0.0; }};
        case CoefficientLaw::Kind::power:
            return {[c, e](double v) { return c * std::pow(v, e); },
                    [c, e](double v) { return c * e * std::pow(v, e - 1.0); }};
        case CoefficientLaw::Kind::eulerian_power: {
            // mu~(rho) = c rho^e -> mu(v) = c v^-e;
            // kappa~(rho) = c rho^e -> kappa(v) = c v^-(e+5).
            const double p = is_capillarity ? -(e + 5.0) : -e;
            return {[c, p](double v) { return c * std::pow(v, p); },
                    [c, p](double v) { return c * p * std::pow(v, p - 1.0); }};
        }
    }
    throw Error(ErrorKind::parameter, "unknown coefficient law");
}

void check_positive_coefficients(const ScalarFn& mu, const ScalarFn& kappa, Interval domain) {
    for (int i = 0; i < kValidationSamples; ++i) {
        const double v = domain.lo + domain.width() * (i + 0.5) / kValidationSamples;
        const double m = mu(v);
        const double k = kappa(v);
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw Error(ErrorKind::constitutive, "viscosity not positive at v = " + fmt_double(v));
        }
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw Error(ErrorKind::constitutive, "capillarity not positive at v = " + fmt_double(v));
        }
    }
}

ConstitutiveLaws with_transport(ScalarFn p, ScalarFn dp, const TransportLaws& transport) {
    auto mu = lagrangian_coefficient(transport.viscosity, false);
    auto kappa = lagrangian_coefficient(transport.capillarity, true);
    return {std::move(p), std::move(dp), std::move(mu.value), std::move(kappa.value), std::move(kappa.deriv)};
}

}  // namespace

ConstitutiveLaws lagrangian_from_eulerian(const EulerianLaws& e, Interval domain) {
    ConstitutiveLaws out;
    out.pressure = [p = e.pressure](double v) { return p(1.0 / v); };
    // d/dv p~(1/v) = -p~'(1/v) / v^2
    out.pressure_deriv = [dp = e.pressure_deriv](double v) { return -dp(1.0 / v) / (v * v); };
    out.viscosity = [mu = e.viscosity](double v) { return mu(1.0 / v); };
    out.capillarity = [k = e.capillarity](double v) { return k(1.0 / v) / std::pow(v, 5); };
    // d/dv [k~(1/v) v^-5] = -k~'(1/v) v^-7 - 5 k~(1/v) v^-6
    out.capillarity_deriv = [k = e.capillarity, dk = e.capillarity_deriv](double v) {
        const double rho = 1.0 / v;
        return -dk(rho) * std::pow(v, -7) - 5.0 * k(rho) * std::pow(v, -6);
    };
    check_positive_coefficients(out.viscosity, out.capillarity, domain);
    return out;
}

FluidModel::FluidModel(std::string name, ConstitutiveLaws laws, double domain_bound, std::vector<Interval> phases)
    : name_(std::move(name)), laws_(std::move(laws)), domain_bound_(domain_bound), phases_(std::move(phases)) {
    if (!(domain_bound_ > 1.0)) {
        throw Error(ErrorKind::parameter, "domain bound C0 must exceed 1");
    }
    if (phases_.empty()) {
        throw Error(ErrorKind::parameter, "model has no phase intervals");
    }
    const Interval dom = domain();
    check_positive_coefficients(laws_.viscosity, laws_.capillarity, dom);
    for (std::size_t j = 0; j < phases_.size(); ++j) {
        const Interval& ph = phases_[j];
        if (!(ph.lo < ph.hi) || ph.lo < dom.lo || ph.hi > dom.hi) {
            throw Error(ErrorKind::parameter, "phase " + std::to_string(j) + " not inside (1/C0, C0)");
        }
        for (int i = 0; i < kValidationSamples; ++i) {
            const double v = ph.lo + ph.width() * (i + 0.5) / kValidationSamples;
            if (!(laws_.pressure_deriv(v) < 0.0)) {
                throw Error(ErrorKind::hyperbolicity,
                            "p'(v) >= 0 at v = " + fmt_double(v) + " in phase " + std::to_string(j));
            }
        }
    }
}

int FluidModel::phase_of(double v) const {
    for (std::size_t j = 0; j < phases_.size(); ++j) {
        if (phases_[j].contains(v, kPhaseMargin)) return static_cast<int>(j);
    }
    return -1;
}

FluidModel make_adiabatic_model(double r_theta, double gamma, double c0, const TransportLaws& transport) {
    if (!(r_theta > 0.0)) throw Error(ErrorKind::parameter, "adiabatic law needs R_theta > 0");
    if (!(gamma > 1.0)) throw Error(ErrorKind::parameter, "adiabatic law needs gamma > 1");
    auto laws = with_transport([r_theta, gamma](double v) { return r_theta * std::pow(v, -gamma); },
                               [r_theta, gamma](double v) { return -gamma * r_theta * std::pow(v, -gamma - 1.0); },
                               transport);
    return FluidModel("adiabatic", std::move(laws), c0, {Interval{1.0 / c0, c0}});
}

FluidModel make_power_model(double a, double gamma, double c0, const TransportLaws& transport) {
    if (!(a > 0.0) || !(gamma > 0.0)) throw Error(ErrorKind::parameter, "power law needs A > 0 and gamma > 0");
    auto laws = with_transport([a, gamma](double v) { return a * std::pow(v, -gamma); },
                               [a, gamma](double v) { return -gamma * a * std::pow(v, -gamma - 1.0); }, transport);
    return FluidModel("custom-power", std::move(laws), c0, {Interval{1.0 / c0, c0}});
}

std::vector<double> vdw_spinodal_roots(double a, double b, double r, double theta, double c0) {
    auto dp = [=](double v) { return -r * theta / ((v - b) * (v - b)) + 2.0 * a / (v * v * v); };
    std::vector<double> roots;
    double prev_v = b + (c0 - b) / (kSpinodalSamples + 1);
    double prev = dp(prev_v);
    for (int i = 2; i <= kSpinodalSamples; ++i) {
        const double v = b + (c0 - b) * i / (kSpinodalSamples + 1);
        const double cur = dp(v);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = prev_v;
            double hi = v;
            const bool lo_neg = prev < 0.0;
            while (hi - lo > kBisectionRelTol * std::abs(hi)) {
                const double mid = 0.5 * (lo + hi);
                if ((dp(mid) < 0.0) == lo_neg) lo = mid;
                else hi = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_v = v;
        prev = cur;
    }
    return roots;
}

FluidModel make_vdw_model(double a, double b, double r, double theta, double c0, const TransportLaws& transport) {
    if (!(a > 0.0 && b > 0.0 && r > 0.0 && theta > 0.0)) {
        throw Error(ErrorKind::parameter, "van der Waals law needs positive a, b, R, theta");
    }
    if (!(c0 > b)) throw Error(ErrorKind::parameter, "van der Waals law needs C0 > b");
    const double theta_c = 8.0 * a / (27.0 * b * r);
    if (!(theta < theta_c)) {
        throw Error(ErrorKind::parameter,
                    "no spinodal: theta = " + fmt_double(theta) + " >= theta_c = " + fmt_double(theta_c));
    }
    const auto roots = vdw_spinodal_roots(a, b, r, theta, c0);
    if (roots.size() != 2) {
        throw Error(ErrorKind::root_finding,
                    "expected two spinodal roots of p'(v) in (b, C0), found " + std::to_string(roots.size()));
    }
    auto laws = with_transport([=](double v) { return r * theta / (v - b) - a / (v * v); },
                               [=](double v) { return -r * theta / ((v - b) * (v - b)) + 2.0 * a / (v * v * v); },
                               transport);
    const double liquid_lo = std::max(b, 1.0 / c0);
    return FluidModel("vdw", std::move(laws), c0, {Interval{liquid_lo, roots[0]}, Interval{roots[1], c0}});
}

EquilibriumState make_equilibrium(const FluidModel& model, double v_bar, double u_bar) {
    const int phase = model.phase_of(v_bar);
    if (phase < 0) {
        throw Error(ErrorKind::hyperbolicity, "v_bar = " + fmt_double(v_bar) + " is not interior to any phase");
    }
    EquilibriumState eq;
    eq.v_bar = v_bar;
    eq.u_bar = u_bar;
    eq.q_bar = -model.pressure_deriv(v_bar);
    eq.mu_bar = model.viscosity(v_bar);
    eq.kappa_bar = model.capillarity(v_bar);
    eq.phase_index = phase;
    if (!(eq.q_bar > 0.0)) {
        throw Error(ErrorKind::hyperbolicity, "p'(v_bar) >= 0 at v_bar = " + fmt_double(v_bar));
    }
    return eq;
}

FluidModel canonical_model() { return make_adiabatic_model(1.0, 2.0, 10.0); }

EquilibriumState canonical_equilibrium() { return make_equilibrium(canonical_model(), 1.0, 0.0); }

}  // namespace nsk
