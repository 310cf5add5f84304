#pragma once

// Constitutive laws of the isothermal Korteweg fluid in Lagrangian form and
// the constant equilibria the rest of the library linearizes around.

#include <functional>
#include <string>
#include <vector>

namespace nsk {

using ScalarFn = std::function<double(double)>;

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x, double margin = 0.0) const { return x > lo + margin && x < hi - margin; }
    double width() const { return hi - lo; }
};

/// Margin for the strict interior test on phase intervals.
inline constexpr double kPhaseMargin = 1e-9;

/// Pointwise evaluators of p, p', mu, kappa, kappa' as functions of the
/// specific volume v.
struct ConstitutiveLaws {
    ScalarFn pressure;
    ScalarFn pressure_deriv;
    ScalarFn viscosity;
    ScalarFn capillarity;
    ScalarFn capillarity_deriv;
};

/// The same coefficients as functions of the density rho.
struct EulerianLaws {
    ScalarFn pressure;
    ScalarFn pressure_deriv;
    ScalarFn viscosity;
    ScalarFn capillarity;
    ScalarFn capillarity_deriv;
};

/// Closed-form viscosity / capillarity law.
///   constant:        c                (Lagrangian)
///   power:           c * v^e          (Lagrangian)
///   eulerian_power:  c * rho^e        (Eulerian, converted on construction)
struct CoefficientLaw {
    enum class Kind { constant, power, eulerian_power };

    Kind kind = Kind::constant;
    double coef = 1.0;
    double exponent = 0.0;

    static CoefficientLaw constant(double c) { return {Kind::constant, c, 0.0}; }
    static CoefficientLaw power(double c, double e) { return {Kind::power, c, e}; }
    static CoefficientLaw eulerian_power(double c, double e) { return {Kind::eulerian_power, c, e}; }
};

struct TransportLaws {
    CoefficientLaw viscosity = CoefficientLaw::constant(1.0);
    CoefficientLaw capillarity = CoefficientLaw::constant(1.0);
};

/// Convert Eulerian coefficient functions to the Lagrangian ones:
/// p(v) = p~(1/v), mu(v) = mu~(1/v), kappa(v) = kappa~(1/v) / v^5.
/// The coefficients mu and kappa are sampled on `domain` and must be
/// positive there.
ConstitutiveLaws lagrangian_from_eulerian(const EulerianLaws& eulerian, Interval domain);

/// Immutable fluid model. Construction validates H1 (phases inside the
/// admissible domain), H2 (mu, kappa > 0) and H3 (p' < 0 on every phase)
/// on a sample grid; violations throw Error.
class FluidModel {
public:
    FluidModel(std::string name, ConstitutiveLaws laws, double domain_bound, std::vector<Interval> phases);

    const std::string& name() const { return name_; }
    const ConstitutiveLaws& laws() const { return laws_; }
    double domain_bound() const { return domain_bound_; }
    Interval domain() const { return {1.0 / domain_bound_, domain_bound_}; }
    const std::vector<Interval>& phases() const { return phases_; }

    double pressure(double v) const { return laws_.pressure(v); }
    double pressure_deriv(double v) const { return laws_.pressure_deriv(v); }
    double viscosity(double v) const { return laws_.viscosity(v); }
    double capillarity(double v) const { return laws_.capillarity(v); }
    double capillarity_deriv(double v) const { return laws_.capillarity_deriv(v); }

    /// Index of the phase whose strict interior (margin kPhaseMargin)
    /// contains v, or -1.
    int phase_of(double v) const;

private:
    std::string name_;
    ConstitutiveLaws laws_;
    double domain_bound_;
    std::vector<Interval> phases_;
};

/// p(v) = R_theta / v^gamma on the single phase (1/C0, C0).
FluidModel make_adiabatic_model(double r_theta, double gamma, double c0, const TransportLaws& transport = {});

/// p(v) = A / v^gamma with any gamma > 0 (isothermal gamma = 1 allowed).
FluidModel make_power_model(double a, double gamma, double c0, const TransportLaws& transport = {});

/// Van der Waals p(v) = R theta / (v - b) - a / v^2 below the critical
/// temperature 8a / (27 b R). Phases are the liquid branch (max(b, 1/C0), alpha)
/// and the vapour branch (beta, C0), where alpha < beta are the spinodal
/// roots of p'(v) = 0.
FluidModel make_vdw_model(double a, double b, double r, double theta, double c0, const TransportLaws& transport = {});

/// Spinodal roots of the van der Waals law, located by a sign-change scan of
/// p' on 10^4 uniform samples of (b, C0) followed by bisection.
std::vector<double> vdw_spinodal_roots(double a, double b, double r, double theta, double c0);

struct EquilibriumState {
    double v_bar = 1.0;
    double u_bar = 0.0;
    double q_bar = 0.0;      // -p'(v_bar)
    double mu_bar = 0.0;     // mu(v_bar)
    double kappa_bar = 0.0;  // kappa(v_bar)
    int phase_index = -1;

    /// mu_bar / v_bar, the dissipation coefficient of the linearized system.
    double diffusivity() const { return mu_bar / v_bar; }
    /// beta(xi) = q_bar + xi^2 kappa_bar.
    double beta(double xi) const { return q_bar + xi * xi * kappa_bar; }
};

/// Throws Error(hyperbolicity) unless v_bar is interior to a phase with
/// p'(v_bar) < 0.
EquilibriumState make_equilibrium(const FluidModel& model, double v_bar, double u_bar);

/// The canonical test state: adiabatic R_theta = 1, gamma = 2, C0 = 10,
/// mu = kappa = 1, at (v_bar, u_bar) = (1, 0). Gives q = 2, mu = kappa = 1.
FluidModel canonical_model();
EquilibriumState canonical_equilibrium();

}  // namespace nsk
