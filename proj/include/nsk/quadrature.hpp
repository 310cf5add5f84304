#pragma once

// Adaptive Gauss-Kronrod quadrature and the time-dependent integrals whose
// uniform boundedness closes the decay estimates.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nsk {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod rule on [a, b]: the interval
/// with the largest error estimate is bisected until the total estimate
/// falls below max(abs_tol, rel_tol |I|) or `max_intervals` is reached.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 1e-300, int max_intervals = 4000);

/// integrate() over consecutive pieces split at `breaks` (sorted, inside
/// (a, b)); the tolerances apply to the sum.
QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breaks, double rel_tol = 1e-10);

/// sup of f over [0, t]: 200 log-spaced samples (plus z = 0) followed by a
/// golden-section search around the best sample.
double sup_on_interval(const std::function<double(double)>& f, double t);

/// (1 + t)^{l + 1/2} int_{-1}^{1} xi^{2l} exp(-k t xi^2) dxi.
/// Throws Error(parameter) unless t >= 0, l >= 0 and k > 0.
double I0(double t, int l, double k);

/// (1 + z)^{1/4} int_0^z exp(-c1 (z - s)) (1 + s)^{-1/4} ds.
double I1_first(double z, double c1);
/// (1 + z)^{1/4} [int_0^z exp(-2 c1 (z - s)) (1 + s)^{-1/2} ds]^{1/2}.
double I1_second(double z, double c1);
/// sup_{z <= t} I1_first + sup_{z <= t} I1_second. Throws Error(parameter)
/// unless t >= 0 and c1 > 0.
double I1(double t, double c1);

/// A2(z) = (1 + z)^{1/4} int_0^z (1 + z - s)^{-3/4} (1 + s)^{-1/2} ds,
/// integrated in s directly.
double A2_direct(double z);
/// The same after u = (1 + z - s)^{1/4}:
/// (1 + z)^{1/4} int_1^{(1+z)^{1/4}} 4 (2 + z - u^4)^{-1/2} du.
double A2(double z);
/// The same through y = u / (2 + z)^{1/4}, as a difference of incomplete
/// elliptic integrals with parameter -1.
double A2_elliptic(double z);
/// sup_{z <= t} A2(z). Throws Error(parameter) unless t >= 0.
double I2(double t);

/// Limit of A2 as z grows: 4 F(pi/2 | -1).
double I2_limit();

/// F(phi | m) = int_0^phi (1 - m sin^2 theta)^{-1/2} dtheta
///            = int_0^{sin phi} dy / sqrt((1 - y^2)(1 - m y^2)).
/// Throws Error(parameter) unless 0 <= phi <= pi/2 and m sin^2 phi < 1.
double elliptic_F(double phi, double m);

struct IntegralReport {
    std::string name;
    std::vector<double> t_samples;
    std::vector<double> values;
    double sup = 0.0;
    std::optional<double> limit;
};

/// The t grid used by the reports: 0 and 10^j for j = 0..4.
std::vector<double> default_integral_times();

IntegralReport I0_report(const std::vector<double>& t, int l, double k);
IntegralReport I1_report(const std::vector<double>& t, double c1);
IntegralReport I2_report(const std::vector<double>& t);

/// Relative change between the values at the last two samples.
double last_decade_change(const IntegralReport& report);

}  // namespace nsk
