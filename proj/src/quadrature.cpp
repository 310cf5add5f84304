#include "nsk/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "nsk/error.hpp"
#include "nsk/fit.hpp"

namespace nsk {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; the
// Gauss points are the odd-indexed abscissae.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kWgk[7] * fc;
    double g = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double s = f(c - dx) + f(c + dx);
        k += kWgk[j] * s;
        if (j % 2 == 1) g += kWg[j / 2] * s;
    }
    return {a, b, k * h, std::abs((k - g) * h)};
}

void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::parameter, "t must be finite and nonnegative");
}

constexpr double kRelTol = 1e-10;

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                     int max_intervals) {
    QuadResult r;
    if (a == b) {
        r.converged = true;
        return r;
    }
    std::priority_queue<Piece> heap;
    Piece first = kronrod(f, a, b);
    double value = first.value, error = first.error;
    heap.push(first);
    int count = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && count < max_intervals) {
        const Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted
        const Piece left = kronrod(f, worst.a, mid);
        const Piece right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    value = error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    r.value = value;
    r.abs_error = error;
    r.intervals = count;
    r.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return r;
}

QuadResult integrate_pieces(const std::function<double(double)>& f, double a, double b,
                            const std::vector<double>& breaks, double rel_tol) {
    std::vector<double> pts{a};
    for (const double x : breaks)
        if (x > pts.back() && x < b) pts.push_back(x);
    pts.push_back(b);
    QuadResult total;
    total.converged = true;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const QuadResult r = integrate(f, pts[i], pts[i + 1], rel_tol);
        total.value += r.value;
        total.abs_error += r.abs_error;
        total.intervals += r.intervals;
        total.converged = total.converged && r.converged;
    }
    return total;
}

double sup_on_interval(const std::function<double(double)>& f, double t) {
    check_time(t);
    std::vector<double> z{0.0};
    if (t > 0.0) {
        const double lo = std::min(1e-3, t);
        if (lo < t) {
            const auto ls = log_space(lo, t, 200);
            z.insert(z.end(), ls.begin(), ls.end());
        } else {
            z.push_back(t);
        }
    }
    std::vector<double> v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[i] = f(z[i]);
    const auto best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    double sup = v[best];
    if (best == 0 || best + 1 == z.size()) return sup;

    // Golden-section search on the bracket around the best sample.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = z[best - 1], b = z[best + 1];
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && b - a > 1e-12 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return std::max({sup, fc, fd});
}

double I0(double t, int l, double k) {
    check_time(t);
    if (l < 0) throw Error(ErrorKind::parameter, "l must be nonnegative");
    if (!(k > 0.0)) throw Error(ErrorKind::parameter, "k must be positive");
    auto f = [t, l, k](double xi) { return std::pow(xi * xi, l) * std::exp(-k * t * xi * xi); };
    // The integrand concentrates on |xi| ~ (k t)^{-1/2} for large t.
    std::vector<double> breaks;
    if (t > 0.0) {
        const double w = 1.0 / std::sqrt(k * t);
        for (const double m : {1.0, 4.0, 16.0}) breaks.push_back(m * w);
    }
    const double half = integrate_pieces(f, 0.0, 1.0, breaks, kRelTol).value;
    return std::pow(1.0 + t, l + 0.5) * 2.0 * half;
}

namespace {

// int_0^z exp(-c (z - s)) (1 + s)^{-p} ds, split so the pieces near s = z,
// where the weight lives for large c z, are resolved.
double damped_integral(double z, double c, double p) {
    if (z == 0.0) return 0.0;
    auto f = [z, c, p](double s) { return std::exp(-c * (z - s)) * std::pow(1.0 + s, -p); };
    std::vector<double> breaks;
    for (const double m : {64.0, 16.0, 4.0, 1.0}) breaks.push_back(z - m / c);
    return integrate_pieces(f, 0.0, z, breaks, kRelTol).value;
}

void check_c1(double c1) {
    if (!(c1 > 0.0)) throw Error(ErrorKind::parameter, "c1 must be positive");
}

}  // namespace

double I1_first(double z, double c1) {
    check_time(z);
    check_c1(c1);
    return std::pow(1.0 + z, 0.25) * damped_integral(z, c1, 0.25);
}

double I1_second(double z, double c1) {
    check_time(z);
    check_c1(c1);
    return std::pow(1.0 + z, 0.25) * std::sqrt(damped_integral(z, 2.0 * c1, 0.5));
}

double I1(double t, double c1) {
    check_time(t);
    check_c1(c1);
    return sup_on_interval([c1](double z) { return I1_first(z, c1); }, t) +
           sup_on_interval([c1](double z) { return I1_second(z, c1); }, t);
}

double A2_direct(double z) {
    check_time(z);
    if (z == 0.0) return 0.0;
    auto f = [z](double s) { return std::pow(1.0 + z - s, -0.75) / std::sqrt(1.0 + s); };
    std::vector<double> breaks;
    for (double x = 1.0; x < z; x *= 4.0) {
        breaks.push_back(x);
        breaks.push_back(z - x);
    }
    std::sort(breaks.begin(), breaks.end());
    return std::pow(1.0 + z, 0.25) * integrate_pieces(f, 0.0, z, breaks, 1e-12).value;
}

double A2(double z) {
    check_time(z);
    if (z == 0.0) return 0.0;
    const double top = std::pow(1.0 + z, 0.25);
    auto f = [z](double u) { return 4.0 / std::sqrt(2.0 + z - u * u * u * u); };
    // 2 + z - u^4 falls to 1 at the top end; refine there.
    std::vector<double> breaks;
    for (const double frac : {0.5, 0.9, 0.99, 0.999}) breaks.push_back(1.0 + frac * (top - 1.0));
    return top * integrate_pieces(f, 1.0, top, breaks, 1e-12).value;
}

double A2_elliptic(double z) {
    check_time(z);
    if (z == 0.0) return 0.0;
    const double y_lo = std::pow(2.0 + z, -0.25);
    const double ratio = std::pow((1.0 + z) / (2.0 + z), 0.25);
    return 4.0 * ratio * (elliptic_F(std::asin(ratio), -1.0) - elliptic_F(std::asin(y_lo), -1.0));
}

double I2(double t) {
    check_time(t);
    return sup_on_interval([](double z) { return A2(z); }, t);
}

double I2_limit() { return 4.0 * elliptic_F(0.5 * std::numbers::pi, -1.0); }

double elliptic_F(double phi, double m) {
    if (!(phi >= 0.0 && phi <= 0.5 * std::numbers::pi)) {
        throw Error(ErrorKind::parameter, "phi must lie in [0, pi/2]");
    }
    const double s = std::sin(phi);
    if (!std::isfinite(m) || !(m * s * s < 1.0)) {
        throw Error(ErrorKind::parameter, "elliptic parameter makes the integrand singular");
    }
    if (phi == 0.0) return 0.0;
    // y = sin(theta) removes the endpoint singularity of the y form.
    auto f = [m](double th) {
        const double sn = std::sin(th);
        return 1.0 / std::sqrt(1.0 - m * sn * sn);
    };
    return integrate(f, 0.0, phi, 1e-13).value;
}

std::vector<double> default_integral_times() { return {0.0, 1.0, 10.0, 100.0, 1e3, 1e4}; }

namespace {

IntegralReport make_report(std::string name, const std::vector<double>& t, const std::function<double(double)>& f) {
    IntegralReport r;
    r.name = std::move(name);
    r.t_samples = t;
    for (const double x : t) {
        const double v = f(x);
        r.values.push_back(v);
        r.sup = std::max(r.sup, v);
    }
    return r;
}

}  // namespace

IntegralReport I0_report(const std::vector<double>& t, int l, double k) {
    auto r = make_report("I0", t, [l, k](double x) { return I0(x, l, k); });
    r.limit = std::tgamma(l + 0.5) * std::pow(k, -(l + 0.5));
    return r;
}

IntegralReport I1_report(const std::vector<double>& t, double c1) {
    return make_report("I1", t, [c1](double x) { return I1(x, c1); });
}

IntegralReport I2_report(const std::vector<double>& t) {
    auto r = make_report("I2", t, [](double x) { return I2(x); });
    r.limit = I2_limit();
    return r;
}

double last_decade_change(const IntegralReport& report) {
    const auto n = report.values.size();
    if (n < 2) throw Error(ErrorKind::parameter, "report needs at least two samples");
    const double a = report.values[n - 2], b = report.values[n - 1];
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(b - a) / scale : 0.0;
}

}  // namespace nsk
