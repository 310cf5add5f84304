#include "nsk/fit.hpp"

#include <cmath>

#include "nsk/error.hpp"

namespace nsk {

std::optional<LogLogFit> fit_decay_exponent(std::span<const double> t, std::span<const double> y, double t_lo,
                                            double t_hi) {
    if (t.size() != y.size()) throw Error(ErrorKind::fit, "time and value series differ in length");
    if (!(t_lo > 0.0) || t_hi < 10.0 * t_lo) {
        throw Error(ErrorKind::fit, "fit window must span at least one decade");
    }
    std::vector<double> xs, ys;
    bool any_positive = false, any_nonpositive = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (y[i] > 0.0) {
            any_positive = true;
            xs.push_back(std::log1p(t[i]));
            ys.push_back(std::log(y[i]));
        } else {
            any_nonpositive = true;
        }
    }
    if (!any_positive) return std::nullopt;
    if (any_nonpositive) throw Error(ErrorKind::fit, "series mixes zero and positive values in the fit window");
    if (xs.size() < 3) throw Error(ErrorKind::fit, "fewer than three samples in the fit window");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.samples = static_cast<int>(xs.size());
    return fit;
}

std::vector<double> log_space(double lo, double hi, int n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace nsk
