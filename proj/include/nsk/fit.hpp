#pragma once

#include <optional>
#include <span>
#include <vector>

namespace nsk {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int samples = 0;
};

/// Least-squares line through (log(1 + t), log y) for the samples with
/// t_lo <= t <= t_hi. Returns nullopt when every y in the window is zero
/// (nothing to fit). Throws Error(fit) if the window spans less than one
/// decade, holds fewer than three samples, or contains non-positive y
/// mixed with positive ones.
std::optional<LogLogFit> fit_decay_exponent(std::span<const double> t, std::span<const double> y, double t_lo,
                                            double t_hi);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace nsk
