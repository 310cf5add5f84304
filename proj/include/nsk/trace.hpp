#pragma once

#include <optional>
#include <vector>

namespace nsk {

/// Time series of norms with fitted decay exponents.
struct NormTrace {
    std::vector<double> times;
    /// Orders l reported in `sobolev`, in column order.
    std::vector<int> orders;
    /// sobolev[i][j]: norm of order orders[j] at times[i].
    std::vector<std::vector<double>> sobolev;
    /// Plain L2 norm (||v||_0^2 + ||u||_0^2)^{1/2}; nonlinear runs only.
    std::vector<double> l2;
    /// Running triple norm; nonlinear runs only. Nondecreasing.
    std::vector<double> triple;
    /// Running sup of (1 + t)^{1/4} ||U||_{s-1}; nonlinear runs only.
    std::vector<double> E_s;
    /// Fitted log-log slope per order (nullopt when nothing to fit).
    std::vector<std::optional<double>> slopes;

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out;
        out.reserve(sobolev.size());
        for (const auto& row : sobolev) out.push_back(row.at(j));
        return out;
    }
};

}  // namespace nsk
