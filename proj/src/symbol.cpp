#include "nsk/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsk/error.hpp"

namespace nsk {

std::array<Mat2, 3> linear_coefficients(const EquilibriumState& eq) {
    return {Mat2{0.0, 1.0, eq.q_bar, 0.0}, Mat2{0.0, 0.0, 0.0, eq.diffusivity()},
            Mat2{0.0, 0.0, -eq.kappa_bar, 0.0}};
}

Mat2 symbol_A(const EquilibriumState& eq, double xi) { return {0.0, -1.0, -eq.beta(xi), 0.0}; }

Mat2 symbol_B_bar(const EquilibriumState& eq, Dissipation d) {
    return Mat2::diag(0.0, d == Dissipation::physical ? eq.diffusivity() : 0.0);
}

Mat2 symbol_B(const EquilibriumState& eq, double xi, Dissipation d) { return (xi * xi) * symbol_B_bar(eq, d); }

Mat2 symmetrizer(const EquilibriumState& eq, double xi, double weight) {
    if (!(weight > 0.0)) throw Error(ErrorKind::parameter, "symmetrizer weight must be positive");
    return Mat2::diag(weight, weight / eq.beta(xi));
}

Mat2 canonical_symmetrizer(const EquilibriumState& eq, double xi) { return Mat2::diag(eq.beta(xi), 1.0); }

Mat2 symbol_A_tilde(const EquilibriumState& eq, double xi) {
    const double s = std::sqrt(eq.beta(xi));
    return {0.0, -s, -s, 0.0};
}

Mat2 compensating_K(const EquilibriumState& eq, double xi) {
    const double c = eq.mu_bar / (4.0 * std::sqrt(eq.beta(xi)) * eq.v_bar);
    return {0.0, -c, c, 0.0};
}

double compensating_K_bound(const EquilibriumState& eq) {
    return eq.mu_bar / (4.0 * eq.v_bar * std::sqrt(eq.q_bar));
}

SymbolBundle symbol_bundle(const EquilibriumState& eq, double xi) {
    SymbolBundle s;
    s.xi = xi;
    s.beta = eq.beta(xi);
    s.A = symbol_A(eq, xi);
    s.B = symbol_B(eq, xi);
    s.A0 = canonical_symmetrizer(eq, xi);
    s.A_tilde = symbol_A_tilde(eq, xi);
    s.B_tilde = symbol_B(eq, xi);
    s.K_tilde = compensating_K(eq, xi);
    return s;
}

namespace {

using Vec3 = std::array<double, 3>;

double dot3(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }

bool positive_definite(const Vec3& a) { return a[0] > 0.0 && a[0] * a[2] - a[1] * a[1] > 0.0; }

// Orthonormalizes `v` against `basis`; returns false if nothing is left.
bool orthonormalize(Vec3& v, const std::vector<Vec3>& basis, double tol) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            const double c = dot3(v, b);
            for (int i = 0; i < 3; ++i) v[i] -= c * b[i];
        }
    }
    const double n = std::sqrt(dot3(v, v));
    if (n <= tol) return false;
    for (auto& x : v) x /= n;
    return true;
}

}  // namespace

FriedrichsReport friedrichs_infeasibility(const std::array<Mat2, 3>& coefficients) {
    FriedrichsReport rep;
    const std::array<Mat2, 3> unit{Mat2{1.0, 0.0, 0.0, 0.0}, Mat2{0.0, 1.0, 1.0, 0.0}, Mat2{0.0, 0.0, 0.0, 1.0}};
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            const Mat2 p = unit[k] * coefficients[j];
            rep.constraints[j][k] = p(0, 1) - p(1, 0);
            scale = std::max(scale, std::abs(rep.constraints[j][k]));
        }
    }
    const double tol = 1e-12 * std::max(scale, 1.0);

    std::vector<Vec3> row_basis;
    for (const auto& row : rep.constraints) {
        Vec3 r = row;
        const double n = std::sqrt(dot3(r, r));
        if (n <= tol) continue;
        for (auto& x : r) x /= n;
        // relative test after normalization
        if (orthonormalize(r, row_basis, 1e-10)) row_basis.push_back(r);
    }
    rep.rank = static_cast<int>(row_basis.size());

    std::vector<Vec3> all = row_basis;
    for (int i = 0; i < 3; ++i) {
        Vec3 e{0.0, 0.0, 0.0};
        e[i] = 1.0;
        if (orthonormalize(e, all, 1e-8)) {
            all.push_back(e);
            rep.null_space.push_back(e);
        }
    }

    // Search the solution space for a positive-definite member.
    const auto& ns = rep.null_space;
    if (ns.size() == 1) {
        Vec3 neg{-ns[0][0], -ns[0][1], -ns[0][2]};
        rep.friedrichs_symmetrizable = positive_definite(ns[0]) || positive_definite(neg);
    } else if (ns.size() >= 2) {
        constexpr int kDirections = 720;
        for (int i = 0; i < kDirections && !rep.friedrichs_symmetrizable; ++i) {
            const double th = 2.0 * std::numbers::pi * i / kDirections;
            for (int j = 0; j <= 12 && !rep.friedrichs_symmetrizable; ++j) {
                const double ph = std::numbers::pi * j / 12.0;
                const double w0 = std::cos(th) * std::sin(ph), w1 = std::sin(th) * std::sin(ph), w2 = std::cos(ph);
                Vec3 a{0.0, 0.0, 0.0};
                for (int k = 0; k < 3; ++k) {
                    a[k] = w0 * ns[0][k] + w1 * ns[1][k] + (ns.size() > 2 ? w2 * ns[2][k] : 0.0);
                }
                rep.friedrichs_symmetrizable = positive_definite(a);
            }
        }
    }
    return rep;
}

FriedrichsReport friedrichs_infeasibility(const EquilibriumState& eq) {
    return friedrichs_infeasibility(linear_coefficients(eq));
}

CouplingReport genuine_coupling_check(const EquilibriumState& eq, std::span<const double> xi_samples, Dissipation d) {
    if (xi_samples.empty()) throw Error(ErrorKind::parameter, "genuine coupling check needs xi samples");
    CouplingReport rep;
    rep.min_angle = std::numbers::pi / 2;
    for (const double xi : xi_samples) {
        if (xi == 0.0) throw Error(ErrorKind::parameter, "genuine coupling is tested at xi != 0 only");
        const Mat2 a0 = canonical_symmetrizer(eq, xi);
        const Mat2 a0a = a0 * symbol_A(eq, xi);
        const Mat2 a0b = a0 * symbol_B(eq, xi, d);

        const auto [z_lo, z_hi] = sym_eigenvalues(sym(a0a));
        if (!(z_hi - z_lo > 0.0)) rep.constant_multiplicity = false;

        // Kernel of the symmetric PSD matrix A0 B.
        const double scale = max_abs(a0b);
        std::vector<Vec2> kernel;
        if (scale == 0.0) {
            kernel = {Vec2{{1.0, 0.0}}, Vec2{{0.0, 1.0}}};
        } else {
            const auto [b_lo, b_hi] = sym_eigenvalues(a0b);
            const auto [e_lo, e_hi] = sym_eigenvectors(a0b);
            if (std::abs(b_lo) <= 1e-12 * scale) kernel.push_back(e_lo);
            if (std::abs(b_hi) <= 1e-12 * scale) kernel.push_back(e_hi);
        }

        const auto [v_lo, v_hi] = sym_eigenvectors(sym(a0a));
        for (const Vec2& ev : {v_lo, v_hi}) {
            double angle = std::numbers::pi / 2;
            if (kernel.size() >= 2) {
                angle = 0.0;
            } else if (kernel.size() == 1) {
                const double c = std::abs(ev[0] * kernel[0][0] + ev[1] * kernel[0][1]);
                const double s = std::abs(ev[0] * kernel[0][1] - ev[1] * kernel[0][0]);
                angle = std::atan2(s, c);
            }
            if (angle < rep.min_angle) rep.min_angle = angle;
            if (angle <= kCouplingAngleTol && rep.coupled) {
                rep.coupled = false;
                rep.witness_xi = xi;
                rep.witness_vector = ev;
            }
        }
    }
    return rep;
}

CoercivityReport verify_coercivity(const EquilibriumState& eq, std::span<const double> xi_samples) {
    if (xi_samples.empty()) throw Error(ErrorKind::parameter, "coercivity check needs xi samples");
    CoercivityReport rep;
    rep.theta_bar = eq.mu_bar / (4.0 * eq.v_bar);
    rep.expected = Mat2::diag(rep.theta_bar, 3.0 * rep.theta_bar);
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    const Mat2 b_bar = symbol_B_bar(eq);
    const double tol = 1e-12 * std::max(1.0, 4.0 * rep.theta_bar);
    for (const double xi : xi_samples) {
        const Mat2 m = sym(compensating_K(eq, xi) * symbol_A_tilde(eq, xi)) + b_bar;
        rep.max_deviation = std::max(rep.max_deviation, max_abs(m - rep.expected));
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, sym_eigenvalues(m).first);
    }
    if (rep.max_deviation > tol || rep.min_eigenvalue < rep.theta_bar - tol) {
        std::ostringstream os;
        os.precision(17);
        os << "compensating-matrix coercivity failed: deviation " << rep.max_deviation << ", min eigenvalue "
           << rep.min_eigenvalue << " vs theta_bar " << rep.theta_bar;
        throw Error(ErrorKind::structural, os.str());
    }
    return rep;
}

DispersionPoint dispersion(const EquilibriumState& eq, double xi, Dissipation d) {
    const double xi2 = xi * xi;
    const double b = d == Dissipation::physical ? xi2 * eq.diffusivity() : 0.0;
    const double c = xi2 * eq.beta(xi);
    const double disc = b * b - 4.0 * c;
    DispersionPoint p;
    p.xi = xi;
    if (disc < 0.0) {
        const double im = 0.5 * std::sqrt(-disc);
        p.lambda_plus = {-0.5 * b, im};
        p.lambda_minus = {-0.5 * b, -im};
    } else {
        // Real roots: the larger-modulus one directly, the other from c / root.
        const double big = -0.5 * (b + std::sqrt(disc));
        const double small = big != 0.0 ? c / big : 0.0;
        p.lambda_plus = small;
        p.lambda_minus = big;
    }
    return p;
}

DissipativityScan strict_dissipativity_scan(const EquilibriumState& eq, std::span<const double> xi_grid,
                                            Dissipation d) {
    if (xi_grid.empty()) throw Error(ErrorKind::parameter, "dissipativity scan needs a grid");
    DissipativityScan scan;
    scan.max_re_lambda = -std::numeric_limits<double>::infinity();
    scan.c = std::numeric_limits<double>::infinity();
    for (const double xi : xi_grid) {
        if (xi == 0.0) throw Error(ErrorKind::parameter, "dissipativity scan grid must exclude xi = 0");
        const double re = dispersion(eq, xi, d).lambda_plus.real();
        if (!(re < 0.0)) {
            std::ostringstream os;
            os.precision(17);
            os << "not strictly dissipative: Re lambda = " << re << " at xi = " << xi;
            throw Error(ErrorKind::not_dissipative, os.str());
        }
        if (re > scan.max_re_lambda) {
            scan.max_re_lambda = re;
            scan.argmax_xi = xi;
        }
        scan.c = std::min(scan.c, -re * (1.0 + xi * xi) / (xi * xi));
    }
    return scan;
}

std::vector<double> default_xi_grid() {
    constexpr int kHalf = 500;
    std::vector<double> pos;
    pos.reserve(2 * kHalf);
    for (int i = 0; i < kHalf; ++i) pos.push_back(std::pow(10.0, -3.0 + 3.0 * i / kHalf));
    for (int i = 1; i <= kHalf; ++i) pos.push_back(1.0 + (1e3 - 1.0) * i / kHalf);
    std::vector<double> grid;
    grid.reserve(2 * pos.size() + 1);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
    grid.push_back(0.0);
    grid.insert(grid.end(), pos.begin(), pos.end());
    return grid;
}

std::vector<double> default_nonzero_xi_grid() {
    auto g = default_xi_grid();
    std::erase(g, 0.0);
    return g;
}

}  // namespace nsk
