#pragma once

// Fourier-symbol calculus of the linearized Korteweg operator
//   U_t = L1 U_x + L2 U_xx + L3 U_xxx
// split as U^_t + i xi A(xi) U^ + B(xi) U^ = 0, together with the
// symmetrizer family, the compensating matrix and the structural checks
// (genuine coupling, strict dissipativity, no constant symmetrizer).

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "nsk/mat2.hpp"
#include "nsk/model.hpp"

namespace nsk {

/// Lets the structural checks run on the system with its dissipative
/// symbol removed (B = 0), which must fail them.
enum class Dissipation { physical, suppressed };

/// The constant coefficient matrices L1, L2, L3 of the linearized operator.
std::array<Mat2, 3> linear_coefficients(const EquilibriumState& eq);

/// A(xi) = [[0, -1], [-(q + xi^2 kappa), 0]].
Mat2 symbol_A(const EquilibriumState& eq, double xi);

/// B(xi) = xi^2 diag(0, mu / v).
Mat2 symbol_B(const EquilibriumState& eq, double xi, Dissipation d = Dissipation::physical);

/// B bar = diag(0, mu / v), so that B(xi) = xi^2 B bar.
Mat2 symbol_B_bar(const EquilibriumState& eq, Dissipation d = Dissipation::physical);

/// Member of the symbol symmetrizer family diag(a, a / beta(xi)).
/// Throws Error(parameter) unless weight > 0.
Mat2 symmetrizer(const EquilibriumState& eq, double xi, double weight);

/// The canonical member a = beta: diag(beta(xi), 1).
Mat2 canonical_symmetrizer(const EquilibriumState& eq, double xi);

/// A~ = A0^{1/2} A A0^{-1/2} for the canonical symmetrizer.
Mat2 symbol_A_tilde(const EquilibriumState& eq, double xi);

/// K~(xi) = mu / (4 sqrt(beta) v) [[0, -1], [1, 0]].
Mat2 compensating_K(const EquilibriumState& eq, double xi);

/// Uniform bound mu / (4 v sqrt(q)) on |K~(xi)|, attained at xi = 0.
double compensating_K_bound(const EquilibriumState& eq);

struct SymbolBundle {
    double xi = 0.0;
    double beta = 0.0;
    Mat2 A;
    Mat2 B;
    Mat2 A0;
    Mat2 A_tilde;
    Mat2 B_tilde;
    Mat2 K_tilde;
};

SymbolBundle symbol_bundle(const EquilibriumState& eq, double xi);

struct FriedrichsReport {
    /// Rows: coefficients of (a1, a2, a3) in the antisymmetric part of
    /// A0bar L_j for j = 1, 2, 3.
    std::array<std::array<double, 3>, 3> constraints{};
    int rank = 0;
    /// Orthonormal basis of the solution space, as (a1, a2, a3).
    std::vector<std::array<double, 3>> null_space;
    /// True when the solution space contains a positive-definite matrix.
    bool friedrichs_symmetrizable = false;
};

/// Solves "A0bar L_j symmetric for all j" for a constant symmetric
/// A0bar = [[a1, a2], [a2, a3]].
FriedrichsReport friedrichs_infeasibility(const std::array<Mat2, 3>& coefficients);
FriedrichsReport friedrichs_infeasibility(const EquilibriumState& eq);

/// Angle threshold for "eigenvector lies in the kernel".
inline constexpr double kCouplingAngleTol = 1e-8;

struct CouplingReport {
    bool coupled = true;
    /// Eigenvalues of A0 A with a = beta are +-sqrt(beta): always simple.
    bool constant_multiplicity = true;
    double min_angle = 0.0;  // smallest eigenvector/kernel angle seen
    std::optional<double> witness_xi;
    std::optional<Vec2> witness_vector;
};

/// No eigenvector of A0(xi) A(xi) may lie in ker A0(xi) B(xi) for xi != 0.
/// Follows the eigenvector formulation (the one used in the coupling
/// proof). Throws Error(parameter) on an empty sample set or xi == 0.
CouplingReport genuine_coupling_check(const EquilibriumState& eq, std::span<const double> xi_samples,
                                      Dissipation d = Dissipation::physical);

struct CoercivityReport {
    double theta_bar = 0.0;
    Mat2 expected;          // (mu / 4v) diag(1, 3)
    double max_deviation = 0.0;  // worst |[K~A~]^s + Bbar - expected| entry
    double min_eigenvalue = 0.0;
};

/// Evaluates [K~ A~]^s + Bbar at every sample. Throws Error(structural) if
/// it differs from (mu / 4v) diag(1, 3) beyond 1e-12 or its smallest
/// eigenvalue falls below theta_bar - 1e-12.
CoercivityReport verify_coercivity(const EquilibriumState& eq, std::span<const double> xi_samples);

struct DispersionPoint {
    double xi = 0.0;
    cplx lambda_plus;   // larger real part
    cplx lambda_minus;
};

/// Roots of lambda^2 + xi^2 (mu / v) lambda + xi^2 beta(xi) = 0, the
/// eigenvalues of -(i xi A + B).
DispersionPoint dispersion(const EquilibriumState& eq, double xi, Dissipation d = Dissipation::physical);

struct DissipativityScan {
    double max_re_lambda = 0.0;
    /// Largest c with Re lambda <= -c xi^2 / (1 + xi^2) on the grid.
    double c = 0.0;
    double argmax_xi = 0.0;
};

/// Throws Error(not_dissipative) with the witness xi when some
/// Re lambda >= 0; Error(parameter) if the grid contains 0 or is empty.
DissipativityScan strict_dissipativity_scan(const EquilibriumState& eq, std::span<const double> xi_grid,
                                            Dissipation d = Dissipation::physical);

/// Default wavenumber grid: 2001 points, symmetric about and including 0;
/// |xi| in [1e-3, 1] log-spaced and [1, 1e3] linearly spaced.
std::vector<double> default_xi_grid();

/// default_xi_grid() without the zero mode.
std::vector<double> default_nonzero_xi_grid();

}  // namespace nsk
