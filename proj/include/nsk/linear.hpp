#pragma once

// Exact per-mode evolution of the linearized system, the mode energy used
// for the pointwise decay estimate, decay-envelope certification and the
// algebraic decay-rate experiment for the linear semigroup.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nsk/mat2.hpp"
#include "nsk/model.hpp"
#include "nsk/spectral.hpp"
#include "nsk/symbol.hpp"
#include "nsk/trace.hpp"

namespace nsk {

/// M(i xi) = -(i xi A(xi) + xi^2 Bbar) = [[0, i xi], [i xi beta, -xi^2 mu / v]].
CMat2 mode_generator(const EquilibriumState& eq, double xi, Dissipation d = Dissipation::physical);

/// e^{z} - 1 without cancellation near z = 0.
cplx expm1(cplx z);

class ModePropagator {
public:
    /// Relative eigenvalue gap below which the Jordan form is used.
    static constexpr double kJordanTol = 1e-8;

    ModePropagator(const EquilibriumState& eq, double xi);

    double xi() const { return xi_; }
    const CMat2& generator() const { return m_; }
    cplx lambda_plus() const { return lambda_plus_; }
    cplx lambda_minus() const { return lambda_minus_; }
    bool jordan() const { return jordan_; }

    /// e^{t M(i xi)}: Sylvester form on distinct eigenvalues,
    /// e^{lambda t} (I + t (M - lambda I)) when they coincide.
    CMat2 exp(double t) const;

private:
    double xi_;
    CMat2 m_;
    cplx lambda_plus_;
    cplx lambda_minus_;
    bool jordan_;
};

ModePropagator mode_propagator(const EquilibriumState& eq, double xi);

/// Operator norm of e^{tM} in the V-metric, |A0^{1/2} e^{tM} A0^{-1/2}|.
double v_metric_norm(const EquilibriumState& eq, const CMat2& propagator, double xi);

/// Operator norm in the weighted metric ((1 + xi^2)|U1|^2 + |U2|^2)^{1/2}.
double weighted_u_norm(const CMat2& propagator, double xi);

/// E = |V|^2 - (delta xi / (1 + xi^2)) <V, i K~ V>. Real because i K~ is
/// Hermitian. Throws Error(parameter) unless 0 < delta < 1.
double energy_functional(const EquilibriumState& eq, double xi, const CVec2& v, double delta);

/// dE/dt along V_t = -(i xi A~ + xi^2 Bbar) V.
double energy_rate(const EquilibriumState& eq, double xi, const CVec2& v, double delta);

/// Hermitian matrices with E = V* energy V and dE/dt = V* rate V.
struct EnergyForms {
    CMat2 energy;
    CMat2 rate;
};
EnergyForms energy_forms(const EquilibriumState& eq, double xi, double delta);

struct EnergyParams {
    double delta = 0.0;
    double k = 0.0;
    double C1 = 2.0;
};

struct EnergyCheck {
    bool passed = false;
    double k = 0.0;  // largest k passing on every sample
    std::optional<double> witness_xi;
    std::optional<CVec2> witness_vector;
};

/// Checks dE/dt + (k xi^2 / (1 + xi^2)) E <= 1e-12 |V|^2 for every
/// (xi, V) pair and finds the largest such k by bisection.
EnergyCheck verify_energy_inequality(const EquilibriumState& eq, double delta, std::span<const double> xi_grid,
                                     std::span<const CVec2> v_samples);

/// Same inequality over all V at once (largest eigenvalue of the Hermitian
/// form rate + k r energy).
EnergyCheck verify_energy_inequality_all_directions(const EquilibriumState& eq, double delta,
                                                    std::span<const double> xi_grid);

/// Closed-form delta satisfying the C1 = 2 equivalence: v sqrt(q) / mu,
/// clipped to (0, 1).
double sufficient_delta(const EquilibriumState& eq);

/// Whether C1^{-1} |V|^2 <= E <= C1 |V|^2 for every xi on the grid.
bool energy_equivalence_holds(const EquilibriumState& eq, double delta, std::span<const double> xi_grid, double c1);

/// Deterministic unit vectors in C^2.
std::vector<CVec2> random_unit_vectors(int count, std::uint64_t seed);

/// Largest delta <= 1/2 (found by bisection) for which the C1 = 2
/// equivalence and the energy inequality with some k > 0 hold on the grid.
/// Throws Error(structural) if none is found.
EnergyParams select_delta(const EquilibriumState& eq, std::span<const double> xi_grid,
                          std::span<const CVec2> v_samples);
EnergyParams select_delta(const EquilibriumState& eq, std::span<const double> xi_grid);

struct DecayEnvelope {
    double C = 1.0;
    double k = 0.0;
};

struct EnvelopeReport {
    DecayEnvelope v_form;  // |V(t)| <= C |V(0)| exp(-k xi^2 t / (1 + xi^2))
    /// (1 + xi^2)|U1|^2 + |U2|^2 <= C [...]_0 exp(-2k xi^2 t / (1 + xi^2));
    /// C here is the constant of the squared form.
    DecayEnvelope u_form;
    std::vector<double> ladder;  // the trial k values, descending
};

inline constexpr double kEnvelopeMaxC = 100.0;
inline constexpr double kEnvelopeMinK = 1e-3;

/// Smallest C for each trial k on a 20-point ladder descending from the
/// dissipativity constant c, keeping the largest k with C <= 100.
/// Throws Error(structural) if no ladder value qualifies.
EnvelopeReport verify_pointwise_decay(const EquilibriumState& eq, std::span<const double> xi_grid,
                                      std::span<const double> t_grid);

struct EnvelopeSample {
    double xi = 0.0;
    double t = 0.0;
    double opnorm = 0.0;
    double bound = 0.0;
    bool ok = false;
};

std::vector<EnvelopeSample> envelope_samples(const EquilibriumState& eq, const DecayEnvelope& env,
                                             std::span<const double> xi_grid, std::span<const double> t_grid);

/// e^{tL} f on the periodic grid: per-mode multiplication by e^{tM(i xi)}.
/// The Nyquist mode uses the real part of its propagator so real fields
/// stay real. Throws Error(grid_mismatch) if f does not match the grid.
SpectralField semigroup_apply(const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                              const SpectralField& f, double t);
SpectralCoeffs semigroup_apply(const EquilibriumState& eq, const SpectralGrid& grid, const SpectralCoeffs& f, double t);

/// (||d^l U1||_1^2 + ||d^l U2||_0^2)^{1/2} from Fourier coefficients.
double linear_decay_norm(const SpectralGrid& grid, const SpectralCoeffs& c, int l);

struct FitWindow {
    double t_lo = 1e2;
    double t_hi = 1e4;
};

/// Exact mode-wise evolution of f recorded at every t in t_grid, with
/// log-log slopes per order over the window. Slopes are nullopt for
/// identically zero data.
NormTrace linear_decay_experiment(const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                                  const SpectralField& f, std::span<const int> orders, std::span<const double> t_grid,
                                  FitWindow window = {});

}  // namespace nsk
