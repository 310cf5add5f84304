#pragma once

// Pseudo-spectral solver for the perturbation system around a constant
// equilibrium: exact per-mode linear propagation, fourth-order exponential
// time differencing for the divergence-form nonlinearity, and the norm
// bookkeeping of the global decay experiment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nsk/fit.hpp"
#include "nsk/mat2.hpp"
#include "nsk/model.hpp"
#include "nsk/spectral.hpp"
#include "nsk/trace.hpp"

namespace nsk {

/// Perturbation (v, u) of the equilibrium; the total volume is v_bar + v.
struct PerturbationState {
    std::vector<double> v;
    std::vector<double> u;
    double t = 0.0;
};

/// Quadratic remainder of the momentum flux,
///   -(p(V) - p(v_bar) - p'(v_bar) v) + (mu(V)/V - mu(v_bar)/v_bar) u_x
///   - (kappa(V) - kappa(v_bar)) v_xx - kappa'(V) v_x^2 / 2,   V = v_bar + v,
/// with spectral derivatives. Throws Error(domain_violation) if v_bar + v
/// leaves the equilibrium's phase at a collocation point.
std::vector<double> H2_eval(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid,
                            const Fft& fft, const PerturbationState& state);

enum class RhsForm {
    /// v_t = u_x, u_t = d_x(full momentum flux).
    full,
    /// L U + (0, d_x H2) with the constant-coefficient linear operator.
    split,
};

/// (v_t, u_t) of the perturbation system. Both forms agree up to rounding.
SpectralField rhs(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid, const Fft& fft,
                  const PerturbationState& state, RhsForm form = RhsForm::full);

/// phi_k(z) = sum_j z^j / (j + k)!, with phi_0 = exp.
cplx phi(int k, cplx z);

/// Fourth-order exponential time differencing (Cox-Matthews) on a fixed
/// grid and step. The linear part is propagated exactly per mode; the
/// nonlinear flux is formed in physical space and dealiased by the 2/3 rule.
class Etdrk4 {
public:
    Etdrk4(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid, double dt);

    double dt() const { return dt_; }
    const SpectralGrid& grid() const { return grid_; }
    const Fft& fft() const { return fft_; }

    /// Fourier-space nonlinear term (0, i xi G^) with G = flux - linear flux.
    SpectralCoeffs nonlinear_term(const SpectralCoeffs& c) const;

    /// One step in Fourier space. Throws Error(domain_violation) on phase
    /// exit and Error(blow_up) on non-finite values.
    SpectralCoeffs step(const SpectralCoeffs& c) const;

    PerturbationState step(const PerturbationState& s) const;

private:
    struct ModeCoeffs {
        CMat2 e, e2, q, f1, f2, f3;
    };

    // u component of the nonlinear term, written into `out`.
    void nonlinear_u(const std::vector<cplx>& v, const std::vector<cplx>& u, std::vector<cplx>& out) const;

    FluidModel model_;
    EquilibriumState eq_;
    Interval phase_;
    SpectralGrid grid_;
    Fft fft_;
    double dt_;
    std::vector<ModeCoeffs> modes_;
    std::vector<bool> keep_;
};

/// One ETDRK4 step of size dt. Builds the integrator; prefer Etdrk4 for
/// repeated steps.
PerturbationState step(const FluidModel& model, const EquilibriumState& eq, const SpectralGrid& grid,
                       const PerturbationState& state, double dt);

/// Default step: 0.5 dx min(1, 1 / (dx max|Im lambda|)), capped at `cap`.
double default_time_step(const EquilibriumState& eq, const SpectralGrid& grid, double cap = 0.1);

struct InitialData {
    enum class Shape { gaussian, sech2, random };

    Shape shape = Shape::gaussian;
    double amplitude = 1e-2;
    double width = 5.0;
    std::uint64_t seed = 1;
};

InitialData::Shape parse_shape(const std::string& name);

/// Gaussian: v = a exp(-(x - L/2)^2 / w^2), u = 0.
/// Sech2:    v = a sech^2((x - L/2) / w), u = 0.
/// Random:   band-limited (|xi| <= 1/w) random v and u with max |.| = a,
///           drawn from the seed.
PerturbationState make_initial_state(const SpectralGrid& grid, const InitialData& init);

struct SimulationConfig {
    double length = 400.0 * 3.14159265358979323846;
    int points = 4096;
    InitialData init;
    /// Zero selects default_time_step.
    double dt = 0.0;
    double t_final = 500.0;
    /// Steps between recorded samples; zero means about one sample per unit time.
    int save_every = 0;
    int s = 3;
    double fit_lo = 20.0;
    double fit_hi = 400.0;
    /// Bound on (||v0||_{s+1}^2 + ||u0||_s^2)^{1/2}.
    double amplitude_cap = 1.0;
    /// Abort once ||U||_{s-1} exceeds this multiple of its initial value.
    double blow_up_factor = 10.0;
    double exponent_lo = -0.40;
    double exponent_hi = -0.15;
};

struct SimulationResult {
    /// sobolev columns are ||U||_l for l = 0..s.
    NormTrace trace;
    std::optional<LogLogFit> fit;  // of ||U||_{s-1}
    double dt = 0.0;
    long steps = 0;
    double mean_drift = 0.0;          // max change of the cell means of v and u
    double max_imag_residue = 0.0;    // largest imaginary part dropped by inverse transforms
    double max_high_fraction = 0.0;   // energy share of modes removed by the 2/3 rule
    bool passed = false;              // fitted exponent inside the configured band

    std::vector<double> norm_s_minus_1() const;
};

/// Integrates from the configured initial data to t_final. Throws
/// Error(parameter) on invalid configuration or oversized data,
/// Error(blow_up) on norm growth or non-finite values, and
/// Error(domain_violation) on phase exit.
SimulationResult simulate(const FluidModel& model, const EquilibriumState& eq, const SimulationConfig& config);

/// The same run started from explicit data.
SimulationResult simulate(const FluidModel& model, const EquilibriumState& eq, const SimulationConfig& config,
                          const PerturbationState& initial);

}  // namespace nsk
