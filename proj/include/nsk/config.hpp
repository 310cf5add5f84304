#pragma once

// JSON configuration: model specifications and run files.
//
// Model:  {"law": "adiabatic" | "vdw" | "custom-power", "params": {...},
//          "C0": number, "mu": {...}, "kappa": {...}}
//   adiabatic params:    R_theta, gamma
//   vdw params:          a, b, R, theta
//   custom-power params: A, gamma
//   mu / kappa:          {"form": "constant" | "power" | "eulerian_power",
//                         "coef": c, "exponent": e}; default constant 1.
//
// Run file keys: model, equilibrium {v_bar, u_bar}, grid {L, N},
// init {shape, amplitude, width, seed}, time {dt, T, save_every}, s, plus
// the optional sections documented on RunConfig. Missing keys keep the
// defaults below, which describe the canonical state and experiments.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsk/model.hpp"
#include "nsk/nonlinear.hpp"

namespace nsk {

using json = nlohmann::json;

/// Builds and validates a model. Throws Error(config) on malformed input
/// and the model's own errors on invalid parameters.
FluidModel model_from_json(const json& spec);

/// The canonical model specification.
json canonical_model_json();

struct LinearDecayConfig {
    double length = 16384.0;
    int points = 32768;
    double width = 5.0;
    std::vector<int> orders{0, 1, 2};
    double t_lo = 1e2;
    double t_hi = 1e4;
    int samples = 41;  // log-spaced times in [1, t_hi]
    double slack = 0.05;
};

struct EnvelopeConfig {
    std::vector<double> times{0.1, 1.0, 10.0, 100.0};
    double min_k = 0.1;
    double max_C = 10.0;
};

struct IntegralsConfig {
    std::vector<double> times{0.0, 1.0, 10.0, 100.0, 1e3, 1e4};
    std::vector<int> orders{0, 1, 2, 3};
    double k = 1.0;
    double c1 = 1.0;
};

struct RunConfig {
    json model = canonical_model_json();
    double v_bar = 1.0;
    double u_bar = 0.0;
    /// Nonlinear run: grid, initial data, time stepping, s, fit window.
    SimulationConfig simulation;
    /// "linear_decay": {L, N, width, orders, t_lo, t_hi, samples, slack}
    LinearDecayConfig linear_decay;
    /// "envelope": {t, min_k, max_C}
    EnvelopeConfig envelope;
    /// "integrals": {t, orders, k, c1}
    IntegralsConfig integrals;
    /// "debug": {"zero_dissipation": true} drops B from the symbol checks.
    bool zero_dissipation = false;
    /// Seed for all randomness (random initial data, energy test vectors).
    std::uint64_t seed = 1;
};

/// Throws Error(config) on malformed input.
RunConfig run_config_from_json(const json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace nsk
