#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nsk/error.hpp"
#include "nsk/fit.hpp"
#include "nsk/linear.hpp"

using namespace nsk;

namespace {

// Taylor series with scaling and squaring, independent of the propagator.
CMat2 exp_series(const CMat2& m) {
    int squarings = 0;
    for (double n = max_abs(m); n > 0.25; n *= 0.5) ++squarings;
    const CMat2 a = std::pow(0.5, squarings) * m;
    CMat2 term = CMat2::identity(), sum = CMat2::identity();
    for (int k = 1; k < 30; ++k) {
        term = (1.0 / k) * (term * a);
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

CVec2 mul(const CMat2& m, const CVec2& v) { return m * v; }

// A state with a coincident eigenvalue pair at xi^2 = 40/3:
// mu = v = 1, q = 2, kappa = 0.1 gives xi^2 mu^2 = 4 (q + xi^2 kappa).
EquilibriumState jordan_state() {
    static const FluidModel m =
        make_adiabatic_model(1.0, 2.0, 10.0, {CoefficientLaw::constant(1.0), CoefficientLaw::constant(0.1)});
    return make_equilibrium(m, 1.0, 0.0);
}

}  // namespace

TEST_CASE("mode generator entries") {
    const EquilibriumState eq = canonical_equilibrium();
    const CMat2 m = mode_generator(eq, 2.0);
    CHECK(m(0, 0) == cplx(0.0));
    CHECK(m(0, 1) == cplx(0.0, 2.0));
    CHECK(m(1, 0) == cplx(0.0, 12.0));
    CHECK(m(1, 1) == cplx(-4.0));
    CHECK(mode_generator(eq, 2.0, Dissipation::suppressed)(1, 1) == cplx(0.0));
}

TEST_CASE("complex expm1") {
    for (const cplx z : {cplx(1e-10, 2e-10), cplx(-1e-6, 0.0), cplx(0.0, 1e-8), cplx(0.3, -0.2), cplx(-5.0, 3.0)}) {
        // Series oracle for small z, direct formula otherwise.
        const cplx exact = std::abs(z) < 1e-3 ? z + z * z / 2.0 + z * z * z / 6.0 : std::exp(z) - 1.0;
        CHECK(std::abs(expm1(z) - exact) <= 1e-15 * std::abs(exact));
    }
}

TEST_CASE("mode propagator agrees with the series") {
    const EquilibriumState eq = canonical_equilibrium();
    for (const double xi : {-40.0, -1.0, 0.0, 1e-4, 0.3, 2.0, 15.0}) {
        const ModePropagator p(eq, xi);
        for (const double t : {0.0, 0.01, 0.5, 3.0}) {
            const CMat2 exact = exp_series(t * p.generator());
            CHECK(max_abs(p.exp(t) - exact) <= 1e-11 * std::max(1.0, max_abs(exact)));
        }
    }
}

TEST_CASE("semigroup property") {
    const EquilibriumState eq = canonical_equilibrium();
    for (const double xi : {0.05, 0.7, 6.0}) {
        const ModePropagator p(eq, xi);
        const CMat2 lhs = p.exp(1.3) * p.exp(2.1);
        CHECK(max_abs(lhs - p.exp(3.4)) <= 1e-13);
    }
}

TEST_CASE("jordan case") {
    const EquilibriumState eq = jordan_state();
    const double xi = std::sqrt(40.0 / 3.0);
    const ModePropagator p(eq, xi);
    CHECK(p.jordan());
    CHECK(std::abs(p.lambda_plus() - p.lambda_minus()) < 1e-6);
    for (const double t : {0.01, 0.2, 1.0}) {
        const CMat2 exact = exp_series(t * p.generator());
        CHECK(max_abs(p.exp(t) - exact) <= 1e-10 * max_abs(exact));
    }
    // Just off the coincidence the Sylvester form stays accurate.
    const ModePropagator q(eq, xi * (1.0 + 1e-6));
    CHECK(max_abs(q.exp(1.0) - exp_series(q.generator())) <= 1e-9);
}

TEST_CASE("propagator contracts in the V metric") {
    const EquilibriumState eq = canonical_equilibrium();
    for (const double xi : default_nonzero_xi_grid()) {
        const ModePropagator p(eq, xi);
        for (const double t : {0.1, 10.0}) CHECK(v_metric_norm(eq, p.exp(t), xi) <= 1.0 + 1e-12);
    }
    CHECK(weighted_u_norm(CMat2::identity(), 3.0) == doctest::Approx(1.0));
}

TEST_CASE("energy functional and its rate") {
    const EquilibriumState eq = canonical_equilibrium();
    const double delta = sufficient_delta(eq);
    const auto vs = random_unit_vectors(5, 42);
    for (const double xi : {0.2, 1.0, 7.0}) {
        const EnergyForms f = energy_forms(eq, xi, delta);
        // Generator of V_t in the symmetrized variables.
        const SymbolBundle b = symbol_bundle(eq, xi);
        const CMat2 g = -1.0 * (cplx(0.0, xi) * to_complex(b.A_tilde) + to_complex(xi * xi * symbol_B_bar(eq)));
        for (const CVec2& v : vs) {
            const double e = energy_functional(eq, xi, v, delta);
            CHECK(e == doctest::Approx(inner(v, mul(f.energy, v)).real()).epsilon(1e-13));
            CHECK(std::abs(inner(v, mul(f.energy, v)).imag()) < 1e-15);
            // Central difference along the exact flow.
            const double h = 1e-5 / max_abs(g);
            const double ep = energy_functional(eq, xi, mul(exp_series(h * g), v), delta);
            const double em = energy_functional(eq, xi, mul(exp_series(-h * g), v), delta);
            CHECK(energy_rate(eq, xi, v, delta) == doctest::Approx((ep - em) / (2 * h)).epsilon(1e-6));
        }
    }
    CVec2 v{{1.0, 0.0}};
    CHECK_THROWS_AS(energy_functional(eq, 1.0, v, 0.0), Error);
    CHECK_THROWS_AS(energy_functional(eq, 1.0, v, 1.0), Error);
}

TEST_CASE("energy inequality on the canonical state") {
    const EquilibriumState eq = canonical_equilibrium();
    const auto xi = default_nonzero_xi_grid();
    const EnergyParams p = select_delta(eq, xi);
    CHECK(p.delta > 0.0);
    CHECK(p.delta <= 0.5);
    CHECK(p.k >= 0.1);
    CHECK(energy_equivalence_holds(eq, p.delta, xi, 2.0));
    const EnergyCheck all = verify_energy_inequality_all_directions(eq, p.delta, xi);
    CHECK(all.passed);
    CHECK(all.k >= 0.1);
    CHECK(energy_equivalence_holds(eq, sufficient_delta(eq), xi, 2.0));
}

TEST_CASE("random unit vectors are deterministic and normalized") {
    const auto a = random_unit_vectors(10, 7);
    const auto b = random_unit_vectors(10, 7);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(norm2(a[i]) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(a[i][0] == b[i][0]);
    }
    CHECK(random_unit_vectors(1, 8)[0][0] != a[0][0]);
}

TEST_CASE("pointwise decay envelope") {
    const EquilibriumState eq = canonical_equilibrium();
    const auto xi = default_xi_grid();
    const std::vector<double> t{0.1, 1.0, 10.0, 100.0};
    const EnvelopeReport r = verify_pointwise_decay(eq, xi, t);
    CHECK(r.v_form.k >= 0.1);
    CHECK(r.v_form.C <= 10.0);
    CHECK(r.u_form.k >= 0.1);
    CHECK(r.u_form.C <= 100.0);
    CHECK(r.ladder.size() == 20);
    for (const auto& s : envelope_samples(eq, r.v_form, xi, t)) {
        CHECK(s.ok);
        CHECK(s.opnorm <= s.bound * (1 + 1e-12));
    }
}

TEST_CASE("semigroup on the grid") {
    const EquilibriumState eq = canonical_equilibrium();
    const SpectralGrid grid(100.0, 256);
    const Fft fft(256);
    SpectralField f;
    for (int j = 0; j < 256; ++j) {
        const double x = grid.x(j) - 50.0;
        f.v.push_back(std::exp(-x * x / 4.0));
        f.u.push_back(x * std::exp(-x * x / 9.0));
    }
    SUBCASE("identity at t = 0") {
        const SpectralField g = semigroup_apply(eq, grid, fft, f, 0.0);
        for (int j = 0; j < 256; ++j) CHECK(g.v[j] == doctest::Approx(f.v[j]).epsilon(1e-13).scale(1.0));
    }
    SUBCASE("composition and conserved means") {
        const SpectralField a = semigroup_apply(eq, grid, fft, semigroup_apply(eq, grid, fft, f, 0.7), 1.1);
        const SpectralField b = semigroup_apply(eq, grid, fft, f, 1.8);
        for (int j = 0; j < 256; ++j) CHECK(std::abs(a.v[j] - b.v[j]) < 1e-13);
        CHECK(cell_mean(b.v) == doctest::Approx(cell_mean(f.v)).epsilon(1e-13));
        CHECK(cell_mean(b.u) == doctest::Approx(cell_mean(f.u)).scale(1.0).epsilon(1e-13));
    }
    SUBCASE("grid mismatch") {
        SpectralField small{std::vector<double>(128), std::vector<double>(128)};
        try {
            semigroup_apply(eq, grid, fft, small, 1.0);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::grid_mismatch);
        }
    }
}

TEST_CASE("linear decay exponents on a moderate grid") {
    const EquilibriumState eq = canonical_equilibrium();
    const double length = 4096.0;
    const int n = 8192;
    const SpectralGrid grid(length, n);
    const Fft fft(n);
    SpectralField f;
    for (int j = 0; j < n; ++j) {
        const double x = grid.x(j) - length / 2;
        f.v.push_back(std::exp(-x * x / 25.0));
        f.u.push_back(0.0);
    }
    const std::vector<int> orders{0, 1, 2};
    const auto t = log_space(1.0, 1e4, 41);
    const NormTrace tr = linear_decay_experiment(eq, grid, fft, f, orders, t, {1e2, 1e4});
    REQUIRE(tr.slopes.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        const double rate = orders[j] / 2.0 + 0.25;
        CHECK(*tr.slopes[j] <= -rate + 0.05);
        CHECK(*tr.slopes[j] >= -rate - 0.1);
    }
    const SpectralField zero{std::vector<double>(n), std::vector<double>(n)};
    const NormTrace z = linear_decay_experiment(eq, grid, fft, zero, orders, t, {1e2, 1e4});
    CHECK_FALSE(z.slopes[0].has_value());
}
