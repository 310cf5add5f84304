#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "doctest.h"
#include "nsk/error.hpp"
#include "nsk/spectral.hpp"

using namespace nsk;
using std::numbers::pi;

namespace {

std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) out[k] += x[j] * std::polar(1.0, -2.0 * pi * double(j * k % n) / n);
    }
    return out;
}

}  // namespace

TEST_CASE("grid wavenumbers and dealiasing") {
    const SpectralGrid g(2.0 * pi, 16);
    CHECK(g.dx() == doctest::Approx(2.0 * pi / 16));
    CHECK(g.xi()[1] == doctest::Approx(1.0));
    CHECK(g.xi()[8] == doctest::Approx(-8.0));
    CHECK(g.xi()[15] == doctest::Approx(-1.0));
    CHECK(g.dealias_keep(5));
    CHECK_FALSE(g.dealias_keep(6));
    CHECK(g.dealias_keep(11));
    CHECK_FALSE(g.dealias_keep(10));
    CHECK_THROWS_AS(SpectralGrid(1.0, 15), Error);
    CHECK_THROWS_AS(SpectralGrid(1.0, 8), Error);
    CHECK_THROWS_AS(SpectralGrid(0.0, 16), Error);
}

TEST_CASE("fft matches the naive transform") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const int n = 64;
    std::vector<cplx> x(n);
    for (auto& c : x) c = {g(rng), g(rng)};
    const Fft fft(n);
    const auto fast = fft.forward(x);
    const auto slow = naive_dft(x);
    for (int k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-12);
    const auto back = fft.inverse(fast);
    for (int k = 0; k < n; ++k) CHECK(std::abs(back[k] - x[k]) < 1e-14);
}

TEST_CASE("fft rejects mismatched sizes") {
    const Fft fft(32);
    const std::vector<double> wrong(31);
    CHECK_THROWS_AS(fft.forward(wrong), Error);
}

TEST_CASE("fft is usable from several threads") {
    const int n = 256;
    const Fft fft(n);
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = std::sin(3.0 * j) + 0.1 * j;
    const auto ref = fft.forward(x);
    std::vector<double> err(4, 1.0);
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            double e = 0.0;
            for (int rep = 0; rep < 200; ++rep) {
                const auto c = fft.forward(x);
                for (int k = 0; k < n; ++k) e = std::max(e, std::abs(c[k] - ref[k]));
            }
            err[t] = e;
        });
    }
    for (auto& th : pool) th.join();
    for (const double e : err) CHECK(e == 0.0);
}

TEST_CASE("spectral derivatives of trigonometric polynomials") {
    const double length = 10.0;
    const SpectralGrid g(length, 64);
    const Fft fft(64);
    const double w = 2.0 * pi * 3.0 / length;
    std::vector<double> f(64);
    for (int j = 0; j < 64; ++j) f[j] = std::sin(w * g.x(j));
    const auto d1 = spectral_derivative(g, fft, f, 1);
    const auto d3 = spectral_derivative(g, fft, f, 3);
    for (int j = 0; j < 64; ++j) {
        CHECK(d1[j] == doctest::Approx(w * std::cos(w * g.x(j))).epsilon(1e-12).scale(w));
        CHECK(d3[j] == doctest::Approx(-w * w * w * std::cos(w * g.x(j))).epsilon(1e-12).scale(w * w * w));
    }
}

TEST_CASE("sobolev norms of a single mode") {
    const double length = 8.0;
    const int n = 128;
    const SpectralGrid g(length, n);
    const Fft fft(n);
    const double w = 2.0 * pi * 5.0 / length;
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) f[j] = std::cos(w * g.x(j));
    // int_0^L cos^2 = L / 2.
    for (const double s : {0.0, 1.0, 2.5}) {
        const double exact = std::sqrt(std::pow(1.0 + w * w, s) * length / 2.0);
        CHECK(sobolev_norm(g, fft, f, s) == doctest::Approx(exact).epsilon(1e-13));
    }
    const auto c = fft.forward(f);
    CHECK(derivative_sobolev_norm_sq(g, c, 2, 1.0) ==
          doctest::Approx(std::pow(w, 4) * (1.0 + w * w) * length / 2.0).epsilon(1e-13));
    const SpectralCoeffs state{c, c};
    CHECK(state_norm(g, state, 1) ==
          doctest::Approx(std::sqrt((std::pow(1 + w * w, 2) + (1 + w * w)) * length / 2.0)).epsilon(1e-13));
}

TEST_CASE("plancherel on random data") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    const SpectralGrid grid(3.0, 200);
    const Fft fft(200);
    std::vector<double> f(200);
    double direct = 0.0;
    for (auto& x : f) {
        x = g(rng);
        direct += x * x * grid.dx();
    }
    CHECK(sobolev_norm_sq(grid, fft.forward(f), 0.0) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("physical round trip, means and L1") {
    const SpectralGrid g(4.0, 32);
    const Fft fft(32);
    SpectralField f;
    for (int j = 0; j < 32; ++j) {
        f.v.push_back(1.0 + std::sin(2.0 * pi * g.x(j) / 4.0));
        f.u.push_back(-2.0);
    }
    double imag = 1.0;
    const SpectralField back = to_physical(fft, to_spectral(fft, f), &imag);
    CHECK(imag < 1e-15);
    for (int j = 0; j < 32; ++j) CHECK(back.v[j] == doctest::Approx(f.v[j]).epsilon(1e-14));
    CHECK(cell_mean(f.v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cell_mean(f.u) == -2.0);
    CHECK(l1_norm(g, f.u) == doctest::Approx(8.0));
}
