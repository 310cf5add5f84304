#include "nsk/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "nsk/error.hpp"

namespace nsk {

SpectralGrid::SpectralGrid(double length, int n) : length_(length), n_(n) {
    if (!(length > 0.0)) throw Error(ErrorKind::parameter, "grid length must be positive");
    if (n < 16 || n % 2 != 0) throw Error(ErrorKind::parameter, "grid size must be even and >= 16");
    xi_.resize(n);
    for (int k = 0; k < n; ++k) {
        const int m = k < n / 2 ? k : k - n;
        xi_[k] = 2.0 * std::numbers::pi * m / length;
    }
}

bool SpectralGrid::dealias_keep(int k) const {
    const int m = k < n_ / 2 ? k : k - n_;
    return 3 * std::abs(m) < n_;
}

namespace {
// Plan creation is not thread safe in FFTW; execution with new arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Per-thread aligned scratch so execution never allocates and always meets
// the alignment the plans were created with.
struct Scratch {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    int n = 0;

    ~Scratch() { release(); }
    void release() {
        if (in) fftw_free(in);
        if (out) fftw_free(out);
        in = out = nullptr;
    }
    void ensure(int size) {
        if (size == n) return;
        release();
        in = fftw_alloc_complex(size);
        out = fftw_alloc_complex(size);
        n = size;
    }
};

Scratch& scratch(int n) {
    thread_local Scratch s;
    s.ensure(n);
    return s;
}
}  // namespace

struct Fft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

Fft::Fft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
    if (n <= 0) throw Error(ErrorKind::parameter, "FFT size must be positive");
    fftw_complex* a = fftw_alloc_complex(n);
    fftw_complex* b = fftw_alloc_complex(n);
    {
        std::lock_guard lock(planner_mutex());
        plans_->fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
        plans_->bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_free(a);
    fftw_free(b);
}

Fft::~Fft() {
    if (!plans_) return;
    std::lock_guard lock(planner_mutex());
    if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
    if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::check(std::size_t size) const {
    if (static_cast<int>(size) != n_) throw Error(ErrorKind::grid_mismatch, "FFT input size mismatch");
}

void Fft::forward(std::span<const double> x, std::span<cplx> out) const {
    check(x.size());
    check(out.size());
    Scratch& s = scratch(n_);
    for (int j = 0; j < n_; ++j) {
        s.in[j][0] = x[j];
        s.in[j][1] = 0.0;
    }
    fftw_execute_dft(plans_->fwd, s.in, s.out);
    std::copy_n(reinterpret_cast<const cplx*>(s.out), n_, out.begin());
}

void Fft::forward(std::span<const cplx> x, std::span<cplx> out) const {
    check(x.size());
    check(out.size());
    Scratch& s = scratch(n_);
    std::copy_n(x.begin(), n_, reinterpret_cast<cplx*>(s.in));
    fftw_execute_dft(plans_->fwd, s.in, s.out);
    std::copy_n(reinterpret_cast<const cplx*>(s.out), n_, out.begin());
}

void Fft::inverse(std::span<const cplx> x, std::span<cplx> out) const {
    check(x.size());
    check(out.size());
    Scratch& s = scratch(n_);
    std::copy_n(x.begin(), n_, reinterpret_cast<cplx*>(s.in));
    fftw_execute_dft(plans_->bwd, s.in, s.out);
    const double scale = 1.0 / n_;
    const auto* r = reinterpret_cast<const cplx*>(s.out);
    for (int j = 0; j < n_; ++j) out[j] = r[j] * scale;
}

std::vector<cplx> Fft::forward(std::span<const double> x) const {
    std::vector<cplx> out(n_);
    forward(x, out);
    return out;
}

std::vector<cplx> Fft::forward(std::span<const cplx> x) const {
    std::vector<cplx> out(n_);
    forward(x, out);
    return out;
}

std::vector<cplx> Fft::inverse(std::span<const cplx> x) const {
    std::vector<cplx> out(n_);
    inverse(x, out);
    return out;
}

std::vector<double> Fft::inverse_real(std::span<const cplx> x, double* max_imag) const {
    const auto z = inverse(x);
    std::vector<double> out(z.size());
    double im = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        out[j] = z[j].real();
        im = std::max(im, std::abs(z[j].imag()));
    }
    if (max_imag) *max_imag = im;
    return out;
}

SpectralCoeffs to_spectral(const Fft& fft, const SpectralField& f) { return {fft.forward(f.v), fft.forward(f.u)}; }

SpectralField to_physical(const Fft& fft, const SpectralCoeffs& c, double* max_imag) {
    double iv = 0.0, iu = 0.0;
    SpectralField f{fft.inverse_real(c.v, &iv), fft.inverse_real(c.u, &iu)};
    if (max_imag) *max_imag = std::max(iv, iu);
    return f;
}

std::vector<double> spectral_derivative(const SpectralGrid& grid, const Fft& fft, std::span<const double> g,
                                        int order) {
    auto c = fft.forward(g);
    const auto xi = grid.xi();
    const int n = grid.size();
    for (int k = 0; k < n; ++k) {
        // The Nyquist mode has no well-defined odd derivative of a real field.
        if (k == n / 2 && order % 2 == 1) {
            c[k] = 0.0;
            continue;
        }
        cplx factor = 1.0;
        for (int i = 0; i < order; ++i) factor *= cplx(0.0, xi[k]);
        c[k] *= factor;
    }
    return fft.inverse_real(c);
}

double sobolev_norm_sq(const SpectralGrid& grid, std::span<const cplx> coeffs, double s) {
    return weighted_energy(grid, coeffs, [s](double xi) { return std::pow(1.0 + xi * xi, s); });
}

double sobolev_norm(const SpectralGrid& grid, std::span<const cplx> coeffs, double s) {
    return std::sqrt(sobolev_norm_sq(grid, coeffs, s));
}

double sobolev_norm(const SpectralGrid& grid, const Fft& fft, std::span<const double> g, double s) {
    const auto c = fft.forward(g);
    return sobolev_norm(grid, c, s);
}

double derivative_sobolev_norm_sq(const SpectralGrid& grid, std::span<const cplx> coeffs, int l, double s) {
    return weighted_energy(grid, coeffs,
                           [l, s](double xi) { return std::pow(xi * xi, l) * std::pow(1.0 + xi * xi, s); });
}

double state_norm(const SpectralGrid& grid, const SpectralCoeffs& c, int k) {
    return std::sqrt(sobolev_norm_sq(grid, c.v, k + 1) + sobolev_norm_sq(grid, c.u, k));
}

double l1_norm(const SpectralGrid& grid, std::span<const double> g) {
    double acc = 0.0;
    for (const double x : g) acc += std::abs(x);
    return acc * grid.dx();
}

double cell_mean(std::span<const double> g) {
    return std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
}

}  // namespace nsk
