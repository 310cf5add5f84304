#pragma once

// Periodic collocation grid on [0, L) standing in for the real line, an
// FFTW-backed transform, and Fourier-multiplier Sobolev norms.

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace nsk {

using cplx = std::complex<double>;

class SpectralGrid {
public:
    /// N must be even and >= 16.
    SpectralGrid(double length, int n);

    double length() const { return length_; }
    int size() const { return n_; }
    double dx() const { return length_ / n_; }
    double x(int j) const { return dx() * j; }

    /// Wavenumbers in FFT order: 2 pi n / L for n = 0..N/2-1, -N/2..-1.
    std::span<const double> xi() const { return xi_; }

    /// True for modes kept by the 2/3 rule (|n| < N/3).
    bool dealias_keep(int k) const;

    bool operator==(const SpectralGrid& other) const { return length_ == other.length_ && n_ == other.n_; }

private:
    double length_;
    int n_;
    std::vector<double> xi_;
};

/// Unnormalized complex DFT of size N: forward X_k = sum_j x_j e^{-2 pi i jk/N},
/// inverse divides by N. Safe to use from several threads.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;

    int size() const { return n_; }

    std::vector<cplx> forward(std::span<const double> x) const;
    std::vector<cplx> forward(std::span<const cplx> x) const;
    /// Inverse transform; returns the complex result.
    std::vector<cplx> inverse(std::span<const cplx> x) const;

    /// Allocation-free variants writing into `out` (size N).
    void forward(std::span<const double> x, std::span<cplx> out) const;
    void forward(std::span<const cplx> x, std::span<cplx> out) const;
    void inverse(std::span<const cplx> x, std::span<cplx> out) const;

    /// Inverse transform keeping the real part. `max_imag`, when given,
    /// receives the largest discarded imaginary magnitude.
    std::vector<double> inverse_real(std::span<const cplx> x, double* max_imag = nullptr) const;

private:
    void check(std::size_t size) const;

    struct Plans;
    int n_;
    std::unique_ptr<Plans> plans_;
};

/// Two-component real field (v, u) on a periodic grid.
struct SpectralField {
    std::vector<double> v;
    std::vector<double> u;
};

/// Fourier coefficients of a SpectralField (unnormalized FFT order).
struct SpectralCoeffs {
    std::vector<cplx> v;
    std::vector<cplx> u;
};

SpectralCoeffs to_spectral(const Fft& fft, const SpectralField& f);
SpectralField to_physical(const Fft& fft, const SpectralCoeffs& c, double* max_imag = nullptr);

/// l-th spectral derivative of a real field.
std::vector<double> spectral_derivative(const SpectralGrid& grid, const Fft& fft, std::span<const double> g, int order);

/// sum_k w(xi_k) |g^_k|^2 * L / N^2: Plancherel on the periodic cell.
template <typename Weight>
double weighted_energy(const SpectralGrid& grid, std::span<const cplx> coeffs, Weight w) {
    const auto xi = grid.xi();
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) acc += w(xi[k]) * std::norm(coeffs[k]);
    const double n = grid.size();
    return acc * grid.length() / (n * n);
}

/// ||g||_s^2 = sum (1 + xi^2)^s |g^|^2 (L / N^2); ||g||_0 is the L2 norm of
/// the cell.
double sobolev_norm_sq(const SpectralGrid& grid, std::span<const cplx> coeffs, double s);
double sobolev_norm(const SpectralGrid& grid, std::span<const cplx> coeffs, double s);
double sobolev_norm(const SpectralGrid& grid, const Fft& fft, std::span<const double> g, double s);

/// ||d^l g||_s^2 = sum xi^{2l} (1 + xi^2)^s |g^|^2 (L / N^2).
double derivative_sobolev_norm_sq(const SpectralGrid& grid, std::span<const cplx> coeffs, int l, double s);

/// ||U||_k = (||v||_{k+1}^2 + ||u||_k^2)^{1/2}.
double state_norm(const SpectralGrid& grid, const SpectralCoeffs& c, int k);

/// Rectangle-rule L1 norm of a field over the cell.
double l1_norm(const SpectralGrid& grid, std::span<const double> g);

/// Mean of a real field over the cell.
double cell_mean(std::span<const double> g);

}  // namespace nsk
