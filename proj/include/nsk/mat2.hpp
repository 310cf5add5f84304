#pragma once

// Fixed-size 2x2 linear algebra. Everything in the symbol calculus is 2x2,
// so closed forms are used throughout instead of a general solver.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <utility>

namespace nsk {

using cplx = std::complex<double>;

template <typename T>
struct Vec2T {
    std::array<T, 2> a{};

    constexpr T& operator[](std::size_t i) { return a[i]; }
    constexpr const T& operator[](std::size_t i) const { return a[i]; }
};

template <typename T>
struct Mat2T {
    // row-major: (0,0) (0,1) (1,0) (1,1)
    std::array<T, 4> a{};

    constexpr Mat2T() = default;
    constexpr Mat2T(T m00, T m01, T m10, T m11) : a{m00, m01, m10, m11} {}

    static constexpr Mat2T identity() { return {T(1), T(0), T(0), T(1)}; }
    static constexpr Mat2T diag(T d0, T d1) { return {d0, T(0), T(0), d1}; }

    constexpr T& operator()(std::size_t r, std::size_t c) { return a[2 * r + c]; }
    constexpr const T& operator()(std::size_t r, std::size_t c) const { return a[2 * r + c]; }

    constexpr T trace() const { return a[0] + a[3]; }
    constexpr T det() const { return a[0] * a[3] - a[1] * a[2]; }

    constexpr Mat2T transpose() const { return {a[0], a[2], a[1], a[3]}; }
};

using Vec2 = Vec2T<double>;
using CVec2 = Vec2T<cplx>;
using Mat2 = Mat2T<double>;
using CMat2 = Mat2T<cplx>;

template <typename T>
constexpr Mat2T<T> operator+(const Mat2T<T>& x, const Mat2T<T>& y) {
    return {x.a[0] + y.a[0], x.a[1] + y.a[1], x.a[2] + y.a[2], x.a[3] + y.a[3]};
}

template <typename T>
constexpr Mat2T<T> operator-(const Mat2T<T>& x, const Mat2T<T>& y) {
    return {x.a[0] - y.a[0], x.a[1] - y.a[1], x.a[2] - y.a[2], x.a[3] - y.a[3]};
}

template <typename T>
constexpr Mat2T<T> operator*(const Mat2T<T>& x, const Mat2T<T>& y) {
    return {x.a[0] * y.a[0] + x.a[1] * y.a[2], x.a[0] * y.a[1] + x.a[1] * y.a[3],
            x.a[2] * y.a[0] + x.a[3] * y.a[2], x.a[2] * y.a[1] + x.a[3] * y.a[3]};
}

template <typename T, typename S>
constexpr Mat2T<T> operator*(S s, const Mat2T<T>& x) {
    return {T(s) * x.a[0], T(s) * x.a[1], T(s) * x.a[2], T(s) * x.a[3]};
}

template <typename T>
constexpr Vec2T<T> operator*(const Mat2T<T>& m, const Vec2T<T>& v) {
    return {{m.a[0] * v[0] + m.a[1] * v[1], m.a[2] * v[0] + m.a[3] * v[1]}};
}

template <typename T>
constexpr Vec2T<T> operator+(const Vec2T<T>& x, const Vec2T<T>& y) {
    return {{x[0] + y[0], x[1] + y[1]}};
}

template <typename T>
constexpr Vec2T<T> operator-(const Vec2T<T>& x, const Vec2T<T>& y) {
    return {{x[0] - y[0], x[1] - y[1]}};
}

template <typename T, typename S>
constexpr Vec2T<T> operator*(S s, const Vec2T<T>& x) {
    return {{T(s) * x[0], T(s) * x[1]}};
}

inline CMat2 to_complex(const Mat2& m) { return {m.a[0], m.a[1], m.a[2], m.a[3]}; }

inline CMat2 adjoint(const CMat2& m) {
    return {std::conj(m.a[0]), std::conj(m.a[2]), std::conj(m.a[1]), std::conj(m.a[3])};
}

/// Symmetric part (M + M^T)/2.
inline Mat2 sym(const Mat2& m) { return 0.5 * (m + m.transpose()); }

/// <x, y> = conj(x) . y
inline cplx inner(const CVec2& x, const CVec2& y) {
    return std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
}

inline double norm2(const CVec2& x) { return std::norm(x[0]) + std::norm(x[1]); }

/// Max absolute entry.
template <typename T>
double max_abs(const Mat2T<T>& m) {
    double r = 0.0;
    for (const auto& x : m.a) r = std::max(r, std::abs(x));
    return r;
}

/// Eigenvalues of a real symmetric 2x2 matrix, ascending.
std::pair<double, double> sym_eigenvalues(const Mat2& m);

/// Orthonormal eigenvectors of a real symmetric 2x2 matrix, ordered as
/// sym_eigenvalues.
std::pair<Vec2, Vec2> sym_eigenvectors(const Mat2& m);

/// Largest eigenvalue of a Hermitian 2x2 matrix.
double hermitian_max_eigenvalue(const CMat2& h);

/// Roots of z^2 - tr z + det = 0 (eigenvalues of a 2x2 matrix), computed
/// without cancellation. The first root has the larger real part.
std::pair<cplx, cplx> eigenvalues(const CMat2& m);

/// Spectral norm (largest singular value).
double operator_norm(const CMat2& m);
double operator_norm(const Mat2& m);

/// Divided difference f[a, b]; f'(a) when a == b. Uses a Cauchy contour
/// when the nodes are close, the difference quotient otherwise.
cplx divided_difference(const std::function<cplx(cplx)>& f, cplx a, cplx b);

/// f(M) for a 2x2 matrix via the Newton form f(l2) I + f[l1, l2] (M - l2 I),
/// which stays valid when the eigenvalues coincide (then (M - l I)^2 = 0).
CMat2 matrix_function(const std::function<cplx(cplx)>& f, const CMat2& m);

}  // namespace nsk
