#include "nsk/mat2.hpp"

#include <algorithm>
#include <numbers>

namespace nsk {

std::pair<double, double> sym_eigenvalues(const Mat2& m) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
    const double r = std::hypot(half_diff, m(0, 1));
    return {mean - r, mean + r};
}

std::pair<Vec2, Vec2> sym_eigenvectors(const Mat2& m) {
    // Jacobi rotation angle that diagonalizes the symmetric matrix.
    const double off = m(0, 1);
    const double diff = m(1, 1) - m(0, 0);
    const double theta = 0.5 * std::atan2(2.0 * off, -diff);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Vec2 e_hi{{c, s}};
    Vec2 e_lo{{-s, c}};
    // atan2 branch puts the larger eigenvalue on (c, s).
    return {e_lo, e_hi};
}

double hermitian_max_eigenvalue(const CMat2& h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    return 0.5 * (a + d) + std::hypot(0.5 * (a - d), std::abs(h(0, 1)));
}

std::pair<cplx, cplx> eigenvalues(const CMat2& m) {
    const cplx half_tr = 0.5 * m.trace();
    const cplx det = m.det();
    const cplx s = std::sqrt(half_tr * half_tr - det);
    // Pick the root of larger modulus first, recover the other from the
    // product of the roots.
    const cplx big = (std::real(std::conj(half_tr) * s) >= 0.0) ? half_tr + s : half_tr - s;
    cplx small = 0.0;
    if (big != 0.0) {
        small = det / big;
    }
    if (small.real() > big.real()) return {small, big};
    return {big, small};
}

double operator_norm(const CMat2& m) {
    // Largest eigenvalue of the Gram matrix m* m, written with entry
    // differences so near-unitary inputs do not cancel.
    const double a = std::norm(m(0, 0)) + std::norm(m(1, 0));
    const double c = std::norm(m(0, 1)) + std::norm(m(1, 1));
    const cplx b = std::conj(m(0, 0)) * m(0, 1) + std::conj(m(1, 0)) * m(1, 1);
    return std::sqrt(0.5 * (a + c) + std::hypot(0.5 * (a - c), std::abs(b)));
}

double operator_norm(const Mat2& m) { return operator_norm(to_complex(m)); }

cplx divided_difference(const std::function<cplx(cplx)>& f, cplx a, cplx b) {
    if (std::abs(a - b) > 0.5) {
        return (f(a) - f(b)) / (a - b);
    }
    // (1/2 pi i) \oint f(z) / ((z - a)(z - b)) dz on |z - c| = 1.
    constexpr int kNodes = 64;
    const cplx c = 0.5 * (a + b);
    cplx acc = 0.0;
    for (int j = 0; j < kNodes; ++j) {
        const double th = 2.0 * std::numbers::pi * (j + 0.5) / kNodes;
        const cplx w = std::polar(1.0, th);
        const cplx z = c + w;
        acc += f(z) * w / ((z - a) * (z - b));
    }
    return acc / double(kNodes);
}

CMat2 matrix_function(const std::function<cplx(cplx)>& f, const CMat2& m) {
    const auto [l1, l2] = eigenvalues(m);
    const cplx f2 = f(l2);
    const cplx dd = divided_difference(f, l1, l2);
    return f2 * CMat2::identity() + dd * (m - l2 * CMat2::identity());
}

}  // namespace nsk
