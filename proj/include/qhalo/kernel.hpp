#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qhalo/params.hpp"

namespace qhalo {

/// General complex Gaussian two-point kernel
///
///     K(x, x') = exp(−zᵀ A z + lᵀ z + n0),   z = (x, x')
///
/// in scaled coordinates x = Q·√(MΩ/ħ). A is complex symmetric with positive
/// definite real part; the kernel is one term ψ_i(Q)ψ_j*(Q') of a superposition
/// or a whole Gaussian density matrix. As a function of physical Q the kernel
/// value is √(MΩ/ħ)·K(x, x').
struct GaussianKernel {
    Eigen::Matrix2cd A{Eigen::Matrix2cd::Identity() * 0.5};
    Eigen::Vector2cd l{Eigen::Vector2cd::Zero()};
    Complex n0{0.0, 0.0};

    Complex log_value(double x, double xp) const {
        const Eigen::Vector2cd z(x, xp);
        return -(z.transpose() * A * z)(0, 0) + (l.transpose() * z)(0, 0) + n0;
    }

    Complex operator()(double x, double xp) const { return std::exp(log_value(x, xp)); }

    /// K†(x, x') = conj(K(x', x)).
    GaussianKernel adjoint() const {
        GaussianKernel out;
        out.A(0, 0) = std::conj(A(1, 1));
        out.A(1, 1) = std::conj(A(0, 0));
        out.A(0, 1) = out.A(1, 0) = std::conj(A(0, 1));
        out.l = Eigen::Vector2cd(std::conj(l(1)), std::conj(l(0)));
        out.n0 = std::conj(n0);
        return out;
    }

    bool integrable() const {
        const Eigen::Matrix2d re = A.real();
        return re(0, 0) > 0.0 && re.determinant() > 0.0;
    }

    /// ∫ K(x, x) dx.
    Complex trace() const {
        const Complex s = A(0, 0) + 2.0 * A(0, 1) + A(1, 1);
        const Complex m = l(0) + l(1);
        if (!(s.real() > 0.0)) throw std::domain_error("GaussianKernel::trace: diagonal not integrable");
        return std::sqrt(kPi / s) * std::exp(m * m / (4.0 * s) + n0);
    }

    /// Largest |K(x, x')| over the plane.
    double peak_magnitude() const {
        const Eigen::Matrix2d re = A.real();
        const Eigen::Vector2d lr = l.real();
        if (!integrable()) throw std::domain_error("GaussianKernel::peak_magnitude: not integrable");
        const double quad = lr.dot(re.inverse() * lr) / 4.0;
        return std::exp(quad + n0.real());
    }

    GaussianKernel scaled(Complex factor) const {
        GaussianKernel out = *this;
        out.n0 += std::log(factor);
        return out;
    }
};

namespace detail {

/// √det G for complex symmetric G with positive definite real part: the product
/// of principal square roots of the eigenvalues, which all lie in Re > 0. This
/// is the branch continuous from real positive definite G.
inline Complex sqrt_det_right_half(const Eigen::Matrix2cd& G) {
    const Complex tr = G.trace();
    const Complex det = G.determinant();
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    const Complex e1 = 0.5 * (tr + disc);
    const Complex e2 = 0.5 * (tr - disc);
    return std::sqrt(e1) * std::sqrt(e2);
}

}  // namespace detail
}  // namespace qhalo
