#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "qhalo/grid.hpp"
#include "qhalo/kernel.hpp"
#include "qhalo/params.hpp"

namespace qhalo {

/// Hermitian Gaussian density matrix of one mode, unit trace.
///
/// Zero-centered form, with x = Q·√(MΩ/ħ):
///
///     ρ₀(x, x') ∝ exp(−¼[a(x + x')² + b(x − x')² − 2ic(x² − x'²)])
///
/// and the centered state is the Weyl displacement of ρ₀ to (center_x, center_p).
/// a is the inverse position spread, b the inverse coherence length, c the
/// position-momentum correlation. Physical states have b ≥ a > 0, b = a iff pure.
struct GaussianDM {
    double a{1.0};
    double b{1.0};
    double c{0.0};
    double center_x{0.0};
    double center_p{0.0};

    PhaseSpacePoint center() const { return {center_x, center_p}; }

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
            throw std::invalid_argument("GaussianDM: a must be positive and finite");
        if (b < a * (1.0 - 1e-12))
            throw std::invalid_argument("GaussianDM: b < a violates the uncertainty bound");
    }

    /// Kernel form in scaled coordinates with unit trace.
    GaussianKernel to_kernel(const SimParams& params) const {
        const double xc = center_x / params.length_scale();
        const double pc = center_p / params.momentum_scale();
        GaussianKernel k;
        k.A(0, 0) = Complex(0.25 * (a + b), -0.5 * c);
        k.A(1, 1) = Complex(0.25 * (a + b), 0.5 * c);
        k.A(0, 1) = k.A(1, 0) = Complex(0.25 * (a - b), 0.0);
        const Eigen::Vector2cd ones(1.0, 1.0);
        k.l = 2.0 * xc * (k.A * ones) + Complex(0.0, pc) * Eigen::Vector2cd(1.0, -1.0);
        k.n0 = Complex(-xc * xc * a + 0.5 * std::log(a / kPi), 0.0);
        return k;
    }

    /// Reads (a, b, c, center) off a Hermitian Gaussian kernel; normalization is dropped.
    static GaussianDM from_kernel(const GaussianKernel& k, const SimParams& params) {
        GaussianDM dm;
        const Complex sum = k.A(0, 0) + k.A(1, 1);
        dm.a = (sum + 2.0 * k.A(0, 1)).real();
        dm.b = (sum - 2.0 * k.A(0, 1)).real();
        dm.c = -(k.A(0, 0) - k.A(1, 1)).imag();
        const double xc = (k.l(0) + k.l(1)).real() / (2.0 * dm.a);
        const double pc = k.l(0).imag() + xc * dm.c;
        dm.center_x = xc * params.length_scale();
        dm.center_p = pc * params.momentum_scale();
        return dm;
    }
};

/// Coherent state centered at (x, p).
inline GaussianDM make_coherent(double x, double p, const SimParams& params) {
    params.validate();
    return GaussianDM{1.0, 1.0, 0.0, x, p};
}

/// Pure squeezed state ψ(Q) ∝ exp(−(MΩ/2ħ)·C·Q²).
inline GaussianDM make_squeezed(const SqueezeParam& sq, const SimParams& params) {
    params.validate();
    sq.validate();
    return GaussianDM{sq.C.real(), sq.C.real(), -sq.C.imag(), 0.0, 0.0};
}

/// Tr ρ² = √(a/b).
inline double purity(const GaussianDM& dm) { return std::sqrt(dm.a / dm.b); }

inline double linear_entropy(const GaussianDM& dm) { return 1.0 - purity(dm); }

/// Thermal-ladder occupation n̄ = (√(b/a) − 1)/2 of the state's eigenbasis.
inline double mean_occupation(const GaussianDM& dm) {
    const double diff = dm.b - dm.a;
    if (diff <= 0.0) return 0.0;
    return 0.5 * diff / (std::sqrt(dm.a * dm.b) + dm.a);
}

/// (n̄+1)ln(n̄+1) − n̄ ln n̄ with 0·ln 0 = 0.
inline double entropy_from_occupation(double nbar) {
    if (nbar <= 0.0) return 0.0;
    return (nbar + 1.0) * std::log1p(nbar) - nbar * std::log(nbar);
}

inline double von_neumann_entropy(const GaussianDM& dm) { return entropy_from_occupation(mean_occupation(dm)); }

inline GaussianDM translate(const GaussianDM& dm, PhaseSpacePoint d) {
    GaussianDM out = dm;
    out.center_x += d.x;
    out.center_p += d.p;
    return out;
}

/// Entropy of independent modes is additive.
inline double multimode_entropy(std::span<const GaussianDM> modes) {
    double total = 0.0;
    for (const auto& m : modes) total += von_neumann_entropy(m);
    return total;
}

/// Default position grid: ±8·√(ħ/(MΩ·a)) around the center, 256 points.
inline GridSpec default_grid(const GaussianDM& dm, const SimParams& params) {
    return GridSpec{dm.center_x, 8.0 * params.length_scale() / std::sqrt(std::min(dm.a, dm.b)), 256};
}

/// Samples a kernel (scaled coordinates) on a physical grid, enforcing exact Hermiticity.
inline NumericDM sample_hermitian(const GaussianKernel& k, const GridSpec& grid, const SimParams& params) {
    grid.validate();
    const double ell = params.length_scale();
    const double scale = 1.0 / ell;
    const auto n = static_cast<Eigen::Index>(grid.points);
    NumericDM out{grid, Eigen::MatrixXcd(n, n)};
    const auto q = grid.nodes();
    for (Eigen::Index i = 0; i < n; ++i) {
        out.rho(i, i) = Complex(scale * k(q[i] / ell, q[i] / ell).real(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = scale * k(q[i] / ell, q[j] / ell);
            out.rho(i, j) = v;
            out.rho(j, i) = std::conj(v);
        }
    }
    return out;
}

inline NumericDM position_dm_grid(const GaussianDM& dm, const GridSpec& grid, const SimParams& params) {
    return sample_hermitian(dm.to_kernel(params), grid, params);
}

inline NumericDM position_dm_grid(const GaussianDM& dm, const SimParams& params) {
    return position_dm_grid(dm, default_grid(dm, params), params);
}

/// Phase-space covariance (scaled units, vacuum = I/2) of the state.
inline Eigen::Matrix2d covariance(const GaussianDM& dm) {
    // W ∝ exp(−a X² − (P − cX)²/b)
    Eigen::Matrix2d inv;
    inv << 2.0 * (dm.a + dm.c * dm.c / dm.b), -2.0 * dm.c / dm.b, -2.0 * dm.c / dm.b, 2.0 / dm.b;
    return inv.inverse();
}

inline PhaseGrid default_phase_grid(const GaussianDM& dm, const SimParams& params, std::size_t points = 256) {
    const Eigen::Matrix2d v = covariance(dm);
    return PhaseGrid{GridSpec{dm.center_x, 8.0 * std::sqrt(v(0, 0)) * params.length_scale(), points},
                     GridSpec{dm.center_p, 8.0 * std::sqrt(v(1, 1)) * params.momentum_scale(), points}};
}

/// Wigner function W(Q, P) in physical units; ∫∫ W dQ dP = 1.
inline PhaseField wigner(const GaussianDM& dm, const PhaseGrid& grid, const SimParams& params) {
    grid.x.validate();
    grid.p.validate();
    dm.validate();
    const double ell = params.length_scale();
    const double pis = params.momentum_scale();
    const double xc = dm.center_x / ell;
    const double pc = dm.center_p / pis;
    // normalized Gaussian with covariance V: 1/(2π√det V), det V = b/(4a)
    const double norm = 1.0 / (2.0 * kPi * std::sqrt(dm.b / (4.0 * dm.a))) / params.hbar;
    PhaseField out{grid, Eigen::MatrixXd(grid.x.points, grid.p.points)};
    for (std::size_t i = 0; i < grid.x.points; ++i) {
        const double X = grid.x.at(i) / ell - xc;
        for (std::size_t j = 0; j < grid.p.points; ++j) {
            const double P = grid.p.at(j) / pis - pc;
            const double r = P - dm.c * X;
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                norm * std::exp(-dm.a * X * X - r * r / dm.b);
        }
    }
    return out;
}

inline PhaseField wigner(const GaussianDM& dm, const SimParams& params) {
    return wigner(dm, default_phase_grid(dm, params), params);
}

}  // namespace qhalo
