#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qhalo/grid.hpp"
#include "qhalo/kernel.hpp"
#include "qhalo/oracle.hpp"
#include "qhalo/params.hpp"
#include "qhalo/propagator.hpp"

namespace qhalo {

/// c1|s1⟩ + c2|s2⟩ with |s⟩ the coherent state centered at s. Amplitudes need not be
/// normalized; every constructor of a CatDM rescales to unit trace.
struct CatSpec {
    Complex c1{1.0, 0.0};
    Complex c2{1.0, 0.0};
    PhaseSpacePoint s1{};
    PhaseSpacePoint s2{};
};

/// ρ = Σ_ij K_ij with K_ij ∝ ψ_i ψ_j*; kernels are in scaled coordinates.
struct CatDM {
    std::array<std::array<GaussianKernel, 2>, 2> k{};
    double t{0.0};
    double D{0.0};

    Complex operator()(double x, double xp) const {
        return k[0][0](x, xp) + k[0][1](x, xp) + k[1][0](x, xp) + k[1][1](x, xp);
    }

    Complex trace() const { return k[0][0].trace() + k[0][1].trace() + k[1][0].trace() + k[1][1].trace(); }
};

namespace detail {

struct ScaledPoint {
    double x;
    double p;
};

inline ScaledPoint scaled(PhaseSpacePoint s, const SimParams& params) {
    return {s.x / params.length_scale(), s.p / params.momentum_scale()};
}

/// ψ_i(x) ψ_j*(x') for Weyl-displaced vacua, π^{-1/2} included.
inline GaussianKernel branch_kernel(ScaledPoint i, ScaledPoint j, Complex amp) {
    GaussianKernel k;
    k.l = Eigen::Vector2cd(Complex(i.x, i.p), Complex(j.x, -j.p));
    k.n0 = Complex(-0.5 * (i.x * i.x + j.x * j.x), 0.5 * (j.p * j.x - i.p * i.x)) - 0.5 * std::log(kPi) +
           std::log(amp);
    return k;
}

inline std::array<Complex, 2> normalized_amplitudes(const CatSpec& cat, const SimParams& params) {
    if (cat.c1 == Complex(0.0) && cat.c2 == Complex(0.0))
        throw std::invalid_argument("CatSpec: both amplitudes are zero");
    const ScaledPoint p1 = scaled(cat.s1, params);
    const ScaledPoint p2 = scaled(cat.s2, params);
    // cross term 2Re(c1 c2* ⟨ψ2|ψ1⟩) is the trace of the (1,2) kernel
    const double norm = std::norm(cat.c1) + std::norm(cat.c2) +
                        2.0 * branch_kernel(p1, p2, cat.c1 * std::conj(cat.c2)).trace().real();
    if (!(norm > 0.0)) throw std::invalid_argument("CatSpec: state has zero norm");
    const double r = 1.0 / std::sqrt(norm);
    return {cat.c1 * r, cat.c2 * r};
}

}  // namespace detail

/// Δ² = (MΩ/2ħ)[(x1 − x2)² + ((p1 − p2)/MΩ)²].
inline double separation(const CatSpec& cat, const SimParams& params) {
    params.validate();
    const auto a = detail::scaled(cat.s1, params);
    const auto b = detail::scaled(cat.s2, params);
    return 0.5 * ((a.x - b.x) * (a.x - b.x) + (a.p - b.p) * (a.p - b.p));
}

/// t_D = 1/(ΩD(Δ² − 1)); nullopt when D = 0 or Δ² ≤ 1 (inside the halo).
inline std::optional<double> decoherence_time(const CatSpec& cat, const SimParams& params) {
    const double d2 = separation(cat, params);
    if (params.D == 0.0 || d2 <= 1.0) return std::nullopt;
    return 1.0 / (params.omega * params.D * (d2 - 1.0));
}

/// The pure cat at t = 0.
inline CatDM cat_dm_initial(const CatSpec& cat, const SimParams& params) {
    params.validate();
    const auto c = detail::normalized_amplitudes(cat, params);
    const std::array<detail::ScaledPoint, 2> s{detail::scaled(cat.s1, params), detail::scaled(cat.s2, params)};
    CatDM out;
    out.D = params.D;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            out.k[i][j] = detail::branch_kernel(s[i], s[j], c[i] * std::conj(c[j]));
        }
    return out;
}

/// Closed form at t = 2nπ/Ω. The cross blocks carry the extra constant phase
/// exp(i(nπD/L)(x_j p_i − x_i p_j)) required for agreement with exact propagation.
inline CatDM cat_dm_stroboscopic(const CatSpec& cat, int n, const SimParams& params) {
    params.validate();
    if (n < 0) throw std::invalid_argument("cat_dm_stroboscopic: n must be >= 0");
    const auto c = detail::normalized_amplitudes(cat, params);
    const std::array<detail::ScaledPoint, 2> s{detail::scaled(cat.s1, params), detail::scaled(cat.s2, params)};
    const double npd = n * kPi * params.D;
    const double L = 1.0 + 2.0 * npd;
    const Complex I(0.0, 1.0);

    CatDM out;
    out.t = 2.0 * kPi * n / params.omega;
    out.D = params.D;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double X = s[i].x + s[j].x;
            const double dx = s[i].x - s[j].x;
            const double dp = s[i].p - s[j].p;
            const double ps = s[i].p + s[j].p;
            GaussianKernel k;
            k.A << 1.0 + L * L, 1.0 - L * L, 1.0 - L * L, 1.0 + L * L;
            k.A /= 4.0 * L;
            k.l(0) = -(-2.0 * X - 2.0 * L * dx - 4.0 * I * (s[i].p + npd * ps)) / (4.0 * L);
            k.l(1) = -(-2.0 * X + 2.0 * L * dx + 4.0 * I * (s[j].p + npd * ps)) / (4.0 * L);
            const Complex konst = X * X + dx * dx + 2.0 * I * (s[i].x * s[i].p - s[j].x * s[j].p) +
                                  2.0 * npd * (dx * dx + dp * dp);
            const Complex amp = c[i] * std::conj(c[j]);
            k.n0 = -konst / (4.0 * L) + std::log(amp / std::sqrt(kPi * L)) +
                   I * (npd / L) * (s[j].x * s[i].p - s[i].x * s[j].p);
            out.k[i][j] = k;
        }
    return out;
}

/// Kernel-wise exact propagation to any t ≥ 0.
inline CatDM cat_dm_general(const CatSpec& cat, double t, const SimParams& params) {
    require_nonnegative_time(t, "cat_dm_general");
    const CatDM init = cat_dm_initial(cat, params);
    CatDM out;
    out.t = t;
    out.D = params.D;
    out.k[0][0] = evolve_kernel(init.k[0][0], t, params);
    out.k[1][1] = evolve_kernel(init.k[1][1], t, params);
    out.k[0][1] = evolve_kernel(init.k[0][1], t, params);
    out.k[1][0] = out.k[0][1].adjoint();
    return out;
}

/// Whole cat density matrix on a physical grid.
inline NumericDM position_dm_grid(const CatDM& cat, const GridSpec& grid, const SimParams& params) {
    grid.validate();
    const double ell = params.length_scale();
    const auto n = static_cast<Eigen::Index>(grid.points);
    NumericDM out{grid, Eigen::MatrixXcd(n, n)};
    const auto q = grid.nodes();
    for (Eigen::Index i = 0; i < n; ++i) {
        out.rho(i, i) = Complex(cat(q[i] / ell, q[i] / ell).real() / ell, 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Complex v = cat(q[i] / ell, q[j] / ell) / ell;
            out.rho(i, j) = v;
            out.rho(j, i) = std::conj(v);
        }
    }
    return out;
}

/// Cross-block peak over the geometric mean of the diagonal-block peaks (analytic peaks).
inline double visibility(const CatDM& cat) {
    const double d1 = cat.k[0][0].peak_magnitude();
    const double d2 = cat.k[1][1].peak_magnitude();
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::domain_error("visibility: a diagonal block vanishes");
    return cat.k[0][1].peak_magnitude() / std::sqrt(d1 * d2);
}

/// Same ratio from block maxima sampled on a 2-D grid.
inline double visibility(const CatDM& cat, const GridSpec& grid, const SimParams& params) {
    grid.validate();
    const double ell = params.length_scale();
    const auto q = grid.nodes();
    std::array<std::array<double, 2>, 2> peak{};
    for (double qi : q)
        for (double qj : q)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    peak[a][b] = std::max(peak[a][b], std::abs(cat.k[a][b](qi / ell, qj / ell)));
    if (!(peak[0][0] > 0.0) || !(peak[1][1] > 0.0)) throw std::domain_error("visibility: a diagonal block vanishes");
    return peak[0][1] / std::sqrt(peak[0][0] * peak[1][1]);
}

struct DecayFit {
    double rate{0.0};       // least-squares slope of −ln V against t
    double intercept{0.0};
    std::vector<double> t;
    std::vector<double> visibility;
};

/// Visibility decay at stroboscopic times n = n_lo..n_hi.
inline DecayFit fit_visibility_decay(const CatSpec& cat, const SimParams& params, int n_lo = 1, int n_hi = 5) {
    if (n_lo < 0 || n_hi <= n_lo) throw std::invalid_argument("fit_visibility_decay: need 0 <= n_lo < n_hi");
    DecayFit f;
    for (int n = n_lo; n <= n_hi; ++n) {
        const CatDM dm = cat_dm_stroboscopic(cat, n, params);
        f.t.push_back(dm.t);
        f.visibility.push_back(visibility(dm));
    }
    const auto m = static_cast<double>(f.t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        const double y = -std::log(f.visibility[i]);
        st += f.t[i];
        sy += y;
        stt += f.t[i] * f.t[i];
        sty += f.t[i] * y;
    }
    f.rate = (m * sty - st * sy) / (m * stt - st * st);
    f.intercept = (sy - f.rate * st) / m;
    return f;
}

/// Radius, in Δ units, of the phase-space disc the environment cannot resolve within t_max:
/// 2/√(ΩD t_max). +∞ when D = 0.
inline double halo_radius(double t_max, const SimParams& params) {
    params.validate();
    if (!(t_max > 0.0)) throw std::invalid_argument("halo_radius: t_max must be > 0");
    if (params.D == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 / std::sqrt(params.omega * params.D * t_max);
}

/// √2 cos(P/√(ħMΩ))|0⟩: coherent branches at Q = ±√(ħ/MΩ), Δ² = 2.
inline CatSpec fig1_cat(const SimParams& params) {
    const double ell = params.length_scale();
    return CatSpec{1.0, 1.0, {ell, 0.0}, {-ell, 0.0}};
}

struct FockDemo {
    NumericDM initial;
    NumericDM final_state;
    double t{0.0};
    double retention{1.0};         // normalized overlap of energy-basis off-diagonal parts
    double amplitude_ratio{1.0};   // |ρ01(t)| / |ρ01(0)|
};

/// Cosine similarity of the off-diagonal parts of two states in the oscillator eigenbasis.
inline double coherence_retention(const NumericDM& before, const NumericDM& after, const SimParams& params,
                                  std::size_t levels = 12) {
    Eigen::MatrixXcd r0 = oracle::energy_representation(before, levels, params);
    Eigen::MatrixXcd r1 = oracle::energy_representation(after, levels, params);
    r0.diagonal().setZero();
    r1.diagonal().setZero();
    const double n0 = r0.norm();
    const double n1 = r1.norm();
    if (!(n0 > 0.0)) throw std::domain_error("coherence_retention: initial state has no coherences");
    if (!(n1 > 0.0)) return 0.0;
    return std::abs((r0.adjoint() * r1).trace()) / (n0 * n1);
}

/// (|0⟩ + |1⟩)/√2 evolved to t = 2nπ/Ω by brute-force quadrature.
inline FockDemo halo_demo_fock(int n, double D, const SimParams& params, const GridSpec& grid) {
    if (n < 0) throw std::invalid_argument("halo_demo_fock: n must be >= 0");
    SimParams p = params;
    p.D = D;
    p.validate();
    FockDemo out;
    out.t = 2.0 * kPi * n / p.omega;
    out.initial = oracle::fock_superposition_dm(grid, p);
    out.final_state = n == 0 ? out.initial : oracle::propagate_numeric_composed(out.initial, out.t, p);
    out.retention = coherence_retention(out.initial, out.final_state, p);
    const auto e0 = oracle::energy_representation(out.initial, 2, p);
    const auto e1 = oracle::energy_representation(out.final_state, 2, p);
    out.amplitude_ratio = std::abs(e1(0, 1)) / std::abs(e0(0, 1));
    return out;
}

}  // namespace qhalo
