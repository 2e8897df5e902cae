#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "qhalo/gaussian.hpp"
#include "qhalo/kernel.hpp"
#include "qhalo/params.hpp"

namespace qhalo {

/// α(t), β(t), λ(t) of the closed-form evolution of a squeezed initial state.
struct SqueezedEvolution {
    double alpha{1.0};
    double beta{1.0};
    double lambda{0.0};
};

inline SqueezedEvolution squeezed_functions(Complex C, double tau, double D) {
    const double s = std::sin(tau);
    const double co = std::cos(tau);
    const double re = C.real();
    const double im = C.imag();
    const double mod2 = std::norm(C);
    const double a_minus = detail::tau_minus_sc(tau);  // τ − sc
    const double a_plus = tau + s * co;                // τ + sc
    const double w = im * s - co;
    SqueezedEvolution f;
    f.alpha = 1.0 / (re * re * s * s + D * re * a_minus + w * w);
    f.beta = re * (1.0 + D * D * detail::tau2_minus_s2(tau)) + D * mod2 * a_minus + D * a_plus - 2.0 * D * im * s * s;
    f.lambda = (mod2 - 1.0) * s * co - im * std::cos(2.0 * tau) + D * re * s * s;
    return f;
}

inline void require_nonnegative_time(double t, const char* where) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(where) + ": t must be >= 0");
}

/// Closed-form state at time t from ψ(Q) ∝ exp(−(MΩ/2ħ)·C·Q²).
inline GaussianDM evolve_squeezed(const SqueezeParam& sq, double t, const SimParams& params) {
    params.validate();
    sq.validate();
    require_nonnegative_time(t, "evolve_squeezed");
    const auto f = squeezed_functions(sq.C, params.phase(t), params.D);
    return GaussianDM{f.alpha * sq.C.real(), f.alpha * f.beta, f.alpha * f.lambda, 0.0, 0.0};
}

/// b/a − 1 of evolve_squeezed(C, t), computed without the cancellation in β − Re C.
inline double squeezed_mixing_excess(Complex C, double t, const SimParams& params) {
    const double tau = params.phase(t);
    const double D = params.D;
    const double s = std::sin(tau);
    const double num = C.real() * D * D * detail::tau2_minus_s2(tau) + D * std::norm(C) * detail::tau_minus_sc(tau) +
                       D * (tau + s * std::cos(tau)) - 2.0 * D * C.imag() * s * s;
    return num / C.real();
}

/// Coherent state started at (x, p): classical center, squeezed-state shape with C = 1.
inline GaussianDM evolve_coherent(double x, double p, double t, const SimParams& params) {
    GaussianDM dm = evolve_squeezed(SqueezeParam(1.0), t, params);
    const auto c = classical_evolve({x, p}, t, params);
    dm.center_x = c.x;
    dm.center_p = c.p;
    return dm;
}

/// Entropy-minimizing squeezing σ(t) for final time t (t > 0).
inline Complex optimal_squeezing(double t, const SimParams& params) {
    const double tau = params.phase(t);
    if (!(tau > 0.0)) throw std::invalid_argument("optimal_squeezing: t must be > 0");
    const double den = detail::x_minus_sin(2.0 * tau);  // 2τ − sin 2τ
    const double s = std::sin(tau);
    const double mod2 = (2.0 * tau + std::sin(2.0 * tau)) / den;
    const double im = 2.0 * s * s / den;
    return {std::sqrt(std::max(0.0, mod2 - im * im)), im};
}

/// Λ(t) = 1 + D√((Ωt)² − sin²Ωt).
inline double special_lambda(double t, const SimParams& params) {
    return 1.0 + params.D * std::sqrt(detail::tau2_minus_s2(params.phase(t)));
}

struct EvolvedSpecial {
    double t{0.0};
    double Lambda{1.0};
    Complex sigma{1.0, 0.0};
    GaussianDM dm;
    /// Phase coefficient (Re σ/Λ)(D sin²Ωt + Im σ) as printed in the closed form for
    /// this family; exact propagation gives dm.c = Im σ instead.
    double rhot_phase{0.0};
};

/// State at t that evolved from ψ ∝ exp(−(MΩ/2ħ)σ(t)Q²); a = Re σ/Λ, b = Re σ·Λ.
inline EvolvedSpecial evolve_special(double t, const SimParams& params) {
    params.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("evolve_special: t must be > 0");
    EvolvedSpecial out;
    out.t = t;
    out.sigma = optimal_squeezing(t, params);
    out.Lambda = special_lambda(t, params);
    const double re = out.sigma.real();
    const double s = std::sin(params.phase(t));
    out.rhot_phase = re * (params.D * s * s + out.sigma.imag()) / out.Lambda;
    out.dm = GaussianDM{re / out.Lambda, re * out.Lambda, evolve_squeezed(SqueezeParam(out.sigma), t, params).c, 0.0, 0.0};
    return out;
}

namespace detail {

inline GaussianKernel evolve_kernel_regular(const GaussianKernel& k, double tau, double D) {
    const double s = std::sin(tau);
    const double co = std::cos(tau);
    const double d = D * tau_minus_sc(tau) / (4.0 * s * s);
    const double e = D * (tau * co - s) / (2.0 * s * s);
    const Complex ic2s(0.0, co / (2.0 * s));
    const Complex i2s(0.0, 1.0 / (2.0 * s));

    // exponent of the propagator: −wᵀPw − 2wᵀRz − zᵀSz, w = initial, z = final
    Eigen::Matrix2cd P;
    P << -ic2s + d, -d, -d, ic2s + d;
    const Eigen::Matrix2cd S = P;
    Eigen::Matrix2cd R;
    R << i2s - 0.5 * e, 0.5 * e, 0.5 * e, -i2s - 0.5 * e;

    const Eigen::Matrix2cd G = k.A + P;
    const Eigen::Matrix2cd Gi = G.inverse();
    GaussianKernel out;
    out.A = S - R.transpose() * Gi * R;
    out.A(1, 0) = out.A(0, 1) = 0.5 * (out.A(0, 1) + out.A(1, 0));
    out.l = -(R.transpose() * (Gi * k.l));
    out.n0 = k.n0 + (k.l.transpose() * Gi * k.l)(0, 0) / 4.0 + std::log(kPi) - std::log(sqrt_det_right_half(G)) -
             std::log(2.0 * kPi * std::abs(s));
    return out;
}

inline GaussianKernel evolve_kernel_scaled(const GaussianKernel& k, double tau, double D) {
    if (tau == 0.0) return k;
    if (std::abs(std::sin(tau)) < 0.1) {
        // The one-shot kernel is singular at sin τ = 0; compose two regular legs.
        if (tau < kPi / 2) return evolve_kernel_regular(k, tau, D);
        return evolve_kernel_regular(evolve_kernel_regular(k, tau - kPi / 2, D), kPi / 2, D);
    }
    return evolve_kernel_regular(k, tau, D);
}

}  // namespace detail

/// Exact Gaussian integration of a kernel against the single-mode propagator.
inline GaussianKernel evolve_kernel(const GaussianKernel& k, double t, const SimParams& params) {
    params.validate();
    require_nonnegative_time(t, "evolve_kernel");
    if (!k.integrable()) throw std::invalid_argument("evolve_kernel: kernel is not integrable");
    return detail::evolve_kernel_scaled(k, params.phase(t), params.D);
}

/// Any Gaussian density matrix, mixed or displaced, evolved through its kernel.
inline GaussianDM evolve(const GaussianDM& dm, double t, const SimParams& params) {
    dm.validate();
    return GaussianDM::from_kernel(evolve_kernel(dm.to_kernel(params), t, params), params);
}

}  // namespace qhalo
