#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qhalo {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Thrown when a quadrature or grid computation cannot reach the accuracy it promises.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Single field mode in the ultraweak-coupling, high-temperature Ohmic limit.
///
/// All library entry points take physical coordinates (Q, P, t). Internally
/// everything is reduced to the dimensionless variables Q·√(MΩ/ħ), P/√(ħMΩ)
/// and Ωt, so SI-style inputs work as well as the default ħ = M = 1 units.
struct SimParams {
    double omega{1.0};  // mode angular frequency Ω
    double mass{1.0};   // M
    double hbar{1.0};   // ħ
    double D{0.0};      // dimensionless decoherence strength 8γk_BT/(ħΩ²)

    void validate() const {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw std::invalid_argument("SimParams: omega must be positive, got " + std::to_string(omega));
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw std::invalid_argument("SimParams: mass must be positive, got " + std::to_string(mass));
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw std::invalid_argument("SimParams: hbar must be positive, got " + std::to_string(hbar));
        if (!(D >= 0.0) || !std::isfinite(D))
            throw std::invalid_argument("SimParams: D must be non-negative, got " + std::to_string(D));
    }

    /// Ground-state length √(ħ/MΩ).
    double length_scale() const { return std::sqrt(hbar / (mass * omega)); }
    /// Ground-state momentum √(ħMΩ).
    double momentum_scale() const { return std::sqrt(hbar * mass * omega); }
    double phase(double t) const { return omega * t; }
};

/// Complex squeezing parameter C of ψ(Q) ∝ exp(−(MΩ/2ħ) C Q²). Re C > 0.
struct SqueezeParam {
    Complex C{1.0, 0.0};

    SqueezeParam() = default;
    SqueezeParam(Complex c) : C(c) { validate(); }  // NOLINT(google-explicit-constructor)
    SqueezeParam(double re, double im = 0.0) : SqueezeParam(Complex(re, im)) {}  // NOLINT

    void validate() const {
        if (!(C.real() > 0.0) || !std::isfinite(C.real()) || !std::isfinite(C.imag()))
            throw std::invalid_argument("SqueezeParam: Re C must be positive (normalizable state)");
    }
};

/// Phase-space offset (x, p) in physical units.
struct PhaseSpacePoint {
    double x{0.0};
    double p{0.0};

    friend PhaseSpacePoint operator+(PhaseSpacePoint a, PhaseSpacePoint b) { return {a.x + b.x, a.p + b.p}; }
    friend PhaseSpacePoint operator-(PhaseSpacePoint a, PhaseSpacePoint b) { return {a.x - b.x, a.p - b.p}; }
    friend bool operator==(const PhaseSpacePoint&, const PhaseSpacePoint&) = default;
};

/// Classical harmonic trajectory of a phase-space point after time t.
inline PhaseSpacePoint classical_evolve(PhaseSpacePoint d, double t, const SimParams& params) {
    const double tau = params.phase(t);
    const double mw = params.mass * params.omega;
    const double c = std::cos(tau);
    const double s = std::sin(tau);
    return {d.x * c + (d.p / mw) * s, d.p * c - mw * d.x * s};
}

namespace detail {

/// x − sin x without cancellation for small x.
inline double x_minus_sin(double x) {
    if (std::abs(x) < 0.25) {
        const double x2 = x * x;
        // x³/3! − x⁵/5! + x⁷/7! − x⁹/9! + x¹¹/11!
        return x * x2 * (1.0 / 6 - x2 * (1.0 / 120 - x2 * (1.0 / 5040 - x2 * (1.0 / 362880 - x2 / 39916800.0))));
    }
    return x - std::sin(x);
}

/// τ − sinτ cosτ = (2τ − sin 2τ)/2.
inline double tau_minus_sc(double tau) { return 0.5 * x_minus_sin(2.0 * tau); }

/// τ² − sin²τ, non-negative for all τ.
inline double tau2_minus_s2(double tau) {
    const double s = std::sin(tau);
    return std::max(0.0, x_minus_sin(tau) * (tau + s));
}

}  // namespace detail
}  // namespace qhalo
