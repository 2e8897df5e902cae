#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qhalo/grid.hpp"
#include "qhalo/params.hpp"

// Brute-force references. Nothing here uses the closed-form Gaussian machinery:
// propagation is direct trapezoidal double quadrature of the single-mode propagator,
// spectra come from dense diagonalization of the sampled kernel.

namespace qhalo::oracle {

namespace detail {

inline double max_edge_magnitude(const Eigen::MatrixXcd& rho) {
    const auto n = rho.rows();
    double m = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        m = std::max({m, std::abs(rho(0, i)), std::abs(rho(n - 1, i)), std::abs(rho(i, 0)), std::abs(rho(i, n - 1))});
    }
    return m;
}

}  // namespace detail

struct PropagationOptions {
    double edge_tolerance{1e-12};   // |ρ| at the grid boundary relative to max |ρ|
    double trace_tolerance{1e-5};
    double min_abs_sin{1e-3};       // closer to sin Ωt = 0 counts as singular
};

/// Direct double quadrature of the weak-coupling, high-temperature propagator over
/// (A_i, A_i'), output on the input grid. Cost O(N⁴).
inline NumericDM propagate_numeric(const NumericDM& initial, double t, const SimParams& params,
                                   const PropagationOptions& opt = {}) {
    params.validate();
    initial.grid.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("propagate_numeric: t must be >= 0");
    if (t == 0.0) return initial;
    const double tau = params.phase(t);
    const double s = std::sin(tau);
    const double co = std::cos(tau);
    if (std::abs(s) < opt.min_abs_sin)
        throw std::domain_error("propagate_numeric: sin(Ωt) ≈ 0 is singular for the one-shot kernel; "
                                "use propagate_numeric_composed");

    const double peak = initial.rho.cwiseAbs().maxCoeff();
    const double edge = detail::max_edge_magnitude(initial.rho);
    if (edge > opt.edge_tolerance * peak) {
        std::ostringstream msg;
        msg << "propagate_numeric: initial state not resolved, edge/peak = " << edge / peak;
        throw NumericalError(msg.str());
    }

    const double ell = params.length_scale();
    const auto N = static_cast<Eigen::Index>(initial.grid.points);
    const double h = initial.grid.step() / ell;
    std::vector<double> x(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = initial.grid.at(static_cast<std::size_t>(i)) / ell;
    const double xmax = std::max(std::abs(x.front()), std::abs(x.back()));
    if (h * xmax / std::abs(s) > kPi) {
        std::ostringstream msg;
        msg << "propagate_numeric: grid step " << h << " under-resolves the propagator phase (need h·|x|max/|sin Ωt| < π, have "
            << h * xmax / std::abs(s) << ")";
        throw NumericalError(msg.str());
    }

    const double D = params.D;
    const double d = D * (tau - s * co) / (4.0 * s * s);
    const double e = D * (tau * co - s) / (2.0 * s * s);

    Eigen::MatrixXcd F(N, N);
    for (Eigen::Index k = 0; k < N; ++k)
        for (Eigen::Index i = 0; i < N; ++i) {
            const double xk = x[static_cast<std::size_t>(k)];
            const double xi = x[static_cast<std::size_t>(i)];
            F(k, i) = std::polar(1.0, (co * xk * xk + co * xi * xi - 2.0 * xk * xi) / (2.0 * s));
        }
    const Eigen::MatrixXcd rho_scaled = initial.rho * ell;
    const double pref = h * h / (2.0 * kPi * std::abs(s));

    NumericDM out{initial.grid, Eigen::MatrixXcd::Zero(N, N)};
    Eigen::MatrixXcd W(N, N);
    for (Eigen::Index m = 0; m < N; ++m) {
        const double delta = static_cast<double>(m) * h;
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = 0; j < N; ++j) {
                const double di = static_cast<double>(i - j) * h;
                W(i, j) = rho_scaled(i, j) * std::exp(-d * (di * di + delta * delta) + e * delta * di);
            }
        const Eigen::MatrixXcd T = F.bottomRows(N - m) * W;
        for (Eigen::Index k = m; k < N; ++k) {
            const Complex v = pref * T.row(k - m).dot(F.row(k - m).transpose()) ;
            out.rho(k, k - m) = v;
        }
    }
    // T.row(r).dot(u) conjugates T; undo that and mirror the lower triangle.
    for (Eigen::Index m = 0; m < N; ++m)
        for (Eigen::Index k = m; k < N; ++k) {
            out.rho(k, k - m) = std::conj(out.rho(k, k - m)) / ell;
            if (m > 0) out.rho(k - m, k) = std::conj(out.rho(k, k - m));
        }
    for (Eigen::Index k = 0; k < N; ++k) out.rho(k, k) = Complex(out.rho(k, k).real(), 0.0);

    const double trace_err = std::abs(out.trace() - initial.trace());
    if (trace_err > opt.trace_tolerance) {
        std::ostringstream msg;
        msg << "propagate_numeric: trace not preserved (|ΔTr| = " << trace_err << "); grid under-resolved";
        throw NumericalError(msg.str());
    }
    return out;
}

/// Propagation to any t ≥ 0, splitting off a quarter period when sin Ωt ≈ 0.
inline NumericDM propagate_numeric_composed(const NumericDM& initial, double t, const SimParams& params,
                                            const PropagationOptions& opt = {}) {
    const double tau = params.phase(t);
    if (std::abs(std::sin(tau)) >= 0.1 || tau == 0.0) return propagate_numeric(initial, t, params, opt);
    if (tau < kPi / 2) return propagate_numeric(initial, t, params, opt);
    const double quarter = kPi / (2.0 * params.omega);
    return propagate_numeric(propagate_numeric(initial, t - quarter, params, opt), quarter, params, opt);
}

struct GridSpectrum {
    std::vector<double> eigenvalues;  // descending, after clipping
    double entropy{0.0};
    double min_eigenvalue{0.0};       // before clipping
    std::size_t clipped{0};           // eigenvalues in (−1e-6, −1e-10] set to zero
};

/// Entropy and spectrum from dense diagonalization of the weighted kernel ρ(Q_i, Q_j)·h.
inline GridSpectrum grid_entropy(const NumericDM& dm, double negative_error = 1e-6, double clip_report = 1e-10) {
    const Eigen::MatrixXcd H = 0.5 * (dm.rho + dm.rho.adjoint()) * dm.grid.step();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("grid_entropy: eigensolver failed");
    GridSpectrum out;
    const auto& ev = es.eigenvalues();
    out.min_eigenvalue = ev.minCoeff();
    if (out.min_eigenvalue < -negative_error) {
        std::ostringstream msg;
        msg << "grid_entropy: eigenvalue " << out.min_eigenvalue << " is significantly negative; grid under-resolved";
        throw NumericalError(msg.str());
    }
    out.eigenvalues.reserve(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
        double lam = ev(i);
        if (lam <= -clip_report) ++out.clipped;
        if (lam < 0.0) lam = 0.0;
        out.eigenvalues.push_back(lam);
        if (lam > 0.0) out.entropy -= lam * std::log(lam);
    }
    return out;
}

/// Oscillator eigenfunctions φ_0..φ_{count−1} sampled on the grid (physical normalization).
inline Eigen::MatrixXd hermite_functions(const GridSpec& grid, std::size_t count, const SimParams& params) {
    const double ell = params.length_scale();
    const auto N = static_cast<Eigen::Index>(grid.points);
    Eigen::MatrixXd phi(N, static_cast<Eigen::Index>(count));
    for (Eigen::Index i = 0; i < N; ++i) {
        const double x = grid.at(static_cast<std::size_t>(i)) / ell;
        double prev = 0.0;
        double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
        for (std::size_t n = 0; n < count; ++n) {
            phi(i, static_cast<Eigen::Index>(n)) = cur / std::sqrt(ell);
            const double next = std::sqrt(2.0 / static_cast<double>(n + 1)) * x * cur -
                                std::sqrt(static_cast<double>(n) / static_cast<double>(n + 1)) * prev;
            prev = cur;
            cur = next;
        }
    }
    return phi;
}

/// ⟨n|ρ|m⟩ for n, m < count.
inline Eigen::MatrixXcd energy_representation(const NumericDM& dm, std::size_t count, const SimParams& params) {
    const Eigen::MatrixXd phi = hermite_functions(dm.grid, count, params);
    const double h = dm.grid.step();
    return phi.transpose().cast<Complex>() * dm.rho * phi.cast<Complex>() * (h * h);
}

/// (|0⟩ + |1⟩)/√2 sampled on the grid.
inline NumericDM fock_superposition_dm(const GridSpec& grid, const SimParams& params) {
    grid.validate();
    params.validate();
    const Eigen::MatrixXd phi = hermite_functions(grid, 2, params);
    const Eigen::VectorXd psi = (phi.col(0) + phi.col(1)) / std::sqrt(2.0);
    NumericDM out{grid, (psi * psi.transpose()).cast<Complex>()};
    return out;
}

/// Lorentz-oscillator dielectric function K(ω) = 1 + ω_p²/(ω₀² − ω² − iγω).
struct LorentzModel {
    double wp2{1.0};
    double w0{1.0};
    double width{0.1};

    void validate() const {
        if (!(wp2 > 0.0) || !(w0 > 0.0) || !(width > 0.0))
            throw std::invalid_argument("LorentzModel: parameters must be positive");
    }
    Complex K(double w) const { return 1.0 + wp2 / Complex(w0 * w0 - w * w, -width * w); }
    double im(double w) const { return K(w).imag(); }
    double re(double w) const { return K(w).real(); }
};

struct DielectricTable {
    std::vector<double> omega;
    std::vector<double> im_K;
    std::vector<double> re_K;
};

/// Analytic Lorentz pair (Im K, Re K) tabulated on the given frequencies.
inline DielectricTable lorentz_KK_oracle(double wp2, double w0, double width, const std::vector<double>& omegas) {
    const LorentzModel model{wp2, w0, width};
    model.validate();
    DielectricTable t;
    t.omega = omegas;
    for (double w : omegas) {
        t.im_K.push_back(model.im(w));
        t.re_K.push_back(model.re(w));
    }
    return t;
}

}  // namespace qhalo::oracle
