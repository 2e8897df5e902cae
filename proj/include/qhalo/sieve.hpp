#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qhalo/gaussian.hpp"
#include "qhalo/nelder_mead.hpp"
#include "qhalo/parallel.hpp"
#include "qhalo/params.hpp"
#include "qhalo/propagator.hpp"

namespace qhalo {

/// Von Neumann entropy at time t of the state evolved from the pure squeezed state C.
inline double entropy_of_initial(const SqueezeParam& sq, double t, const SimParams& params) {
    params.validate();
    sq.validate();
    require_nonnegative_time(t, "entropy_of_initial");
    // √(b/a) − 1 = excess/(√(1+excess) + 1)
    const double excess = squeezed_mixing_excess(sq.C, t, params);
    return entropy_from_occupation(0.5 * excess / (std::sqrt(1.0 + excess) + 1.0));
}

/// Same objective evaluated through general kernel propagation of the translated initial state.
inline double entropy_of_translated_initial(const SqueezeParam& sq, PhaseSpacePoint offset, double t,
                                            const SimParams& params) {
    return von_neumann_entropy(evolve(translate(make_squeezed(sq, params), offset), t, params));
}

struct SieveResult {
    double t{0.0};
    Complex C_star{1.0, 0.0};
    double S_min{0.0};
    std::size_t iterations{0};
    bool converged{false};
};

struct SieveOptions {
    double tol{1e-8};  // simplex diameter in (ln Re C, Im C); rounding in S stalls the simplex near 1e-9
    std::size_t max_iterations{5000};
    PhaseSpacePoint offset{};  // phase-space translation applied to every trial state
};

/// Derivative-free minimization of the entropy at time t over the initial squeezing C,
/// parameterized by (ln Re C, Im C) and started from the coherent state C = 1.
inline SieveResult sieve_minimize(double t, const SimParams& params, const SieveOptions& opt = {}) {
    params.validate();
    if (!(t > 0.0)) throw std::invalid_argument("sieve_minimize: t must be > 0");
    if (!(params.D > 0.0)) throw std::invalid_argument("sieve_minimize: D must be > 0 (objective is flat at D = 0)");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("sieve_minimize: tol must be > 0");

    const bool translated = opt.offset.x != 0.0 || opt.offset.p != 0.0;
    auto objective = [&](const optim::Point<2>& v) {
        if (!std::isfinite(v[0]) || v[0] > 50.0 || v[0] < -50.0) return std::numeric_limits<double>::infinity();
        const SqueezeParam sq(Complex(std::exp(v[0]), v[1]));
        return translated ? entropy_of_translated_initial(sq, opt.offset, t, params) : entropy_of_initial(sq, t, params);
    };
    optim::NelderMeadOptions nm;
    nm.x_tol = opt.tol;
    nm.f_tol = opt.tol * opt.tol;
    nm.max_iterations = opt.max_iterations;
    nm.initial_step = 0.25;
    const auto r = optim::nelder_mead<2>(objective, {0.0, 0.0}, nm);

    SieveResult out;
    out.t = t;
    out.C_star = Complex(std::exp(r.x[0]), r.x[1]);
    out.S_min = r.f;
    out.iterations = r.iterations;
    out.converged = r.converged;
    return out;
}

/// Time-averaged sieve: minimizes the mean entropy over `samples` uniform times in (0, t_max].
/// An extension for the "few dynamical times" view, not a closed-form result.
inline SieveResult sieve_minimize_time_averaged(double t_max, std::size_t samples, const SimParams& params,
                                                const SieveOptions& opt = {}) {
    params.validate();
    if (!(t_max > 0.0) || samples == 0) throw std::invalid_argument("sieve_minimize_time_averaged: bad window");
    auto objective = [&](const optim::Point<2>& v) {
        if (!std::isfinite(v[0]) || std::abs(v[0]) > 50.0) return std::numeric_limits<double>::infinity();
        const SqueezeParam sq(Complex(std::exp(v[0]), v[1]));
        double acc = 0.0;
        for (std::size_t k = 1; k <= samples; ++k)
            acc += entropy_of_initial(sq, t_max * static_cast<double>(k) / static_cast<double>(samples), params);
        return acc / static_cast<double>(samples);
    };
    optim::NelderMeadOptions nm;
    nm.x_tol = opt.tol;
    nm.f_tol = opt.tol * opt.tol;
    nm.max_iterations = opt.max_iterations;
    const auto r = optim::nelder_mead<2>(objective, {0.0, 0.0}, nm);
    return SieveResult{t_max, Complex(std::exp(r.x[0]), r.x[1]), r.f, r.iterations, r.converged};
}

/// Closed-form entropy of an initially coherent state after n half periods (t = nπ/Ω).
inline double coherent_entropy(int n, double D) {
    if (n < 1) throw std::invalid_argument("coherent_entropy: n must be >= 1");
    if (!(D >= 0.0)) throw std::invalid_argument("coherent_entropy: D must be >= 0");
    return entropy_from_occupation(0.5 * n * kPi * D);
}

struct SuperselectionCheck {
    double margin{0.0};  // DΩt
    bool valid{true};
};

/// Environment-induced superselection is meaningful only while DΩt stays well below 1.
inline SuperselectionCheck superselection_valid(double D, double t, const SimParams& params, double threshold = 0.1) {
    const double m = D * params.omega * t;
    return {m, m < threshold};
}

struct ScanRange {
    double lo{0.0};
    double hi{1.0};
    std::size_t points{41};

    double at(std::size_t i) const {
        return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
};

struct EntropySurface {
    ScanRange re_range;
    ScanRange im_range;
    Eigen::MatrixXd S;  // S(i, j) at C = re(i) + i·im(j)
    std::size_t argmin_re{0};
    std::size_t argmin_im{0};

    Complex argmin() const { return {re_range.at(argmin_re), im_range.at(argmin_im)}; }
};

inline EntropySurface sieve_scan(double t, const SimParams& params, const ScanRange& re, const ScanRange& im,
                                 std::size_t jobs = 1) {
    params.validate();
    if (!(re.lo > 0.0) || !(re.hi > 0.0)) throw std::invalid_argument("sieve_scan: Re C range must be positive");
    if (re.points == 0 || im.points == 0) throw std::invalid_argument("sieve_scan: empty range");
    EntropySurface out{re, im, Eigen::MatrixXd(re.points, im.points)};
    parallel_for(re.points, jobs, [&](std::size_t i) {
        for (std::size_t j = 0; j < im.points; ++j)
            out.S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                entropy_of_initial(SqueezeParam(Complex(re.at(i), im.at(j))), t, params);
    });
    Eigen::Index bi = 0, bj = 0;
    out.S.minCoeff(&bi, &bj);
    out.argmin_re = static_cast<std::size_t>(bi);
    out.argmin_im = static_cast<std::size_t>(bj);
    return out;
}

}  // namespace qhalo
