#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

namespace qhalo::optim {

template <std::size_t N>
using Point = std::array<double, N>;

struct NelderMeadOptions {
    double x_tol{1e-10};      // simplex diameter
    double f_tol{1e-20};      // spread of objective values across vertices
    std::size_t max_iterations{5000};
    double initial_step{0.25};
};

template <std::size_t N>
struct NelderMeadResult {
    Point<N> x{};
    double f{std::numeric_limits<double>::infinity()};
    std::size_t iterations{0};
    bool converged{false};
};

namespace detail {

template <std::size_t N>
Point<N> affine(const Point<N>& base, const Point<N>& toward, double t) {
    Point<N> out;
    for (std::size_t j = 0; j < N; ++j) out[j] = base[j] + t * (toward[j] - base[j]);
    return out;
}

template <std::size_t N>
double diameter(const std::array<Point<N>, N + 1>& s) {
    double d = 0.0;
    for (std::size_t i = 1; i <= N; ++i)
        for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(s[i][j] - s[0][j]));
    return d;
}

}  // namespace detail

/// Standard Nelder-Mead (reflect 1, expand 2, contract ½, shrink ½) on an axis-aligned start simplex.
template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead(F&& f, const Point<N>& start, const NelderMeadOptions& opt = {}) {
    std::array<Point<N>, N + 1> simplex;
    std::array<double, N + 1> fv;
    simplex[0] = start;
    for (std::size_t i = 1; i <= N; ++i) {
        simplex[i] = start;
        simplex[i][i - 1] += opt.initial_step;
    }
    for (std::size_t i = 0; i <= N; ++i) fv[i] = f(simplex[i]);

    NelderMeadResult<N> res;
    std::array<std::size_t, N + 1> order;
    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        for (std::size_t i = 0; i <= N; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        {
            auto s2 = simplex;
            auto f2 = fv;
            for (std::size_t i = 0; i <= N; ++i) {
                simplex[i] = s2[order[i]];
                fv[i] = f2[order[i]];
            }
        }
        if (detail::diameter<N>(simplex) < opt.x_tol && fv[N] - fv[0] <= opt.f_tol) {
            res.converged = true;
            break;
        }

        Point<N> centroid{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) centroid[j] += simplex[i][j] / static_cast<double>(N);

        const Point<N> xr = detail::affine<N>(centroid, simplex[N], -1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            const Point<N> xe = detail::affine<N>(centroid, simplex[N], -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[N] = xe;
                fv[N] = fe;
            } else {
                simplex[N] = xr;
                fv[N] = fr;
            }
            continue;
        }
        if (fr < fv[N - 1]) {
            simplex[N] = xr;
            fv[N] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst vertex
        const bool outside = fr < fv[N];
        const Point<N> xc = outside ? detail::affine<N>(centroid, xr, 0.5) : detail::affine<N>(centroid, simplex[N], 0.5);
        const double fc = f(xc);
        if (fc < (outside ? fr : fv[N])) {
            simplex[N] = xc;
            fv[N] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= N; ++i) {
            simplex[i] = detail::affine<N>(simplex[0], simplex[i], 0.5);
            fv[i] = f(simplex[i]);
        }
    }
    const auto best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    res.x = simplex[static_cast<std::size_t>(best)];
    res.f = fv[static_cast<std::size_t>(best)];
    return res;
}

}  // namespace qhalo::optim
