#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "qhalo/cat.hpp"
#include "qhalo/gaussian.hpp"
#include "qhalo/oracle.hpp"
#include "qhalo/parallel.hpp"
#include "qhalo/propagator.hpp"

namespace qhalo::oracle {

struct MatrixOptions {
    SimParams base{};                 // omega, mass, hbar; D is taken from `dissipation`
    std::vector<Complex> states{{1.0, 0.0}, {2.0, 0.5}, {0.5, -0.5}};
    std::vector<double> phases{0.5, 1.0, 2.5};  // Ωt
    std::vector<double> dissipation{0.0, 0.01, 0.1};
    double half_width{11.0};          // in units of √(ħ/MΩ)
    std::size_t points{192};
    double tolerance{1e-4};           // grid-norm distance
    double trace_tolerance{1e-5};
    bool include_cat{true};           // Δ² = 2 cat at Ωt = 2π per D value
    std::size_t jobs{1};
};

struct MatrixCase {
    std::string label;
    Complex C{};
    double phase{0.0};
    double D{0.0};
    double distance{0.0};
    double trace_error{0.0};
    bool pass{false};
    bool numerical_failure{false};
    std::string error;
};

struct MatrixReport {
    std::vector<MatrixCase> cases;
    bool all_pass() const {
        for (const auto& c : cases)
            if (!c.pass) return false;
        return !cases.empty();
    }
    bool any_numerical_failure() const {
        for (const auto& c : cases)
            if (c.numerical_failure) return true;
        return false;
    }
};

/// Closed form against brute-force quadrature over states × times × D, plus a cat row per D.
inline MatrixReport run_matrix(const MatrixOptions& opt) {
    opt.base.validate();
    struct Job {
        bool cat;
        Complex C;
        double phase;
        double D;
    };
    std::vector<Job> jobs;
    for (Complex C : opt.states)
        for (double ph : opt.phases)
            for (double D : opt.dissipation) jobs.push_back({false, C, ph, D});
    if (opt.include_cat)
        for (double D : opt.dissipation) jobs.push_back({true, {}, 2.0 * kPi, D});

    MatrixReport rep;
    rep.cases.resize(jobs.size());
    parallel_for(jobs.size(), opt.jobs, [&](std::size_t i) {
        const Job& job = jobs[i];
        SimParams p = opt.base;
        p.D = job.D;
        const GridSpec grid{0.0, opt.half_width * p.length_scale(), opt.points};
        const double t = job.phase / p.omega;
        MatrixCase& out = rep.cases[i];
        out.C = job.C;
        out.phase = job.phase;
        out.D = job.D;
        std::ostringstream label;
        if (job.cat) label << "cat Δ²=2";
        else label << "C=" << job.C.real() << (job.C.imag() < 0 ? "" : "+") << job.C.imag() << "i";
        label << " Ωt=" << job.phase << " D=" << job.D;
        out.label = label.str();
        try {
            NumericDM closed;
            NumericDM numeric;
            if (job.cat) {
                const CatSpec cat = fig1_cat(p);
                closed = position_dm_grid(cat_dm_stroboscopic(cat, 1, p), grid, p);
                numeric = propagate_numeric_composed(position_dm_grid(cat_dm_initial(cat, p), grid, p), t, p);
            } else {
                const SqueezeParam sq(job.C);
                closed = position_dm_grid(evolve_squeezed(sq, t, p), grid, p);
                numeric = propagate_numeric(position_dm_grid(make_squeezed(sq, p), grid, p), t, p);
            }
            out.distance = grid_distance(closed, numeric);
            out.trace_error = std::abs(numeric.trace() - 1.0);
            out.pass = out.distance < opt.tolerance && out.trace_error < opt.trace_tolerance;
        } catch (const NumericalError& e) {
            out.numerical_failure = true;
            out.error = e.what();
        } catch (const std::domain_error& e) {
            out.numerical_failure = true;
            out.error = e.what();
        }
    });
    return rep;
}

}  // namespace qhalo::oracle
