#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qhalo/params.hpp"

namespace qhalo {

/// Uniform 1-D sampling grid [center − half_width, center + half_width], endpoints included.
struct GridSpec {
    double center{0.0};
    double half_width{8.0};
    std::size_t points{256};

    static constexpr std::size_t kMinPoints = 64;

    void validate() const {
        if (!(half_width > 0.0) || !std::isfinite(half_width) || !std::isfinite(center))
            throw std::invalid_argument("GridSpec: half_width must be positive and finite");
        if (points < kMinPoints)
            throw std::invalid_argument("GridSpec: at least 64 points required");
    }

    double step() const { return 2.0 * half_width / static_cast<double>(points - 1); }
    double at(std::size_t i) const { return center - half_width + step() * static_cast<double>(i); }

    std::vector<double> nodes() const {
        std::vector<double> out(points);
        for (std::size_t i = 0; i < points; ++i) out[i] = at(i);
        return out;
    }
};

/// Density matrix sampled on a position grid, ρ(Q_i, Q_j), in physical units.
struct NumericDM {
    GridSpec grid;
    Eigen::MatrixXcd rho;

    /// Σ_i ρ(Q_i, Q_i)·h.
    Complex trace() const { return rho.diagonal().sum() * grid.step(); }

    /// Σ_ij |ρ_ij|² h², the Hilbert-Schmidt Tr ρ².
    double purity() const {
        const double h = grid.step();
        return rho.squaredNorm() * h * h;
    }

    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
};

/// Hilbert-Schmidt distance sqrt(Σ|Δρ|² h²) between two density matrices on the same grid.
inline double grid_distance(const NumericDM& a, const NumericDM& b) {
    if (a.grid.points != b.grid.points || a.rho.rows() != b.rho.rows())
        throw std::invalid_argument("grid_distance: grids differ");
    const double h = a.grid.step();
    return (a.rho - b.rho).norm() * h;
}

/// Two-axis grid for Wigner functions.
struct PhaseGrid {
    GridSpec x;
    GridSpec p;
};

/// Real field sampled on a PhaseGrid; values(i, j) is W(x_i, p_j).
struct PhaseField {
    PhaseGrid grid;
    Eigen::MatrixXd values;

    double integral() const { return values.sum() * grid.x.step() * grid.p.step(); }
};

}  // namespace qhalo
