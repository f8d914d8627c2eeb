#pragma once

// Exact inverse of (shift * I - coef * laplacian) on a Dirichlet grid, applied
// through the 2D type-I discrete sine transform that diagonalizes the 5-point
// Laplacian.

#include <vector>

#include "anisoflow/grid.hpp"

namespace anisoflow::detail {

class SpectralSolver {
public:
    explicit SpectralSolver(const GridSpec& grid);
    ~SpectralSolver();
    SpectralSolver(const SpectralSolver&) = delete;
    SpectralSolver& operator=(const SpectralSolver&) = delete;

    /// Solves (shift - coef * laplacian) x = rhs. Requires shift >= 0, coef >= 0,
    /// not both zero.
    ScalarField solve(const ScalarField& rhs, double shift, double coef);

    /// Eigenvalues of -laplacian, ordered like the grid nodes.
    const std::vector<double>& eigenvalues() const noexcept { return eig_; }

private:
    GridSpec grid_;
    std::vector<double> eig_;
    double* buffer_ = nullptr;
    void* plan_ = nullptr;
};

}  // namespace anisoflow::detail
