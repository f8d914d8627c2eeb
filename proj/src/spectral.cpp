#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "anisoflow/errors.hpp"

namespace anisoflow::detail {

namespace {
// The FFTW planner is not thread-safe.
std::mutex planner_mutex;
}  // namespace

SpectralSolver::SpectralSolver(const GridSpec& grid) : grid_(grid), eig_(grid.node_count()) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    for (int j = 0; j < ny; ++j) {
        const double sy = std::sin(std::numbers::pi * (j + 1) / (2.0 * (ny + 1)));
        for (int i = 0; i < nx; ++i) {
            const double sx = std::sin(std::numbers::pi * (i + 1) / (2.0 * (nx + 1)));
            eig_[grid.node(i, j)] = 4.0 * sx * sx / (grid.hx() * grid.hx()) +
                                    4.0 * sy * sy / (grid.hy() * grid.hy());
        }
    }
    std::lock_guard<std::mutex> lock(planner_mutex);
    buffer_ = fftw_alloc_real(grid.node_count());
    // Row-major with x fastest: dimension 0 is y.
    plan_ = fftw_plan_r2r_2d(ny, nx, buffer_, buffer_, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw NumericError("could not create sine transform plan");
}

SpectralSolver::~SpectralSolver() {
    std::lock_guard<std::mutex> lock(planner_mutex);
    if (plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    fftw_free(buffer_);
}

ScalarField SpectralSolver::solve(const ScalarField& rhs, double shift, double coef) {
    require_same_grid(grid_, rhs.grid());
    const std::size_t n = grid_.node_count();
    auto plan = static_cast<fftw_plan>(plan_);
    for (std::size_t k = 0; k < n; ++k) buffer_[k] = rhs[k];
    fftw_execute(plan);
    // RODFT00 applied twice scales by 2(n+1) per dimension.
    const double norm = 1.0 / (4.0 * (grid_.nx() + 1) * (grid_.ny() + 1));
    for (std::size_t k = 0; k < n; ++k) buffer_[k] *= norm / (shift + coef * eig_[k]);
    fftw_execute(plan);
    ScalarField out(grid_);
    for (std::size_t k = 0; k < n; ++k) out[k] = buffer_[k];
    return out;
}

}  // namespace anisoflow::detail
