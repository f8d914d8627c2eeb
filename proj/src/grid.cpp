#include "anisoflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "anisoflow/errors.hpp"

namespace anisoflow {

GridSpec::GridSpec(int nx, int ny, double hx, double hy) : nx_(nx), ny_(ny), hx_(hx), hy_(hy) {
    if (nx < 1 || ny < 1) {
        throw DomainError("grid needs at least one interior node per axis, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
    }
    if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
        throw DomainError("grid spacings must be positive and finite");
    }
}

GridSpec GridSpec::unit_square(int nx, int ny) {
    const double h = 1.0 / (std::max(nx, ny) + 1);
    return GridSpec(nx, ny, h, h);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) {
        throw ShapeError("grid mismatch: " + std::to_string(a.nx()) + "x" + std::to_string(a.ny()) +
                         " vs " + std::to_string(b.nx()) + "x" + std::to_string(b.ny()));
    }
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(grid.node_count(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {
    if (!std::isfinite(fill)) throw NumericError("non-finite fill value");
}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
        throw ShapeError("scalar field needs " + std::to_string(grid_.node_count()) +
                         " values, got " + std::to_string(values_.size()));
    }
    if (!all_finite()) throw NumericError("scalar field has non-finite entries");
}

bool ScalarField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) { return axpy(1.0, other); }
ScalarField& ScalarField::operator-=(const ScalarField& other) { return axpy(-1.0, other); }

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& x) {
    require_same_grid(grid_, x.grid_);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * x.values_[k];
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// ---------------------------------------------------------------------------

VectorField::VectorField(const GridSpec& grid)
    : grid_(grid), x_(grid.cell_count(), 0.0), y_(grid.cell_count(), 0.0) {}

VectorField::VectorField(const GridSpec& grid, std::vector<double> x, std::vector<double> y)
    : grid_(grid), x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != grid_.cell_count() || y_.size() != grid_.cell_count()) {
        throw ShapeError("vector field needs " + std::to_string(grid_.cell_count()) +
                         " values per component");
    }
    if (!all_finite()) throw NumericError("vector field has non-finite entries");
}

bool VectorField::all_finite() const noexcept {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(x_.begin(), x_.end(), finite) && std::all_of(y_.begin(), y_.end(), finite);
}

VectorField& VectorField::operator+=(const VectorField& other) { return axpy(1.0, other); }

VectorField& VectorField::axpy(double s, const VectorField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t k = 0; k < x_.size(); ++k) {
        x_[k] += s * other.x_[k];
        y_[k] += s * other.y_[k];
    }
    return *this;
}

// ---------------------------------------------------------------------------

double pairwise_sum(std::span<const double> terms) {
    constexpr std::size_t kBlock = 16;
    if (terms.size() <= kBlock) {
        double s = 0.0;
        for (double t : terms) s += t;
        return s;
    }
    const std::size_t half = terms.size() / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

VectorField grad(const ScalarField& f) {
    const GridSpec& g = f.grid();
    VectorField out(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    auto ox = out.x();
    auto oy = out.y();
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const double here = f.at(i, j);
            const std::size_t c = g.cell(i, j);
            ox[c] = (f.at(i + 1, j) - here) * ihx;
            oy[c] = (f.at(i, j + 1) - here) * ihy;
        }
    }
    return out;
}

ScalarField div(const VectorField& v) {
    const GridSpec& g = v.grid();
    ScalarField out(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    auto vx = v.x();
    auto vy = v.y();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t c = g.cell(i, j);
            out(i, j) = (vx[c] - vx[g.cell(i - 1, j)]) * ihx + (vy[c] - vy[g.cell(i, j - 1)]) * ihy;
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const GridSpec& g = f.grid();
    ScalarField out(g);
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double c = f(i, j);
            out(i, j) = ((f.at(i + 1, j) - c) - (c - f.at(i - 1, j))) * ihx2 +
                        ((f.at(i, j + 1) - c) - (c - f.at(i, j - 1))) * ihy2;
        }
    }
    return out;
}

double inner_l2(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid());
    std::vector<double> terms(f.size());
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = f[k] * g[k];
    return pairwise_sum(terms) * f.grid().cell_area();
}

double inner_l2(const VectorField& f, const VectorField& g) {
    require_same_grid(f.grid(), g.grid());
    std::vector<double> terms(f.size());
    auto fx = f.x(), fy = f.y(), gx = g.x(), gy = g.y();
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = fx[k] * gx[k] + fy[k] * gy[k];
    return pairwise_sum(terms) * f.grid().cell_area();
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner_l2(f, f)); }
double norm_l2(const VectorField& v) { return std::sqrt(inner_l2(v, v)); }

double norm_lp(const VectorField& v, double p) {
    if (!(p >= 1.0)) throw DomainError("norm_lp needs p >= 1");
    std::vector<double> terms(v.size());
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const Vec2 w = v[k];
        const double sq = w.x * w.x + w.y * w.y;
        terms[k] = (p == 2.0) ? sq : std::pow(sq, 0.5 * p);
    }
    return pairwise_sum(terms) * v.grid().cell_area();
}

double norm_lp_rooted(const VectorField& v, double p) { return std::pow(norm_lp(v, p), 1.0 / p); }

double norm_h1(const ScalarField& f) {
    return std::sqrt(inner_l2(f, f) + inner_l2(grad(f), grad(f)));
}

double discrete_dirichlet_eigenvalue(const GridSpec& grid) {
    using std::numbers::pi;
    const double sx = std::sin(pi / (2.0 * (grid.nx() + 1)));
    const double sy = std::sin(pi / (2.0 * (grid.ny() + 1)));
    return 4.0 * sx * sx / (grid.hx() * grid.hx()) + 4.0 * sy * sy / (grid.hy() * grid.hy());
}

}  // namespace anisoflow
