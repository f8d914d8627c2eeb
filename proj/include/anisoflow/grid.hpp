#pragma once

// Discrete rectangular domain with homogeneous Dirichlet boundary and the
// finite-difference calculus built on it.
//
// Scalar fields live on the nx*ny interior nodes; the boundary ring is
// structurally zero. Vector fields live on the (nx+1)*(ny+1) cells of the
// rectangle and are indexed by the cell's lower-left node, so cell indices
// run over i = -1..nx-1 and j = -1..ny-1. grad is the forward difference on
// every cell, div is its negative adjoint, and div(grad f) is the standard
// 5-point Dirichlet Laplacian.

#include <cstddef>
#include <span>
#include <vector>

namespace anisoflow {

class GridSpec {
public:
    /// Throws DomainError unless nx, ny >= 1 and hx, hy > 0.
    GridSpec(int nx, int ny, double hx, double hy);

    /// Grid whose rectangle fits the unit square: h = 1 / (max(nx, ny) + 1).
    static GridSpec unit_square(int nx, int ny);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double hx() const noexcept { return hx_; }
    double hy() const noexcept { return hy_; }
    double extent_x() const noexcept { return (nx_ + 1) * hx_; }
    double extent_y() const noexcept { return (ny_ + 1) * hy_; }
    double cell_area() const noexcept { return hx_ * hy_; }

    std::size_t node_count() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_ + 1) * (ny_ + 1); }

    /// Interior node (i, j), 0 <= i < nx, 0 <= j < ny; x runs fastest.
    std::size_t node(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * nx_ + i;
    }
    /// Cell with lower-left node (i, j), -1 <= i < nx, -1 <= j < ny.
    std::size_t cell(int i, int j) const noexcept {
        return static_cast<std::size_t>(j + 1) * (nx_ + 1) + (i + 1);
    }

    bool operator==(const GridSpec&) const = default;

private:
    int nx_;
    int ny_;
    double hx_;
    double hy_;
};

/// Throws ShapeError when the two grids differ.
void require_same_grid(const GridSpec& a, const GridSpec& b);

class ScalarField {
public:
    explicit ScalarField(const GridSpec& grid);
    ScalarField(const GridSpec& grid, double fill);
    /// Throws ShapeError on a length mismatch and NumericError on non-finite input.
    ScalarField(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Reads outside the interior return the Dirichlet value 0.
    double at(int i, int j) const noexcept {
        if (i < 0 || j < 0 || i >= grid_.nx() || j >= grid_.ny()) return 0.0;
        return values_[grid_.node(i, j)];
    }
    double& operator()(int i, int j) { return values_[grid_.node(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.node(i, j)]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;
    double min() const;
    double max() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);
    /// this += s * x
    ScalarField& axpy(double s, const ScalarField& x);

    bool operator==(const ScalarField&) const = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 a);

class VectorField {
public:
    explicit VectorField(const GridSpec& grid);
    VectorField(const GridSpec& grid, std::vector<double> x, std::vector<double> y);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return x_.size(); }

    Vec2 at(int i, int j) const { return (*this)[grid_.cell(i, j)]; }
    void set(int i, int j, Vec2 v) { set(grid_.cell(i, j), v); }

    Vec2 operator[](std::size_t k) const { return {x_[k], y_[k]}; }
    void set(std::size_t k, Vec2 v) {
        x_[k] = v.x;
        y_[k] = v.y;
    }

    std::span<double> x() noexcept { return x_; }
    std::span<double> y() noexcept { return y_; }
    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }

    bool all_finite() const noexcept;

    VectorField& operator+=(const VectorField& other);
    VectorField& axpy(double s, const VectorField& other);

private:
    GridSpec grid_;
    std::vector<double> x_;
    std::vector<double> y_;
};

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> terms);

VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);

double inner_l2(const ScalarField& f, const ScalarField& g);
double inner_l2(const VectorField& f, const VectorField& g);
double norm_l2(const ScalarField& f);
double norm_l2(const VectorField& v);

/// Integral form: sum over cells of |v|^p * hx * hy. Throws DomainError for p < 1.
double norm_lp(const VectorField& v, double p);
/// The p-th root of norm_lp.
double norm_lp_rooted(const VectorField& v, double p);

/// sqrt(|f|^2 + |grad f|^2)
double norm_h1(const ScalarField& f);

/// Smallest eigenvalue of -laplacian on this grid.
double discrete_dirichlet_eigenvalue(const GridSpec& grid);

}  // namespace anisoflow
