#pragma once

// Smoothed convex anisotropies gamma : R^2 -> [0, inf) with bounded, Lipschitz
// gradient and a unique minimum at the origin, plus the rotation algebra that
// couples them to the orientation field.
//
// Every family is a weighted sum of terms sqrt((n . w)^2 + eps^2) - eps over a
// set of unit directions n:
//   smoothed-l1      n in {(1,0), (0,1)}
//   smoothed-ngon    n_j = (cos(j pi / N), sin(j pi / N)), j = 0..N-1
//   smoothed-euclid  sqrt(|w|^2 + eps^2) - eps (isotropic)

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anisoflow/grid.hpp"

namespace anisoflow {

enum class AnisotropyFamily { smoothed_l1, smoothed_ngon, smoothed_euclid };

std::string_view to_string(AnisotropyFamily family);
/// Accepts "smoothed-l1", "smoothed-ngon", "smoothed-euclid".
std::optional<AnisotropyFamily> parse_family(std::string_view name);

class Anisotropy {
public:
    static Anisotropy smoothed_l1(double epsilon);
    /// Empty `weights` means unit weight on every direction.
    static Anisotropy smoothed_ngon(int n_dirs, double epsilon, std::vector<double> weights = {});
    static Anisotropy smoothed_euclid(double epsilon);

    AnisotropyFamily family() const noexcept { return family_; }
    double epsilon() const noexcept { return epsilon_; }
    int n_dirs() const noexcept { return static_cast<int>(dirs_.size()); }
    const std::vector<double>& weights() const noexcept { return weights_; }

    double value(Vec2 w) const;
    Vec2 gradient(Vec2 w) const;

    /// sup |grad gamma|
    double grad_bound() const noexcept { return grad_bound_; }
    /// Lipschitz constant of grad gamma: sum(weights) / epsilon.
    double hess_bound() const noexcept { return hess_bound_; }
    /// |grad gamma|_{W^{1,inf}} surrogate used by the largeness conditions.
    double w1inf_bound() const noexcept { return grad_bound_ + hess_bound_; }

private:
    Anisotropy(AnisotropyFamily family, double epsilon, std::vector<Vec2> dirs,
               std::vector<double> weights);

    AnisotropyFamily family_;
    double epsilon_;
    std::vector<Vec2> dirs_;  // empty for smoothed-euclid
    std::vector<double> weights_;
    double grad_bound_;
    double hess_bound_;
};

double gamma_eval(const Anisotropy& a, Vec2 w);
Vec2 gamma_grad(const Anisotropy& a, Vec2 w);

/// Counterclockwise rotation by alpha, so that d/dalpha R(alpha) = R(alpha + pi/2).
Vec2 rotate(double alpha, Vec2 w);

/// grad gamma(R(alpha) w) . R(alpha + pi/2) w, which is d/dalpha gamma(R(alpha) w).
double gamma_angle_derivative(const Anisotropy& a, double alpha, Vec2 w);

/// Upper bound on |d^2/dalpha^2 gamma(R(alpha) w)| for |w| = w_norm.
double angle_curvature_bound(const Anisotropy& a, double w_norm);

struct PropertyCheck {
    bool pass = true;
    double worst = 0.0;  // largest observed violation (<= 0 when passing) or ratio
    Vec2 witness{};
    Vec2 witness_other{};
};

struct A2Report {
    PropertyCheck convexity;        // midpoint convexity
    PropertyCheck gradient_bound;   // |grad gamma| <= grad_bound
    PropertyCheck lipschitz;        // |grad gamma(w) - grad gamma(v)| <= hess_bound |w - v|
    PropertyCheck positivity;       // gamma(w) > 0 for w != 0, gamma(0) == 0

    bool all_pass() const {
        return convexity.pass && gradient_bound.pass && lipschitz.pass && positivity.pass;
    }
};

/// Random sampling check of assumption (A2). Throws DomainError if samples < 1.
A2Report verify_A2(const Anisotropy& a, int samples, std::uint64_t seed = 1);

}  // namespace anisoflow
