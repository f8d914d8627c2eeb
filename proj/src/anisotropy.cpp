#include "anisoflow/anisotropy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "anisoflow/errors.hpp"

namespace anisoflow {

std::string_view to_string(AnisotropyFamily family) {
    switch (family) {
        case AnisotropyFamily::smoothed_l1: return "smoothed-l1";
        case AnisotropyFamily::smoothed_ngon: return "smoothed-ngon";
        case AnisotropyFamily::smoothed_euclid: return "smoothed-euclid";
    }
    return "unknown";
}

std::optional<AnisotropyFamily> parse_family(std::string_view name) {
    if (name == "smoothed-l1") return AnisotropyFamily::smoothed_l1;
    if (name == "smoothed-ngon") return AnisotropyFamily::smoothed_ngon;
    if (name == "smoothed-euclid") return AnisotropyFamily::smoothed_euclid;
    return std::nullopt;
}

namespace {

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ValidationError("A2", "anisotropy smoothing radius epsilon must be > 0");
    }
}

}  // namespace

Anisotropy::Anisotropy(AnisotropyFamily family, double epsilon, std::vector<Vec2> dirs,
                       std::vector<double> weights)
    : family_(family), epsilon_(epsilon), dirs_(std::move(dirs)), weights_(std::move(weights)) {
    const double wsum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    hess_bound_ = wsum / epsilon_;
    switch (family_) {
        case AnisotropyFamily::smoothed_l1: grad_bound_ = std::numbers::sqrt2; break;
        case AnisotropyFamily::smoothed_euclid: grad_bound_ = 1.0; break;
        case AnisotropyFamily::smoothed_ngon: grad_bound_ = wsum; break;
    }
}

Anisotropy Anisotropy::smoothed_l1(double epsilon) {
    check_epsilon(epsilon);
    return Anisotropy(AnisotropyFamily::smoothed_l1, epsilon, {{1.0, 0.0}, {0.0, 1.0}}, {1.0, 1.0});
}

Anisotropy Anisotropy::smoothed_ngon(int n_dirs, double epsilon, std::vector<double> weights) {
    check_epsilon(epsilon);
    if (n_dirs < 2) throw ValidationError("A2", "smoothed-ngon needs n_dirs >= 2");
    if (weights.empty()) weights.assign(n_dirs, 1.0);
    if (static_cast<int>(weights.size()) != n_dirs) {
        throw ValidationError("A2", "smoothed-ngon needs one weight per direction");
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            // A zero weight can leave a direction with gamma = 0 away from the origin.
            throw ValidationError("A2", "smoothed-ngon weights must be positive");
        }
    }
    std::vector<Vec2> dirs;
    dirs.reserve(n_dirs);
    for (int j = 0; j < n_dirs; ++j) {
        const double theta = j * std::numbers::pi / n_dirs;
        dirs.push_back({std::cos(theta), std::sin(theta)});
    }
    return Anisotropy(AnisotropyFamily::smoothed_ngon, epsilon, std::move(dirs), std::move(weights));
}

Anisotropy Anisotropy::smoothed_euclid(double epsilon) {
    check_epsilon(epsilon);
    return Anisotropy(AnisotropyFamily::smoothed_euclid, epsilon, {}, {1.0});
}

double Anisotropy::value(Vec2 w) const {
    const double e2 = epsilon_ * epsilon_;
    if (family_ == AnisotropyFamily::smoothed_euclid) {
        const double s = w.x * w.x + w.y * w.y;
        // sqrt(s + e^2) - e without cancellation for small |w|
        return s / (std::sqrt(s + e2) + epsilon_);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
        const double t = dot(dirs_[j], w);
        total += weights_[j] * (t * t / (std::sqrt(t * t + e2) + epsilon_));
    }
    return total;
}

Vec2 Anisotropy::gradient(Vec2 w) const {
    const double e2 = epsilon_ * epsilon_;
    if (family_ == AnisotropyFamily::smoothed_euclid) {
        const double r = std::sqrt(w.x * w.x + w.y * w.y + e2);
        return {w.x / r, w.y / r};
    }
    Vec2 g{};
    for (std::size_t j = 0; j < dirs_.size(); ++j) {
        const double t = dot(dirs_[j], w);
        const double c = weights_[j] * t / std::sqrt(t * t + e2);
        g.x += c * dirs_[j].x;
        g.y += c * dirs_[j].y;
    }
    return g;
}

double gamma_eval(const Anisotropy& a, Vec2 w) { return a.value(w); }
Vec2 gamma_grad(const Anisotropy& a, Vec2 w) { return a.gradient(w); }

Vec2 rotate(double alpha, Vec2 w) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    return {c * w.x - s * w.y, s * w.x + c * w.y};
}

double gamma_angle_derivative(const Anisotropy& a, double alpha, Vec2 w) {
    // grad gamma is parallel to its argument for the isotropic family
    if (a.family() == AnisotropyFamily::smoothed_euclid) return 0.0;
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    const Vec2 rw{c * w.x - s * w.y, s * w.x + c * w.y};
    // R(alpha + pi/2) w = (-(R w).y, (R w).x)
    const Vec2 rw_perp{-rw.y, rw.x};
    return dot(a.gradient(rw), rw_perp);
}

double angle_curvature_bound(const Anisotropy& a, double w_norm) {
    // d2/dalpha2 gamma(Rw) = (R'w)^T Hess (R'w) - grad gamma . Rw
    return a.hess_bound() * w_norm * w_norm + a.grad_bound() * w_norm;
}

A2Report verify_A2(const Anisotropy& a, int samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("verify_A2 needs at least one sample");
    std::mt19937_64 rng(seed);
    // Mix scales so the smoothing zone and the far field are both probed.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_int_distribution<int> decade(-3, 2);
    auto draw = [&] {
        const double scale = std::pow(10.0, decade(rng)) * a.epsilon();
        return Vec2{scale * unit(rng), scale * unit(rng)};
    };

    A2Report report;
    report.convexity.worst = -INFINITY;
    report.gradient_bound.worst = -INFINITY;
    report.lipschitz.worst = -INFINITY;
    report.positivity.worst = -INFINITY;
    if (a.value({0.0, 0.0}) != 0.0) {
        report.positivity.pass = false;
        report.positivity.worst = a.value({0.0, 0.0});
    }

    auto record = [](PropertyCheck& check, double violation, Vec2 w, Vec2 v, double tol) {
        if (violation > check.worst) {
            check.worst = violation;
            check.witness = w;
            check.witness_other = v;
        }
        if (violation > tol) check.pass = false;
    };

    for (int s = 0; s < samples; ++s) {
        const Vec2 w = draw();
        const Vec2 v = draw();
        const double gw = a.value(w);
        const double gv = a.value(v);
        const double gm = a.value(0.5 * (w + v));
        const double scale = 1.0 + std::abs(gw) + std::abs(gv);
        record(report.convexity, gm - 0.5 * (gw + gv), w, v, 1e-12 * scale);

        const Vec2 dw = a.gradient(w);
        record(report.gradient_bound, norm(dw) - a.grad_bound(), w, w, 1e-12);

        const double dist = norm(w - v);
        if (dist > 0.0) {
            const double lip = norm(dw - a.gradient(v)) - a.hess_bound() * dist;
            record(report.lipschitz, lip, w, v, 1e-12 * (1.0 + a.hess_bound() * dist));
        }
        if (w.x != 0.0 || w.y != 0.0) {
            // gamma(w) > 0 is recorded as the violation -gamma(w) < 0
            record(report.positivity, -gw, w, w, -std::numeric_limits<double>::min());
        }
    }
    return report;
}

}  // namespace anisoflow
