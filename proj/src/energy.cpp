#include "anisoflow/energy.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "anisoflow/errors.hpp"

namespace anisoflow {

void ModelParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError("A0", std::string(name) + " must be > 0");
        }
    };
    if (!(p > 2.0) || !std::isfinite(p)) throw ValidationError("A0", "p > 2 is required");
    positive(nu, "nu");
    positive(mu, "mu");
    positive(lambda, "lambda");
    positive(kappa, "kappa");
    positive(tau, "tau");
    positive(t_final, "t_final");
    steps();
}

int ModelParams::steps() const {
    const double ratio = t_final / tau;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(ratio - m) > 1e-9 * ratio) {
        throw ValidationError("A0", "t_final / tau must be a positive integer, got " +
                                        std::to_string(ratio));
    }
    return static_cast<int>(m);
}

void require_unit_range(const ScalarField& f, const char* assumption, const char* name) {
    for (double v : f.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError(assumption,
                                  std::string(name) + " must satisfy 0 <= " + name + " <= 1");
        }
    }
}

namespace {

double p_power(double sq, double p) { return std::pow(sq, 0.5 * p); }

// |v|^{p-2} for p > 2, continuous extension 0 at v = 0
double p_weight(double sq, double p) { return std::pow(sq, 0.5 * (p - 2.0)); }

void check_grids(const ScalarField& alpha, const ScalarField& u, const ScalarField& other) {
    require_same_grid(alpha.grid(), u.grid());
    require_same_grid(alpha.grid(), other.grid());
}

}  // namespace

EnergyBreakdown energy(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                       const ModelParams& params, const Anisotropy& a) {
    check_grids(alpha, u, u_org);
    const GridSpec& g = u.grid();
    const VectorField du = grad(u);

    std::vector<double> p_terms(g.cell_count());
    std::vector<double> aniso_terms(g.cell_count());
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const std::size_t c = g.cell(i, j);
            const Vec2 w = du[c];
            p_terms[c] = p_power(w.x * w.x + w.y * w.y, params.p);
            aniso_terms[c] = a.value(rotate(alpha.at(i, j), w));
        }
    }
    std::vector<double> fid(g.node_count());
    for (std::size_t k = 0; k < fid.size(); ++k) {
        const double d = u[k] - u_org[k];
        fid[k] = d * d;
    }

    const double area = g.cell_area();
    const VectorField da = grad(alpha);
    EnergyBreakdown e;
    e.dirichlet_alpha = 0.5 * params.kappa * inner_l2(da, da);
    e.p_term = params.nu / params.p * pairwise_sum(p_terms) * area;
    e.aniso_term = pairwise_sum(aniso_terms) * area;
    e.fidelity = 0.5 * params.lambda * pairwise_sum(fid) * area;
    e.total = e.dirichlet_alpha + e.p_term + e.aniso_term + e.fidelity;
    return e;
}

StepPenalty step_penalty(const ScalarField& u, const ScalarField& w_bar, const ModelParams& params) {
    require_same_grid(u.grid(), w_bar.grid());
    const ScalarField d = u - w_bar;
    const VectorField dd = grad(d);
    return {0.5 / params.tau * inner_l2(d, d), 0.5 * params.mu / params.tau * inner_l2(dd, dd)};
}

double step_functional(const ScalarField& alpha, const ScalarField& u, const StepData& step,
                       const ModelParams& params, const Anisotropy& a) {
    check_grids(alpha, u, step.w_bar);
    const StepPenalty pen = step_penalty(u, step.w_bar, params);
    return energy(alpha, u, step.u_org, params, a).total + pen.l2 + pen.h1;
}

ScalarField grad_alpha(const ScalarField& alpha, const ScalarField& u, const ModelParams& params,
                       const Anisotropy& a) {
    require_same_grid(alpha.grid(), u.grid());
    const GridSpec& g = u.grid();
    const VectorField du = grad(u);
    ScalarField out = laplacian(alpha);
    out *= -params.kappa;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out(i, j) += gamma_angle_derivative(a, alpha(i, j), du.at(i, j));
        }
    }
    return out;
}

namespace {

// Flux of E with respect to grad u, plus optional extra flux, then
// g = -div(flux) + lambda (u - u_org).
ScalarField grad_u_impl(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                        const ModelParams& params, const Anisotropy& a, const VectorField* extra) {
    const GridSpec& g = u.grid();
    const VectorField du = grad(u);
    VectorField flux(g);
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const std::size_t c = g.cell(i, j);
            const Vec2 w = du[c];
            const double al = alpha.at(i, j);
            const Vec2 aniso = rotate(-al, a.gradient(rotate(al, w)));
            const double pw = params.nu * p_weight(w.x * w.x + w.y * w.y, params.p);
            flux.set(c, aniso + pw * w);
        }
    }
    if (extra != nullptr) flux += *extra;
    ScalarField out = div(flux);
    out *= -1.0;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += params.lambda * (u[k] - u_org[k]);
    return out;
}

}  // namespace

ScalarField grad_u_energy(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                          const ModelParams& params, const Anisotropy& a) {
    check_grids(alpha, u, u_org);
    return grad_u_impl(alpha, u, u_org, params, a, nullptr);
}

ScalarField grad_u_step(const ScalarField& alpha, const ScalarField& u, const StepData& step,
                        const ModelParams& params, const Anisotropy& a) {
    check_grids(alpha, u, step.w_bar);
    require_same_grid(u.grid(), step.u_org.grid());
    const ScalarField d = u - step.w_bar;
    VectorField extra = grad(d);
    for (double& v : extra.x()) v *= params.mu / params.tau;
    for (double& v : extra.y()) v *= params.mu / params.tau;
    ScalarField out = grad_u_impl(alpha, u, step.u_org, params, a, &extra);
    out.axpy(1.0 / params.tau, d);
    return out;
}

}  // namespace anisoflow
