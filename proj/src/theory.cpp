#include "anisoflow/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "anisoflow/errors.hpp"

namespace anisoflow {

double poincare_rectangle(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("rectangle sides must be positive");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return 1.0 / std::sqrt(pi2 * (1.0 / (a * a) + 1.0 / (b * b)));
}

double sobolev_surrogate(double q, double area) {
    if (!(q > 2.0) || !(area > 0.0)) throw DomainError("sobolev_surrogate needs q > 2, area > 0");
    return 0.25 * q * std::pow(area, 1.0 / q);
}

EmbeddingConstants default_embedding_constants(const GridSpec& grid, double p) {
    const double area = grid.extent_x() * grid.extent_y();
    EmbeddingConstants emb;
    emb.c_poincare = poincare_rectangle(grid.extent_x(), grid.extent_y());
    emb.c_sob_1 = sobolev_surrogate(2.0 * p / (p - 2.0), area);
    emb.c_sob_2 = sobolev_surrogate(2.0 * p / (p - 1.0), area);
    emb.user_supplied = false;
    return emb;
}

namespace {

// Shared shape of C_2 and tau_hat:
//   K min(1, mu) (1 + W)^{-2} (1 + G)^{-2} / (54 (1 + C_P)^2 (1 + C_s1)^2 (1 + 2K))
double time_step_bound(double k, double g, const ConditionInputs& in) {
    const double cp1 = 1.0 + in.emb.c_poincare;
    const double cs1 = 1.0 + in.emb.c_sob_1;
    const double w1 = 1.0 + in.gamma_w1inf;
    const double g1 = 1.0 + g;
    return k * std::min(1.0, in.mu) / (w1 * w1) / (g1 * g1) /
           (54.0 * cp1 * cp1 * cs1 * cs1 * (1.0 + 2.0 * k));
}

}  // namespace

ConditionReport conditions_from_inputs(const ConditionInputs& in) {
    ConditionReport r;
    r.inputs = in;
    const double sob = in.emb.c_sob_1 + in.emb.c_sob_2;
    const double cp1 = 1.0 + in.emb.c_poincare;
    const double base = sob * sob * cp1 * cp1 * in.gamma_w1inf;
    const double rt2 = std::numbers::sqrt2;

    r.c1 = 4.0 * rt2 * base * in.grad_u_lp * in.grad_u_lp;
    r.c1_proof = 4.0 * rt2 * base * (1.0 + in.grad_u_lp) * (1.0 + in.grad_u_lp);
    r.c2 = time_step_bound(r.c1, in.grad_u_lp, in);
    r.c2_proof = time_step_bound(r.c1_proof, in.grad_u_lp, in);

    const double scaled_energy = in.nu / in.p * in.energy0;
    r.kappa_hat = 8.0 * rt2 * base * std::pow(1.0 + scaled_energy, 2.0 / in.p);
    r.tau_hat = time_step_bound(r.kappa_hat, std::pow(scaled_energy, 1.0 / in.p), in);

    const double grad_bound = std::pow(in.p / in.nu * in.energy0, 1.0 / in.p);
    r.kappa_hat_alt = 8.0 * rt2 * base * (1.0 + grad_bound) * (1.0 + grad_bound);
    r.tau_hat_alt = time_step_bound(r.kappa_hat_alt, grad_bound, in);

    r.alpha0_unique_bound = r.c1_proof;

    r.kappa_ok = in.kappa > r.kappa_hat;
    r.tau_ok = in.tau < r.tau_hat;
    r.kappa_ok_alt = in.kappa > r.kappa_hat_alt;
    r.tau_ok_alt = in.tau < r.tau_hat_alt;
    r.alpha0_unique = in.kappa > r.alpha0_unique_bound;
    return r;
}

ConditionReport compute_conditions(const ModelParams& params, const Anisotropy& a,
                                   const ScalarField& u0, const ScalarField& u_org,
                                   const EmbeddingConstants& emb) {
    params.validate();
    require_same_grid(u0.grid(), u_org.grid());
    if (!(emb.c_poincare > 0.0) || !(emb.c_sob_1 > 0.0) || !(emb.c_sob_2 > 0.0)) {
        throw ValidationError("", "embedding constants must be positive");
    }
    ConditionInputs in;
    in.p = params.p;
    in.nu = params.nu;
    in.mu = params.mu;
    in.kappa = params.kappa;
    in.tau = params.tau;
    in.gamma_w1inf = a.w1inf_bound();
    in.grad_u_lp = norm_lp_rooted(grad(u0), params.p);
    in.energy0 = energy(ScalarField(u0.grid()), u0, u_org, params, a).total;
    in.emb = emb;
    return conditions_from_inputs(in);
}

JTrace j_functional(const Trajectory& first, const Trajectory& second) {
    require_same_grid(first.grid(), second.grid());
    if (first.steps() != second.steps() || first.params().tau != second.params().tau) {
        throw ShapeError("trajectories differ in step count or time step");
    }
    const double mu = first.params().mu;
    JTrace out;
    for (int i = 0; i <= first.steps(); ++i) {
        const auto& p1 = first.points()[i];
        const auto& p2 = second.points()[i];
        const ScalarField du = p1.u - p2.u;
        const VectorField gdu = grad(du);
        const VectorField gda = grad(p1.alpha - p2.alpha);
        out.times.push_back(first.time(i));
        out.j_values.push_back(inner_l2(du, du) + mu * inner_l2(gdu, gdu));
        out.alpha_gap.push_back(inner_l2(gda, gda));
    }
    return out;
}

ScalarField perturbation_direction(const ScalarField& u0) {
    const GridSpec& g = u0.grid();
    ScalarField psi(g);
    const double pi = std::numbers::pi;
    for (int j = 0; j < g.ny(); ++j) {
        const double sy = std::sin(pi * (j + 1) / (g.ny() + 1));
        for (int i = 0; i < g.nx(); ++i) {
            const double phi = std::sin(pi * (i + 1) / (g.nx() + 1)) * sy;
            const double v = u0(i, j);
            psi(i, j) = 4.0 * phi * v * (1.0 - v);
        }
    }
    return psi;
}

ScalarField perturb_initial_data(const ScalarField& u0, double delta) {
    if (!(std::abs(delta) <= 0.25)) throw DomainError("perturbation magnitude must satisfy |delta| <= 1/4");
    ScalarField out = u0;
    out.axpy(delta, perturbation_direction(u0));
    return out;
}

TwinRunResult twin_run(const ScalarField& u0_a, const ScalarField& u0_b, const ScalarField& u_org,
                       const ModelParams& params, const Anisotropy& a, const SolveConfig& cfg,
                       const EmbeddingConstants& emb) {
    Trajectory first = run(u0_a, u_org, params, a, cfg);
    Trajectory second = run(u0_b, u_org, params, a, cfg);
    JTrace trace = j_functional(first, second);
    double ratio = 0.0;
    if (trace.j_values.front() > 0.0) {
        const double sup = *std::max_element(trace.j_values.begin(), trace.j_values.end());
        ratio = sup / trace.j_values.front();
    }
    ConditionReport cond = compute_conditions(params, a, u0_a, u_org, emb);
    const bool certified = cond.kappa_ok;
    return {std::move(first), std::move(second), std::move(trace), ratio, cond, certified};
}

}  // namespace anisoflow
