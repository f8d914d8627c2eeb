#pragma once

// Explicit constants of the well-posedness theory (largeness conditions on
// kappa and tau, uniqueness bound for the initial orientation) and the
// continuous-dependence functional J(t) measured on twin trajectories.

#include <vector>

#include "anisoflow/solver.hpp"

namespace anisoflow {

struct EmbeddingConstants {
    double c_poincare = 1.0;
    /// H^1 -> L^{2p/(p-2)}
    double c_sob_1 = 1.0;
    /// H^1 -> L^{2p/(p-1)}
    double c_sob_2 = 1.0;
    /// False when any value came from the built-in surrogate formulas.
    bool user_supplied = false;
};

/// C_P = 1 / sqrt(pi^2 (1/a^2 + 1/b^2)). Throws DomainError unless a, b > 0.
double poincare_rectangle(double a, double b);

/// Conservative surrogate for the H^1_0 -> L^q embedding on a domain of area
/// `area`, q > 2: |f|_q <= (q/4) area^{1/q} |grad f|_2.
double sobolev_surrogate(double q, double area);

/// Poincare constant of the rectangle plus the surrogates for both exponents.
EmbeddingConstants default_embedding_constants(const GridSpec& grid, double p);

/// Raw inputs of the constant formulas, so they can be evaluated without a run.
struct ConditionInputs {
    double p = 3.0;
    double nu = 1.0;
    double mu = 1.0;
    double kappa = 1.0;
    double tau = 1.0;
    /// |grad gamma|_{W^{1,inf}}
    double gamma_w1inf = 1.0;
    /// |grad u|_{L^p}, rooted
    double grad_u_lp = 0.0;
    /// E(0, u_0)
    double energy0 = 0.0;
    EmbeddingConstants emb;
};

struct ConditionReport {
    ConditionInputs inputs;

    /// C_1 with the factor |grad u|_{L^p}^2.
    double c1 = 0.0;
    /// C_1 with the factor (1 + |grad u|_{L^p})^2.
    double c1_proof = 0.0;
    double c2 = 0.0;
    double c2_proof = 0.0;

    /// kappa_hat with (1 + nu/p E(0,u_0))^{2/p} and tau_hat with (1 + (nu/p E)^{1/p})^{-2}.
    double kappa_hat = 0.0;
    double tau_hat = 0.0;
    /// Same with |grad u|_{L^p} bounded by (p/nu E(0,u_0))^{1/p}.
    double kappa_hat_alt = 0.0;
    double tau_hat_alt = 0.0;

    /// Uniqueness bound for alpha^0.
    double alpha0_unique_bound = 0.0;

    bool kappa_ok = false;  // kappa > kappa_hat
    bool tau_ok = false;    // tau < tau_hat
    bool kappa_ok_alt = false;
    bool tau_ok_alt = false;
    bool alpha0_unique = false;  // kappa > alpha0_unique_bound
};

ConditionReport conditions_from_inputs(const ConditionInputs& in);

ConditionReport compute_conditions(const ModelParams& params, const Anisotropy& a,
                                   const ScalarField& u0, const ScalarField& u_org,
                                   const EmbeddingConstants& emb);

struct JTrace {
    std::vector<double> times;
    /// |u_1 - u_2|^2 + mu |grad(u_1 - u_2)|^2
    std::vector<double> j_values;
    /// |grad(alpha_1 - alpha_2)|^2
    std::vector<double> alpha_gap;
};

/// Throws ShapeError when the trajectories do not share grid, tau and step count.
JTrace j_functional(const Trajectory& first, const Trajectory& second);

/// psi = 4 phi u0 (1 - u0) with phi the first Dirichlet mode of the grid's
/// rectangle, so u0 + delta psi stays in [0, 1] for |delta| <= 1/4 whenever u0 does.
ScalarField perturbation_direction(const ScalarField& u0);
/// u0 + delta * perturbation_direction(u0). Throws DomainError unless |delta| <= 1/4.
ScalarField perturb_initial_data(const ScalarField& u0, double delta);

struct TwinRunResult {
    Trajectory first;
    Trajectory second;
    JTrace trace;
    /// sup_i J(t_i) / J(0); 0 when J(0) = 0.
    double stability_ratio = 0.0;
    ConditionReport conditions;
    /// kappa > kappa_hat; the ratio is only a stability certificate then.
    bool certified = false;
};

TwinRunResult twin_run(const ScalarField& u0_a, const ScalarField& u0_b, const ScalarField& u_org,
                       const ModelParams& params, const Anisotropy& a, const SolveConfig& cfg,
                       const EmbeddingConstants& emb);

}  // namespace anisoflow
