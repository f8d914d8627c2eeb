#pragma once

// Discrete energy
//
//   E(alpha, u) = kappa/2 |grad alpha|^2 + nu/p |grad u|^p
//               + sum_cells gamma(R(alpha) grad u) + lambda/2 |u - u_org|^2
//
// and the per-step functional
//
//   Psi(alpha, u) = E(alpha, u) + 1/(2 tau) |u - w|^2 + mu/(2 tau) |grad(u - w)|^2
//
// together with their exact gradients. The orientation at a cell is the value
// of alpha at the cell's lower-left node, which is the Dirichlet value 0 on the
// boundary ring. Roots of grad_alpha / grad_u_step are the discrete
// Euler-Lagrange equations of one implicit time step.

#include "anisoflow/anisotropy.hpp"
#include "anisoflow/grid.hpp"

namespace anisoflow {

struct ModelParams {
    double kappa = 1.0;
    double mu = 1.0;
    double nu = 1.0;
    double lambda = 1.0;
    double p = 3.0;
    double tau = 0.1;
    double t_final = 1.0;

    /// Throws ValidationError naming (A0) when a constant is out of range or
    /// t_final / tau is not a positive integer.
    void validate() const;
    /// Number of time steps m = t_final / tau.
    int steps() const;
};

struct EnergyBreakdown {
    double dirichlet_alpha = 0.0;
    double p_term = 0.0;
    double aniso_term = 0.0;
    double fidelity = 0.0;
    double total = 0.0;
};

struct StepData {
    ScalarField w_bar;  // previous iterate
    ScalarField u_org;
};

/// Throws ValidationError naming `assumption` unless 0 <= f <= 1 nodewise.
void require_unit_range(const ScalarField& f, const char* assumption, const char* name);

EnergyBreakdown energy(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                       const ModelParams& params, const Anisotropy& a);

/// 1/(2 tau) |u - w|^2 and mu/(2 tau) |grad(u - w)|^2.
struct StepPenalty {
    double l2 = 0.0;
    double h1 = 0.0;
};
StepPenalty step_penalty(const ScalarField& u, const ScalarField& w_bar, const ModelParams& params);

double step_functional(const ScalarField& alpha, const ScalarField& u, const StepData& step,
                       const ModelParams& params, const Anisotropy& a);

/// -kappa lap(alpha) + gamma_angle_derivative(alpha, grad u) nodewise.
ScalarField grad_alpha(const ScalarField& alpha, const ScalarField& u, const ModelParams& params,
                       const Anisotropy& a);

/// Gradient of E with respect to u (no time-step terms).
ScalarField grad_u_energy(const ScalarField& alpha, const ScalarField& u, const ScalarField& u_org,
                          const ModelParams& params, const Anisotropy& a);

/// (u - w)/tau - div(R(-alpha) grad gamma(R(alpha) grad u) + nu |grad u|^{p-2} grad u
///                   + mu/tau grad(u - w)) + lambda (u - u_org)
ScalarField grad_u_step(const ScalarField& alpha, const ScalarField& u, const StepData& step,
                        const ModelParams& params, const Anisotropy& a);

}  // namespace anisoflow
