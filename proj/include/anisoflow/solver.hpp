#pragma once

// Implicit time stepping of the orientation-adaptive denoising flow.
//
// The orientation alpha^0 is computed from u_0 by minimizing the alpha-part of
// the energy. Each step then minimizes Psi over (alpha, u) by alternating block
// descent from the previous iterate, so Psi never rises above its warm-start
// value E(alpha^{i-1}, u^{i-1}) and the discrete energy inequality
//
//   1/(2 tau)|u^i - u^{i-1}|^2 + mu/(2 tau)|grad(u^i - u^{i-1})|^2 + E(alpha^i, u^i)
//       <= E(alpha^{i-1}, u^{i-1})
//
// holds up to rounding. Every accepted step is certified by its residuals.

#include <cstdint>
#include <optional>
#include <vector>

#include "anisoflow/energy.hpp"

namespace anisoflow {

struct SolveConfig {
    double tol_res = 1e-8;
    int max_outer = 200;
    int max_inner = 500;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double init_step = 1.0;
    /// L-BFGS memory of the block solves; 0 gives preconditioned gradient descent.
    int lbfgs_memory = 8;
    /// Allowed energy-inequality violation, relative to 1 + E(alpha^0, u_0).
    double tol_energy_rel = 1e-8;
    /// Allowed overshoot of 0 <= u <= 1 before a run aborts.
    double bound_tol = 1e-10;

    /// Throws ValidationError on out-of-range settings.
    void validate() const;
};

struct StepReport {
    int index = 0;
    int outer_sweeps = 0;
    int inner_iterations = 0;
    double res_alpha = 0.0;
    double res_u = 0.0;
    /// Residual threshold the step was accepted against.
    double tol_used = 0.0;
    EnergyBreakdown energy_before;
    EnergyBreakdown energy_after;
    double dissipation_l2 = 0.0;
    double dissipation_h1 = 0.0;
    double ineq_slack = 0.0;
    /// Psi after each alternating sweep, starting with the warm-start value.
    std::vector<double> psi_trace;
};

/// One row of the energy trace consumed by the CLI.
struct EnergyTraceRow {
    int step = 0;
    double t = 0.0;
    EnergyBreakdown energy;
    double diss_l2 = 0.0;
    double diss_h1 = 0.0;
    double ineq_slack = 0.0;
    double res_alpha = 0.0;
    double res_u = 0.0;
};

struct TrajectoryPoint {
    ScalarField alpha;
    ScalarField u;
    StepReport report;
};

class Trajectory {
public:
    Trajectory(ModelParams params, Anisotropy anisotropy, ScalarField u_org,
               std::vector<TrajectoryPoint> points);

    const ModelParams& params() const noexcept { return params_; }
    const Anisotropy& anisotropy() const noexcept { return anisotropy_; }
    const GridSpec& grid() const noexcept { return u_org_.grid(); }
    const ScalarField& u_org() const noexcept { return u_org_; }
    const std::vector<TrajectoryPoint>& points() const noexcept { return points_; }
    int steps() const noexcept { return static_cast<int>(points_.size()) - 1; }
    double time(int i) const noexcept { return i * params_.tau; }

    /// Piecewise constant, right-continuous in the step: u^i on (t_{i-1}, t_i].
    const ScalarField& u_upper(double t) const;
    /// Piecewise constant, lagged: u^i on (t_i, t_{i+1}].
    const ScalarField& u_lower(double t) const;
    /// Piecewise linear through (t_i, u^i).
    ScalarField u_linear(double t) const;
    /// Time derivative of u_linear on the interval containing t.
    ScalarField u_rate(double t) const;

    const ScalarField& alpha_upper(double t) const;
    const ScalarField& alpha_lower(double t) const;
    ScalarField alpha_linear(double t) const;

    std::vector<EnergyTraceRow> energy_trace() const;

private:
    /// Step i >= 1 whose interval (t_{i-1}, t_i] holds t; t = 0 maps to 1.
    int interval(double t) const;

    ModelParams params_;
    Anisotropy anisotropy_;
    ScalarField u_org_;
    std::vector<TrajectoryPoint> points_;
};

struct OrientationResult {
    ScalarField alpha;
    StepReport report;
};

/// Minimizes alpha -> kappa/2 |grad alpha|^2 + sum gamma(R(alpha) grad u0) from
/// `initial` (default alpha = 0) until |grad_alpha| <= cfg.tol_res.
OrientationResult solve_initial_orientation(const ScalarField& u0, const ModelParams& params,
                                            const Anisotropy& a, const SolveConfig& cfg,
                                            const std::optional<ScalarField>& initial = std::nullopt);

struct MultistartResult {
    OrientationResult best;
    std::vector<ScalarField> minimizers;
    /// Largest L2 distance between any restart and the alpha = 0 start.
    double max_spread = 0.0;
};

/// Diagnostic: repeats the orientation solve from `restarts` random initial
/// fields drawn uniformly from [-amplitude, amplitude] (interior nodes).
MultistartResult solve_initial_orientation_multistart(const ScalarField& u0,
                                                      const ModelParams& params,
                                                      const Anisotropy& a, const SolveConfig& cfg,
                                                      int restarts, double amplitude,
                                                      std::uint64_t seed);

struct StepResult {
    ScalarField alpha;
    ScalarField u;
    StepReport report;
};

StepResult minimize_step(const ScalarField& alpha_prev, const ScalarField& u_prev,
                         const ScalarField& u_org, const ModelParams& params, const Anisotropy& a,
                         const SolveConfig& cfg);

Trajectory run(const ScalarField& u0, const ScalarField& u_org, const ModelParams& params,
               const Anisotropy& a, const SolveConfig& cfg);

struct SystemResiduals {
    /// L2 norm of the orientation identity residual.
    double res_S1 = 0.0;
    /// Worst violation of the u variational inequality over the probe set (>= 0).
    double res_S2_slack = 0.0;
    /// L2 norm of the u identity residual whose sign the inequality tests.
    double res_S2_identity = 0.0;
    /// Largest L2 distance |u - psi| over the probes.
    double probe_norm = 0.0;
};

/// Evaluates the continuous-time solution conditions at time t on the
/// piecewise-linear interpolants. Throws DomainError if t is outside [0, T].
SystemResiduals residuals_S(const Trajectory& traj, double t, std::uint64_t seed = 7);

}  // namespace anisoflow
