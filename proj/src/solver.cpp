#include "anisoflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "anisoflow/errors.hpp"
#include "descent.hpp"
#include "spectral.hpp"

namespace anisoflow {

void SolveConfig::validate() const {
    if (!(tol_res > 0.0)) throw ValidationError("", "tol_res must be > 0");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ValidationError("", "armijo_c must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ValidationError("", "backtrack must lie in (0, 1)");
    if (!(init_step > 0.0)) throw ValidationError("", "init_step must be > 0");
    if (max_outer < 1 || max_inner < 1) throw ValidationError("", "iteration limits must be >= 1");
    if (lbfgs_memory < 0) throw ValidationError("", "lbfgs_memory must be >= 0");
    if (!(tol_energy_rel >= 0.0) || !(bound_tol >= 0.0)) {
        throw ValidationError("", "tolerances must be nonnegative");
    }
}

namespace {

void require_finite(const ScalarField& f, const char* name) {
    if (!f.all_finite()) throw NumericError(std::string("non-finite values in ") + name);
}

double max_gradient_norm(const VectorField& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, norm(v[k]));
    return m;
}

// alpha -> kappa/2 |grad alpha|^2 + sum_cells gamma(R(alpha) grad u), u frozen.
class OrientationBlock final : public detail::DescentProblem {
public:
    OrientationBlock(const ScalarField& u, const ModelParams& params, const Anisotropy& a,
                     detail::SpectralSolver& spectral)
        : du_(grad(u)), params_(params), a_(a), spectral_(spectral) {
        const GridSpec& g = u.grid();
        double sum = 0.0;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) sum += angle_curvature_bound(a, norm(du_.at(i, j)));
        }
        shift_ = sum / static_cast<double>(g.node_count());
        if (shift_ == 0.0) shift_ = params.kappa * discrete_dirichlet_eigenvalue(g);
    }

    double value(const ScalarField& alpha) override {
        const GridSpec& g = alpha.grid();
        std::vector<double> terms(g.cell_count());
        for (int j = -1; j < g.ny(); ++j) {
            for (int i = -1; i < g.nx(); ++i) {
                const std::size_t c = g.cell(i, j);
                terms[c] = a_.value(rotate(alpha.at(i, j), du_[c]));
            }
        }
        const VectorField da = grad(alpha);
        return 0.5 * params_.kappa * inner_l2(da, da) + pairwise_sum(terms) * g.cell_area();
    }

    ScalarField gradient(const ScalarField& alpha) override {
        const GridSpec& g = alpha.grid();
        ScalarField out = laplacian(alpha);
        out *= -params_.kappa;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                out(i, j) += gamma_angle_derivative(a_, alpha(i, j), du_.at(i, j));
            }
        }
        return out;
    }

    ScalarField precondition(const ScalarField& g) override {
        return spectral_.solve(g, shift_, params_.kappa);
    }

private:
    VectorField du_;
    const ModelParams& params_;
    const Anisotropy& a_;
    detail::SpectralSolver& spectral_;
    double shift_ = 0.0;
};

// u -> Psi(alpha, u), alpha frozen.
class IntensityBlock final : public detail::DescentProblem {
public:
    IntensityBlock(const ScalarField& alpha, const StepData& step, const ModelParams& params,
                   const Anisotropy& a, detail::SpectralSolver& spectral, const ScalarField& u_start)
        : alpha_(alpha), step_(step), params_(params), a_(a), spectral_(spectral) {
        const double m = max_gradient_norm(grad(u_start));
        coef_ = params.mu / params.tau + params.nu * (params.p - 1.0) * std::pow(m, params.p - 2.0);
        shift_ = 1.0 / params.tau + params.lambda;
    }

    double value(const ScalarField& u) override {
        return step_functional(alpha_, u, step_, params_, a_);
    }
    ScalarField gradient(const ScalarField& u) override {
        return grad_u_step(alpha_, u, step_, params_, a_);
    }
    ScalarField precondition(const ScalarField& g) override {
        return spectral_.solve(g, shift_, coef_);
    }

private:
    const ScalarField& alpha_;
    const StepData& step_;
    const ModelParams& params_;
    const Anisotropy& a_;
    detail::SpectralSolver& spectral_;
    double shift_ = 0.0;
    double coef_ = 0.0;
};

detail::DescentOptions block_options(const SolveConfig& cfg, double tol, int max_iter) {
    detail::DescentOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    opt.armijo_c = cfg.armijo_c;
    opt.backtrack = cfg.backtrack;
    opt.init_step = cfg.init_step;
    opt.memory = cfg.lbfgs_memory;
    return opt;
}

double stopping_threshold(const SolveConfig& cfg, const ScalarField& u, const ScalarField& alpha) {
    return cfg.tol_res * (1.0 + norm_h1(u) + norm_h1(alpha));
}

}  // namespace

// ---------------------------------------------------------------------------

OrientationResult solve_initial_orientation(const ScalarField& u0, const ModelParams& params,
                                            const Anisotropy& a, const SolveConfig& cfg,
                                            const std::optional<ScalarField>& initial) {
    params.validate();
    cfg.validate();
    require_finite(u0, "u0");
    ScalarField alpha0 = initial.value_or(ScalarField(u0.grid()));
    require_same_grid(u0.grid(), alpha0.grid());
    require_finite(alpha0, "initial alpha");

    detail::SpectralSolver spectral(u0.grid());
    OrientationBlock block(u0, params, a, spectral);
    const auto result =
        detail::descend(block, std::move(alpha0),
                        block_options(cfg, cfg.tol_res, cfg.max_inner * cfg.max_outer));

    OrientationResult out{result.x, {}};
    out.report.index = 0;
    out.report.inner_iterations = result.iterations;
    out.report.res_alpha = result.residual;
    out.report.tol_used = cfg.tol_res;
    if (!result.x.all_finite()) throw NumericError("orientation solve produced non-finite values");
    if (!result.converged) {
        throw ConvergenceError("initial orientation did not converge: |grad_alpha| = " +
                                   std::to_string(result.residual),
                               result.residual, 0.0);
    }
    return out;
}

MultistartResult solve_initial_orientation_multistart(const ScalarField& u0,
                                                      const ModelParams& params,
                                                      const Anisotropy& a, const SolveConfig& cfg,
                                                      int restarts, double amplitude,
                                                      std::uint64_t seed) {
    MultistartResult out{solve_initial_orientation(u0, params, a, cfg), {}, 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    for (int r = 0; r < restarts; ++r) {
        ScalarField start(u0.grid());
        for (double& v : start.values()) v = dist(rng);
        OrientationResult res = solve_initial_orientation(u0, params, a, cfg, start);
        out.max_spread = std::max(out.max_spread, norm_l2(res.alpha - out.best.alpha));
        out.minimizers.push_back(std::move(res.alpha));
    }
    return out;
}

StepResult minimize_step(const ScalarField& alpha_prev, const ScalarField& u_prev,
                         const ScalarField& u_org, const ModelParams& params, const Anisotropy& a,
                         const SolveConfig& cfg) {
    params.validate();
    cfg.validate();
    require_same_grid(alpha_prev.grid(), u_prev.grid());
    require_same_grid(alpha_prev.grid(), u_org.grid());
    require_finite(alpha_prev, "alpha");
    require_finite(u_prev, "u");
    require_finite(u_org, "u_org");

    const StepData step{u_prev, u_org};
    detail::SpectralSolver spectral(u_prev.grid());

    StepResult out{alpha_prev, u_prev, {}};
    StepReport& rep = out.report;
    rep.energy_before = energy(alpha_prev, u_prev, u_org, params, a);
    const double psi_start = rep.energy_before.total;
    rep.psi_trace.push_back(psi_start);

    bool done = false;
    for (int sweep = 0;; ++sweep) {
        const double tol = stopping_threshold(cfg, out.u, out.alpha);
        rep.tol_used = tol;
        rep.res_u = norm_l2(grad_u_step(out.alpha, out.u, step, params, a));
        rep.res_alpha = norm_l2(grad_alpha(out.alpha, out.u, params, a));
        if (rep.res_u <= tol && rep.res_alpha <= tol) {
            done = true;
            break;
        }
        if (sweep == cfg.max_outer) break;
        rep.outer_sweeps = sweep + 1;

        {
            IntensityBlock block(out.alpha, step, params, a, spectral, out.u);
            auto r = detail::descend(block, out.u, block_options(cfg, 0.5 * tol, cfg.max_inner));
            rep.inner_iterations += r.iterations;
            out.u = std::move(r.x);
        }
        {
            OrientationBlock block(out.u, params, a, spectral);
            auto r = detail::descend(block, out.alpha, block_options(cfg, 0.5 * tol, cfg.max_inner));
            rep.inner_iterations += r.iterations;
            out.alpha = std::move(r.x);
        }
        if (!out.u.all_finite() || !out.alpha.all_finite()) {
            throw NumericError("step produced non-finite values");
        }
        rep.psi_trace.push_back(step_functional(out.alpha, out.u, step, params, a));
    }
    if (!done) {
        throw ConvergenceError("step did not converge after " + std::to_string(cfg.max_outer) +
                                   " sweeps: res_alpha = " + std::to_string(rep.res_alpha) +
                                   ", res_u = " + std::to_string(rep.res_u),
                               rep.res_alpha, rep.res_u);
    }

    rep.energy_after = energy(out.alpha, out.u, u_org, params, a);
    const StepPenalty pen = step_penalty(out.u, u_prev, params);
    rep.dissipation_l2 = pen.l2;
    rep.dissipation_h1 = pen.h1;
    rep.ineq_slack =
        rep.energy_before.total - (rep.dissipation_l2 + rep.dissipation_h1 + rep.energy_after.total);
    const double psi_end = rep.energy_after.total + pen.l2 + pen.h1;
    if (psi_end > psi_start + cfg.tol_energy_rel * (1.0 + std::abs(psi_start))) {
        throw ConvergenceError("step increased Psi above its warm-start value", rep.res_alpha,
                               rep.res_u);
    }
    return out;
}

Trajectory run(const ScalarField& u0, const ScalarField& u_org, const ModelParams& params,
               const Anisotropy& a, const SolveConfig& cfg) {
    params.validate();
    cfg.validate();
    require_same_grid(u0.grid(), u_org.grid());
    require_unit_range(u_org, "A1", "u_org");
    require_unit_range(u0, "A3", "u0");
    const int m = params.steps();

    OrientationResult init = solve_initial_orientation(u0, params, a, cfg);
    std::vector<TrajectoryPoint> points;
    points.reserve(m + 1);
    init.report.energy_before = energy(init.alpha, u0, u_org, params, a);
    init.report.energy_after = init.report.energy_before;
    const double tol_energy = cfg.tol_energy_rel * (1.0 + init.report.energy_before.total);
    points.push_back({std::move(init.alpha), u0, std::move(init.report)});

    for (int i = 1; i <= m; ++i) {
        const TrajectoryPoint& prev = points.back();
        StepResult r = [&] {
            try {
                return minimize_step(prev.alpha, prev.u, u_org, params, a, cfg);
            } catch (const ConvergenceError& e) {
                throw ConvergenceError("step " + std::to_string(i) + ": " + e.what(), e.res_alpha(),
                                       e.res_u());
            } catch (const NumericError& e) {
                throw NumericError("step " + std::to_string(i) + ": " + e.what());
            }
        }();
        r.report.index = i;
        if (r.report.ineq_slack < -tol_energy) {
            throw NumericError("step " + std::to_string(i) + ": energy inequality violated by " +
                               std::to_string(-r.report.ineq_slack));
        }
        const double lo = r.u.min();
        const double hi = r.u.max();
        if (lo < -cfg.bound_tol || hi > 1.0 + cfg.bound_tol) {
            throw NumericError("step " + std::to_string(i) +
                               ": maximum principle violated, u in [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
        }
        points.push_back({std::move(r.alpha), std::move(r.u), std::move(r.report)});
    }
    return Trajectory(params, a, u_org, std::move(points));
}

// ---------------------------------------------------------------------------

Trajectory::Trajectory(ModelParams params, Anisotropy anisotropy, ScalarField u_org,
                       std::vector<TrajectoryPoint> points)
    : params_(params),
      anisotropy_(std::move(anisotropy)),
      u_org_(std::move(u_org)),
      points_(std::move(points)) {
    if (points_.empty()) throw DomainError("trajectory needs at least the initial point");
    for (const auto& pt : points_) {
        require_same_grid(u_org_.grid(), pt.u.grid());
        require_same_grid(u_org_.grid(), pt.alpha.grid());
    }
}

int Trajectory::interval(double t) const {
    const double T = steps() * params_.tau;
    if (!(t >= 0.0 && t <= T * (1.0 + 1e-12))) {
        throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
    }
    if (steps() == 0) return 0;
    const int i = static_cast<int>(std::ceil(t / params_.tau - 1e-9));
    return std::clamp(i, 1, steps());
}

const ScalarField& Trajectory::u_upper(double t) const {
    if (t <= 0.0) return points_.front().u;
    return points_[interval(t)].u;
}

const ScalarField& Trajectory::u_lower(double t) const {
    if (t <= 0.0) return points_.front().u;
    return points_[interval(t) - 1].u;
}

const ScalarField& Trajectory::alpha_upper(double t) const {
    if (t <= 0.0) return points_.front().alpha;
    return points_[interval(t)].alpha;
}

const ScalarField& Trajectory::alpha_lower(double t) const {
    if (t <= 0.0) return points_.front().alpha;
    return points_[interval(t) - 1].alpha;
}

ScalarField Trajectory::u_linear(double t) const {
    const int i = interval(t);
    if (i == 0) return points_.front().u;
    const double theta = (t - time(i - 1)) / params_.tau;
    ScalarField out = (1.0 - theta) * points_[i - 1].u;
    out.axpy(theta, points_[i].u);
    return out;
}

ScalarField Trajectory::alpha_linear(double t) const {
    const int i = interval(t);
    if (i == 0) return points_.front().alpha;
    const double theta = (t - time(i - 1)) / params_.tau;
    ScalarField out = (1.0 - theta) * points_[i - 1].alpha;
    out.axpy(theta, points_[i].alpha);
    return out;
}

ScalarField Trajectory::u_rate(double t) const {
    const int i = interval(t);
    if (i == 0) return ScalarField(grid());
    ScalarField out = points_[i].u - points_[i - 1].u;
    out *= 1.0 / params_.tau;
    return out;
}

std::vector<EnergyTraceRow> Trajectory::energy_trace() const {
    std::vector<EnergyTraceRow> rows;
    rows.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const StepReport& r = points_[i].report;
        rows.push_back({static_cast<int>(i), time(static_cast<int>(i)), r.energy_after,
                        r.dissipation_l2, r.dissipation_h1, r.ineq_slack, r.res_alpha, r.res_u});
    }
    return rows;
}

// ---------------------------------------------------------------------------

SystemResiduals residuals_S(const Trajectory& traj, double t, std::uint64_t seed) {
    const ModelParams& prm = traj.params();
    const Anisotropy& a = traj.anisotropy();
    const ScalarField alpha = traj.alpha_linear(t);
    const ScalarField u = traj.u_linear(t);
    const ScalarField rate = traj.u_rate(t);
    const GridSpec& g = u.grid();

    SystemResiduals out;
    out.res_S1 = norm_l2(grad_alpha(alpha, u, prm, a));

    // Identity form of the u-condition: rate - mu lap(rate) + dE/du.
    ScalarField identity = grad_u_energy(alpha, u, traj.u_org(), prm, a);
    identity += rate;
    identity.axpy(-prm.mu, laplacian(rate));
    out.res_S2_identity = norm_l2(identity);

    const VectorField du = grad(u);
    const VectorField drate = grad(rate);
    VectorField pflux(g);
    std::vector<double> gamma_u(g.cell_count());
    for (int j = -1; j < g.ny(); ++j) {
        for (int i = -1; i < g.nx(); ++i) {
            const std::size_t c = g.cell(i, j);
            const Vec2 w = du[c];
            pflux.set(c, prm.nu * std::pow(w.x * w.x + w.y * w.y, 0.5 * (prm.p - 2.0)) * w);
            gamma_u[c] = a.value(rotate(alpha.at(i, j), w));
        }
    }
    const double gamma_sum_u = pairwise_sum(gamma_u) * g.cell_area();
    ScalarField misfit = u - traj.u_org();

    // (rate, u - psi) + lambda (u - u_org, u - psi) + mu (grad rate, grad(u - psi))
    //   + nu (|grad u|^{p-2} grad u, grad(u - psi)) + Gamma(u) - Gamma(psi) <= 0
    auto violation = [&](const ScalarField& psi) {
        const ScalarField diff = u - psi;
        const VectorField ddiff = grad(diff);
        const VectorField dpsi = grad(psi);
        std::vector<double> gamma_psi(g.cell_count());
        for (int j = -1; j < g.ny(); ++j) {
            for (int i = -1; i < g.nx(); ++i) {
                const std::size_t c = g.cell(i, j);
                gamma_psi[c] = a.value(rotate(alpha.at(i, j), dpsi[c]));
            }
        }
        out.probe_norm = std::max(out.probe_norm, norm_l2(diff));
        return inner_l2(rate, diff) + prm.lambda * inner_l2(misfit, diff) +
               prm.mu * inner_l2(drate, ddiff) + inner_l2(pflux, ddiff) + gamma_sum_u -
               pairwise_sum(gamma_psi) * g.cell_area();
    };

    double worst = violation(u);
    worst = std::max(worst, violation(ScalarField(g)));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int r = 0; r < 3; ++r) {
        ScalarField psi(g);
        for (double& v : psi.values()) v = unit(rng);
        worst = std::max(worst, violation(psi));
    }
    // Probes along the residual direction expose a nonzero identity residual.
    if (out.res_S2_identity > 0.0) {
        const ScalarField dir = (1.0 / out.res_S2_identity) * identity;
        for (int k = 1; k <= 12; ++k) {
            ScalarField psi = u;
            psi.axpy(-std::pow(10.0, -k), dir);
            worst = std::max(worst, violation(psi));
        }
    }
    out.res_S2_slack = std::max(0.0, worst);
    return out;
}

}  // namespace anisoflow
