#include "anisoflow/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "anisoflow/solver.hpp"

namespace anisoflow {
namespace {

using Rng = std::mt19937_64;

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

ScalarField random_field(const GridSpec& g, Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    ScalarField f(g);
    for (double& v : f.values()) v = d(rng);
    return f;
}

VectorField random_vector_field(const GridSpec& g, Rng& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField v(g);
    for (std::size_t k = 0; k < v.size(); ++k) v.set(k, {d(rng), d(rng)});
    return v;
}

std::vector<Anisotropy> families() {
    return {Anisotropy::smoothed_l1(0.3), Anisotropy::smoothed_ngon(3, 0.2),
            Anisotropy::smoothed_euclid(0.25)};
}

SelftestItem check_adjointness(Rng& rng) {
    std::uniform_int_distribution<int> size(2, 12);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        GridSpec g(size(rng), size(rng), 0.1 + 0.05 * (trial % 3), 0.1);
        ScalarField f = random_field(g, rng, -1.0, 1.0);
        VectorField v = random_vector_field(g, rng);
        const double gap = std::abs(inner_l2(grad(f), v) + inner_l2(f, div(v)));
        const double nv = std::sqrt(inner_l2(v, v));
        worst = std::max(worst, gap / (norm_l2(f) * nv));
    }
    return {"grad/div adjointness", worst <= 1e-12, "worst relative gap " + sci(worst)};
}

SelftestItem check_laplacian(Rng& rng) {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        GridSpec g(3 + trial, 5, 0.2, 0.15);
        ScalarField f = random_field(g, rng, -1.0, 1.0);
        ScalarField diff = laplacian(f) - div(grad(f));
        worst = std::max(worst, norm_l2(diff) / norm_l2(laplacian(f)));
    }
    return {"laplacian = div grad", worst <= 1e-12, "worst relative gap " + sci(worst)};
}

double relative_gap(double fd, double an) {
    return std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-300});
}

SelftestItem check_gradients(Rng& rng) {
    const double eps = 1e-6;
    double worst = 0.0;
    GridSpec g = GridSpec::unit_square(6, 6);
    for (const Anisotropy& a : families()) {
        for (double p : {2.5, 3.0, 4.0}) {
            ModelParams params;
            params.kappa = 0.7;
            params.mu = 0.3;
            params.nu = 0.5;
            params.lambda = 1.3;
            params.p = p;
            params.tau = 0.1;
            const ScalarField alpha = random_field(g, rng, -1.0, 1.0);
            const ScalarField u = random_field(g, rng, 0.0, 1.0);
            const StepData step{random_field(g, rng, 0.0, 1.0), random_field(g, rng, 0.0, 1.0)};
            const ScalarField phi = random_field(g, rng, -1.0, 1.0);

            const double an_a = inner_l2(grad_alpha(alpha, u, params, a), phi);
            ScalarField ap = alpha, am = alpha;
            ap.axpy(eps, phi);
            am.axpy(-eps, phi);
            const double fd_a = (energy(ap, u, step.u_org, params, a).total -
                                 energy(am, u, step.u_org, params, a).total) / (2.0 * eps);
            worst = std::max(worst, relative_gap(fd_a, an_a));

            const double an_u = inner_l2(grad_u_step(alpha, u, step, params, a), phi);
            ScalarField up = u, um = u;
            up.axpy(eps, phi);
            um.axpy(-eps, phi);
            const double fd_u = (step_functional(alpha, up, step, params, a) -
                                 step_functional(alpha, um, step, params, a)) / (2.0 * eps);
            worst = std::max(worst, relative_gap(fd_u, an_u));
        }
    }
    return {"energy gradients vs central differences", worst <= 1e-5,
            "worst relative error " + sci(worst)};
}

SelftestItem check_fixed_point() {
    GridSpec g = GridSpec::unit_square(6, 5);
    ScalarField zero(g);
    ModelParams params;
    params.tau = 0.25;
    params.t_final = 1.0;
    Trajectory traj = run(zero, zero, params, Anisotropy::smoothed_l1(0.1), SolveConfig{});
    bool exact = true;
    for (const auto& pt : traj.points()) {
        for (double v : pt.u.values()) exact = exact && v == 0.0;
        for (double v : pt.alpha.values()) exact = exact && v == 0.0;
    }
    for (const auto& row : traj.energy_trace()) exact = exact && row.energy.total == 0.0;
    return {"zero data is a fixed point", exact, exact ? "trajectory identically zero" : "nonzero value found"};
}

SelftestItem check_anisotropies() {
    bool pass = true;
    std::string detail;
    for (const Anisotropy& a : families()) {
        const A2Report rep = verify_A2(a, 2000, 11);
        pass = pass && rep.all_pass();
        if (!detail.empty()) detail += ", ";
        detail += std::string(to_string(a.family())) + (rep.all_pass() ? " ok" : " FAILED");
    }
    return {"anisotropy assumptions", pass, detail};
}

SelftestItem check_energy_inequality(Rng& rng) {
    GridSpec g = GridSpec::unit_square(8, 8);
    ScalarField u0 = random_field(g, rng, 0.0, 1.0);
    ModelParams params;
    params.kappa = 2.0;
    params.mu = 1e-3;
    params.nu = 1e-2;
    params.lambda = 5.0;
    params.tau = 0.02;
    params.t_final = 0.06;
    SolveConfig cfg;
    Trajectory traj = run(u0, u0, params, Anisotropy::smoothed_ngon(3, 0.2), cfg);
    const double tol = cfg.tol_energy_rel * (1.0 + traj.points().front().report.energy_after.total);
    double worst = traj.points().at(1).report.ineq_slack;
    for (std::size_t i = 2; i < traj.points().size(); ++i)
        worst = std::min(worst, traj.points()[i].report.ineq_slack);
    return {"per-step energy inequality", worst >= -tol, "smallest slack " + sci(worst)};
}

}  // namespace

SelftestReport run_selftest(std::uint64_t seed) {
    Rng rng(seed);
    SelftestReport report;
    auto guarded = [&](const char* name, auto&& fn) {
        try {
            report.items.push_back(fn());
        } catch (const std::exception& e) {
            report.items.push_back({name, false, e.what()});
        }
    };
    guarded("grad/div adjointness", [&] { return check_adjointness(rng); });
    guarded("laplacian = div grad", [&] { return check_laplacian(rng); });
    guarded("energy gradients vs central differences", [&] { return check_gradients(rng); });
    guarded("zero data is a fixed point", [&] { return check_fixed_point(); });
    guarded("anisotropy assumptions", [&] { return check_anisotropies(); });
    guarded("per-step energy inequality", [&] { return check_energy_inequality(rng); });
    return report;
}

}  // namespace anisoflow
