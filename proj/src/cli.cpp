#include "anisoflow/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

#include "anisoflow/io.hpp"
#include "anisoflow/selftest.hpp"

namespace anisoflow {
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

struct Inputs {
    RunConfig cfg;
    ScalarField u_org;
    ScalarField u0;
};

Inputs load_inputs(const std::string& config_path, const std::string& u0_override,
                   const std::string& output_override) {
    RunConfig cfg = load_config(config_path);
    if (!u0_override.empty()) cfg.u0 = u0_override;
    if (!output_override.empty()) cfg.output_dir = output_override;
    cfg.validate();

    ScalarField u_org = field_from_image(load_pgm(cfg.input));
    ScalarField u0 = u_org;
    if (!cfg.u0.empty()) {
        u0 = field_from_image(load_pgm(cfg.u0));
        if (!(u0.grid() == u_org.grid()))
            throw ValidationError("A3", "u0 image size differs from the input image");
    }
    require_unit_range(u_org, "A1", "u_org");
    require_unit_range(u0, "A3", "u0");
    return {std::move(cfg), std::move(u_org), std::move(u0)};
}

fs::path prepare_output(const RunConfig& cfg) {
    fs::path dir = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

ConditionReport conditions_for(const Inputs& in) {
    const Anisotropy a = in.cfg.anisotropy();
    ConditionReport rep = compute_conditions(in.cfg.model, a, in.u0, in.u_org, in.cfg.embeddings(in.u0.grid()));
    if (in.cfg.gamma_w1inf) {
        ConditionInputs ci = rep.inputs;
        ci.gamma_w1inf = *in.cfg.gamma_w1inf;
        rep = conditions_from_inputs(ci);
    }
    return rep;
}

void write_orientation(const ScalarField& alpha, const fs::path& dir, const std::string& stem) {
    OrientationImage oi = orientation_image(alpha);
    save_pgm(oi.image, dir / (stem + ".pgm"));
    write_file_atomic(dir / (stem + ".range"), format_range_sidecar(oi.min, oi.max));
}

std::string describe_setup(const Inputs& in) {
    const ModelParams& m = in.cfg.model;
    const SolveConfig& s = in.cfg.solver;
    const Anisotropy a = in.cfg.anisotropy();
    std::ostringstream os;
    os << "grid " << in.u0.grid().nx() << " x " << in.u0.grid().ny() << ", h = " << fmt(in.u0.grid().hx()) << "\n"
       << "kappa " << fmt(m.kappa) << "\nmu " << fmt(m.mu) << "\nnu " << fmt(m.nu) << "\nlambda " << fmt(m.lambda)
       << "\np " << fmt(m.p) << "\ntau " << fmt(m.tau) << "\nt_final " << fmt(m.t_final) << "\nsteps "
       << m.steps() << "\n"
       << "anisotropy " << to_string(a.family()) << ", epsilon " << fmt(a.epsilon()) << ", directions "
       << a.n_dirs() << "\n"
       << "tol_res " << fmt(s.tol_res) << ", max_outer " << s.max_outer << ", max_inner " << s.max_inner
       << ", lbfgs_memory " << s.lbfgs_memory << "\n"
       << "u0 " << (in.cfg.u0.empty() ? "= u_org" : "from separate image") << "\n";
    return os.str();
}

int cmd_denoise(const std::string& config, const std::string& u0, const std::string& output, std::ostream& out) {
    Inputs in = load_inputs(config, u0, output);
    const fs::path dir = prepare_output(in.cfg);
    const Anisotropy a = in.cfg.anisotropy();
    const ConditionReport cond = conditions_for(in);
    Trajectory traj = run(in.u0, in.u_org, in.cfg.model, a, in.cfg.solver);

    const auto& last = traj.points().back();
    save_pgm(image_from_field(last.u), dir / "u_final.pgm");
    write_orientation(last.alpha, dir, "alpha_final");
    const auto rows = traj.energy_trace();
    write_file_atomic(dir / "energy_trace.csv", format_energy_trace_csv(rows));

    std::ostringstream rep;
    rep << describe_setup(in) << "\n";
    double worst_slack = 0.0, u_min = 1.0, u_max = 0.0;
    int sweeps = 0;
    for (const auto& pt : traj.points()) {
        u_min = std::min(u_min, pt.u.min());
        u_max = std::max(u_max, pt.u.max());
    }
    rep << "step  sweeps  inner  res_alpha  res_u  tol  slack\n";
    for (std::size_t i = 0; i < traj.points().size(); ++i) {
        const StepReport& r = traj.points()[i].report;
        if (i > 0) {
            worst_slack = i == 1 ? r.ineq_slack : std::min(worst_slack, r.ineq_slack);
            sweeps += r.outer_sweeps;
        }
        rep << r.index << " " << r.outer_sweeps << " " << r.inner_iterations << " " << fmt(r.res_alpha) << " "
            << fmt(r.res_u) << " " << fmt(r.tol_used) << " " << fmt(r.ineq_slack) << "\n";
    }
    rep << "\nE(alpha^0, u0) " << fmt(rows.front().energy.total) << "\nE final " << fmt(rows.back().energy.total)
        << "\nsmallest energy-inequality slack " << fmt(worst_slack) << "\nmin u " << fmt(u_min) << "\nmax u "
        << fmt(u_max) << "\ntotal sweeps " << sweeps << "\n"
        << "kappa > kappa_hat " << (cond.kappa_ok ? "yes" : "no") << " (kappa_hat " << fmt(cond.kappa_hat)
        << ")\ntau < tau_hat " << (cond.tau_ok ? "yes" : "no") << " (tau_hat " << fmt(cond.tau_hat) << ")\n"
        << "residual acceptance: |grad| <= tol_res (1 + |u|_H1 + |alpha|_H1) and Psi not above warm start\n";
    write_file_atomic(dir / "run_report.txt", rep.str());

    out << "denoise: " << traj.steps() << " steps, E " << fmt(rows.front().energy.total) << " -> "
        << fmt(rows.back().energy.total) << ", outputs in " << dir.string() << "\n";
    return exit_ok;
}

int cmd_init_orientation(const std::string& config, const std::string& u0, const std::string& output,
                         int restarts, double amplitude, std::uint64_t seed, std::ostream& out) {
    Inputs in = load_inputs(config, u0, output);
    const fs::path dir = prepare_output(in.cfg);
    const Anisotropy a = in.cfg.anisotropy();
    std::ostringstream rep;
    rep << describe_setup(in) << "\n";
    auto solve = [&]() -> OrientationResult {
        if (restarts == 0) return solve_initial_orientation(in.u0, in.cfg.model, a, in.cfg.solver);
        MultistartResult ms = solve_initial_orientation_multistart(in.u0, in.cfg.model, a, in.cfg.solver,
                                                                   restarts, amplitude, seed);
        rep << "restarts " << restarts << ", amplitude " << fmt(amplitude) << ", seed " << seed
            << "\nlargest L2 distance to the alpha = 0 start " << fmt(ms.max_spread) << "\n";
        return ms.best;
    };
    const OrientationResult res = solve();
    const ConditionReport cond = conditions_for(in);
    rep << "residual |grad_alpha|_L2 " << fmt(res.report.res_alpha) << "\ntolerance " << fmt(res.report.tol_used)
        << "\niterations " << res.report.inner_iterations << "\nalpha min " << fmt(res.alpha.min())
        << "\nalpha max " << fmt(res.alpha.max()) << "\nuniqueness bound " << fmt(cond.alpha0_unique_bound)
        << " (kappa above it: " << (cond.alpha0_unique ? "yes" : "no") << ")\n";
    write_orientation(res.alpha, dir, "alpha0");
    write_file_atomic(dir / "alpha0_report.txt", rep.str());
    out << "init-orientation: residual " << fmt(res.report.res_alpha) << ", outputs in " << dir.string() << "\n";
    return exit_ok;
}

int cmd_check_conditions(const std::string& config, const std::string& u0, const std::string& output,
                         std::ostream& out) {
    Inputs in = load_inputs(config, u0, output);
    const fs::path dir = prepare_output(in.cfg);
    const ConditionReport rep = conditions_for(in);
    const std::string text = format_conditions_text(rep);
    write_file_atomic(dir / "conditions.txt", text);
    write_file_atomic(dir / "conditions.csv", format_conditions_csv(rep));
    out << text;
    return exit_ok;
}

int cmd_twin_run(const std::string& config, const std::string& u0, const std::string& output, double delta,
                 std::ostream& out) {
    Inputs in = load_inputs(config, u0, output);
    if (!(std::abs(delta) > 0.0 && std::abs(delta) <= 0.25))
        throw ValidationError("A3", "--perturb must satisfy 0 < |delta| <= 0.25 to keep u0 in [0, 1]");
    const fs::path dir = prepare_output(in.cfg);
    const Anisotropy a = in.cfg.anisotropy();
    const ScalarField u0_b = perturb_initial_data(in.u0, delta);
    TwinRunResult tr = twin_run(in.u0, u0_b, in.u_org, in.cfg.model, a, in.cfg.solver,
                                in.cfg.embeddings(in.u0.grid()));
    write_file_atomic(dir / "j_trace.csv", format_jtrace_csv(tr.trace));
    std::ostringstream rep;
    rep << describe_setup(in) << "\nperturbation " << fmt(delta) << "\nJ(0) " << fmt(tr.trace.j_values.front())
        << "\nsup J " << fmt(*std::max_element(tr.trace.j_values.begin(), tr.trace.j_values.end()))
        << "\nstability_ratio " << fmt(tr.stability_ratio) << "\nkappa_hat " << fmt(tr.conditions.kappa_hat)
        << "\ncertified " << (tr.certified ? "yes" : "no (kappa <= kappa_hat)") << "\n";
    write_file_atomic(dir / "twin_report.txt", rep.str());
    out << "twin-run: stability_ratio " << fmt(tr.stability_ratio)
        << (tr.certified ? "" : " (not certified: kappa <= kappa_hat)") << "\n";
    return exit_ok;
}

int cmd_selftest(std::ostream& out) {
    const SelftestReport rep = run_selftest();
    for (const auto& it : rep.items)
        out << (it.pass ? "PASS " : "FAIL ") << it.name << ": " << it.detail << "\n";
    out << (rep.all_pass() ? "selftest passed\n" : "selftest FAILED\n");
    return rep.all_pass() ? exit_ok : exit_convergence;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orientation-adaptive anisotropic image denoising"};
    app.require_subcommand(1);

    std::string config, u0, output;
    int restarts = 0;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    double delta = 0.0;

    auto with_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config, "configuration file")->required();
        sub->add_option("--u0", u0, "initial image (default: the input image)");
        sub->add_option("-o,--output", output, "output directory (overrides output_dir)");
    };
    auto* denoise = app.add_subcommand("denoise", "run the full time-stepping scheme");
    with_config(denoise);
    auto* init = app.add_subcommand("init-orientation", "compute only the initial orientation");
    with_config(init);
    init->add_option("--multistart", restarts, "random restarts for the uniqueness diagnostic")
        ->check(CLI::NonNegativeNumber);
    init->add_option("--amplitude", amplitude, "restart amplitude (radians)")->check(CLI::PositiveNumber);
    init->add_option("--seed", seed, "restart seed");
    auto* check = app.add_subcommand("check-conditions", "evaluate the largeness conditions");
    with_config(check);
    auto* twin = app.add_subcommand("twin-run", "continuous-dependence experiment");
    with_config(twin);
    twin->add_option("--perturb", delta, "perturbation magnitude delta")->required();
    auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

    std::ostringstream cli_out, cli_err;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, cli_out, cli_err);
        out << cli_out.str();
        err << cli_err.str();
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (denoise->parsed()) return cmd_denoise(config, u0, output, out);
        if (init->parsed()) return cmd_init_orientation(config, u0, output, restarts, amplitude, seed, out);
        if (check->parsed()) return cmd_check_conditions(config, u0, output, out);
        if (twin->parsed()) return cmd_twin_run(config, u0, output, delta, out);
        if (self->parsed()) return cmd_selftest(out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return exit_validation;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << "\n";
        return exit_convergence;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_convergence;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const Error& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_validation;
}

}  // namespace anisoflow
