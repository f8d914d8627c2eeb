#include "descent.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace anisoflow::detail {

namespace {

struct CurvaturePair {
    ScalarField s;
    ScalarField y;
    double rho;
};

ScalarField lbfgs_direction(DescentProblem& problem, const ScalarField& g,
                            const std::deque<CurvaturePair>& pairs) {
    ScalarField q = g;
    std::vector<double> a(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
        a[k] = pairs[k].rho * inner_l2(pairs[k].s, q);
        q.axpy(-a[k], pairs[k].y);
    }
    ScalarField r = problem.precondition(q);
    if (!pairs.empty()) {
        const CurvaturePair& last = pairs.back();
        const double yhy = inner_l2(last.y, problem.precondition(last.y));
        if (yhy > 0.0) r *= 1.0 / (last.rho * yhy);
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double b = pairs[k].rho * inner_l2(pairs[k].y, r);
        r.axpy(a[k] - b, pairs[k].s);
    }
    r *= -1.0;
    return r;
}

}  // namespace

DescentResult descend(DescentProblem& problem, ScalarField x0, const DescentOptions& opt) {
    DescentResult out{std::move(x0)};
    ScalarField& x = out.x;
    double f = problem.value(x);
    ScalarField g = problem.gradient(x);
    double res = norm_l2(g);
    std::deque<CurvaturePair> pairs;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    int it = 0;
    for (; it < opt.max_iter && res > opt.tol; ++it) {
        ScalarField d = lbfgs_direction(problem, g, pairs);
        double slope = inner_l2(g, d);
        if (!(slope < 0.0)) {
            pairs.clear();
            d = problem.precondition(g);
            d *= -1.0;
            slope = inner_l2(g, d);
            if (!(slope < 0.0)) break;
        }

        // Below this level differences of f are rounding noise.
        const double noise = 64.0 * eps * std::abs(f);
        double step = opt.init_step;
        bool accepted = false;
        ScalarField x_new = x;
        double f_new = f;
        for (int bt = 0; bt < 60; ++bt) {
            x_new = x;
            x_new.axpy(step, d);
            f_new = problem.value(x_new);
            if (std::isfinite(f_new) && f_new <= f + opt.armijo_c * step * slope + noise) {
                accepted = true;
                break;
            }
            step *= opt.backtrack;
        }
        if (!accepted) {
            if (pairs.empty()) break;
            pairs.clear();
            continue;
        }

        ScalarField g_new = problem.gradient(x_new);
        ScalarField s = x_new - x;
        ScalarField y = g_new - g;
        const double sy = inner_l2(s, y);
        if (sy > 1e-12 * norm_l2(s) * norm_l2(y)) {
            pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (static_cast<int>(pairs.size()) > opt.memory) pairs.pop_front();
        }
        if (opt.memory == 0) pairs.clear();
        x = std::move(x_new);
        f = f_new;
        g = std::move(g_new);
        res = norm_l2(g);
    }
    out.value = f;
    out.residual = res;
    out.iterations = it;
    out.converged = res <= opt.tol;
    return out;
}

}  // namespace anisoflow::detail
