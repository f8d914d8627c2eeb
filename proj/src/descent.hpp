#pragma once

// Monotone descent with Armijo backtracking for one block of unknowns. The
// search direction is the limited-memory BFGS direction built on top of a
// problem-supplied preconditioner; with memory 0 it is plain preconditioned
// gradient descent.

#include <deque>

#include "anisoflow/grid.hpp"

namespace anisoflow::detail {

class DescentProblem {
public:
    virtual ~DescentProblem() = default;
    virtual double value(const ScalarField& x) = 0;
    virtual ScalarField gradient(const ScalarField& x) = 0;
    /// Approximate inverse Hessian applied to g.
    virtual ScalarField precondition(const ScalarField& g) = 0;
};

struct DescentOptions {
    double tol = 1e-8;
    int max_iter = 500;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double init_step = 1.0;
    int memory = 8;
};

struct DescentResult {
    ScalarField x;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

DescentResult descend(DescentProblem& problem, ScalarField x0, const DescentOptions& opt);

}  // namespace anisoflow::detail
