#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qmoo/common.hpp"

namespace qmoo {

/// Thrown by an objective (or the internal call counter) to halt the search;
/// powell_minimize catches it and returns the best point seen so far.
struct BudgetExhausted {};

struct PowellOptions {
    double xtol = 1e-4;          // relative line-search tolerance
    double ftol = 1e-4;          // relative per-sweep improvement tolerance
    int max_iterations = 1000;   // outer direction-set sweeps
    long max_fcalls = 0;         // objective-call cap, 0 = unlimited
};

struct PowellResult {
    std::vector<double> x;       // best point seen (not just last iterate)
    double fx = 0.0;
    long n_calls = 0;
    bool converged = false;
    bool budget_exhausted = false;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Powell's conjugate-direction method: cyclic Brent line minimizations over
/// a direction set, replacing the direction of largest decrease with the
/// net sweep displacement when the standard extrapolation test passes.
/// Derivative-free; tolerates flat plateaus and noisy objectives (it simply
/// stops improving). Non-convergence returns best-so-far with
/// converged=false.
PowellResult powell_minimize(const ObjectiveFn& objective, std::vector<double> x0,
                             const PowellOptions& options = {});

}  // namespace qmoo
