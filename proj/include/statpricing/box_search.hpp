#pragma once

#include <functional>
#include <span>
#include <vector>

namespace statpricing {

struct BoxSearchOptions {
    double lower = 0.0;
    double upper = 1.0;
    /// Finite-difference step; central where the box allows, one-sided at a bound.
    double fd_step = 1e-6;
    /// Stop after two consecutive objective changes below tolerance * max(1, |f|).
    double tolerance = 1e-10;
    int max_iterations = 5000;
};

struct BoxSearchResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/**
 * Projected quasi-Newton maximization of a smooth function over a box.
 *
 * Gradients come from finite differences. Variables sitting on a bound with
 * the gradient pushing outward are frozen for the step; the remaining ones take
 * a BFGS direction followed by a projected Armijo backtrack. The inverse
 * Hessian is reset to identity whenever the direction fails to ascend.
 */
BoxSearchResult projected_bfgs_maximize(const std::function<double(std::span<const double>)>& f,
                                        std::vector<double> x0, const BoxSearchOptions& opts);

}  // namespace statpricing
