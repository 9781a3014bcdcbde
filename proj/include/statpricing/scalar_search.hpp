#pragma once

#include <cmath>
#include <utility>

namespace statpricing {

struct ScalarMax {
    double arg = 0.0;
    double value = 0.0;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
ScalarMax golden_section_max(F&& f, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? ScalarMax{x1, f1} : ScalarMax{x2, f2};
}

/**
 * Uniform scan of `points` nodes over [lo, hi], then golden-section refinement
 * on the two cells around the best node. The scanned best is kept if the
 * refinement does not beat it, so the result never loses to the grid.
 */
template <class F>
ScalarMax grid_refine_max(F&& f, double lo, double hi, int points, double tol) {
    const double step = (hi - lo) / static_cast<double>(points - 1);
    ScalarMax best{lo, f(lo)};
    int best_k = 0;
    for (int k = 1; k < points; ++k) {
        const double x = k == points - 1 ? hi : lo + step * k;
        const double v = f(x);
        if (v > best.value) {
            best = {x, v};
            best_k = k;
        }
    }
    const double a = best_k == 0 ? lo : lo + step * (best_k - 1);
    const double b = best_k == points - 1 ? hi : lo + step * (best_k + 1);
    const ScalarMax refined = golden_section_max(f, a, b, tol);
    return refined.value > best.value ? refined : best;
}

}  // namespace statpricing
