#include "statpricing/box_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace statpricing {

namespace {

class Objective {
public:
    Objective(const std::function<double(std::span<const double>)>& f, const BoxSearchOptions& opts)
        : f_(f), opts_(opts) {}

    double value(std::span<const double> x) {
        ++evaluations;
        return f_(x);
    }

    void gradient(std::vector<double>& x, double fx, std::vector<double>& g) {
        const double h = opts_.fd_step;
        g.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            const bool can_down = xi - h >= opts_.lower;
            const bool can_up = xi + h <= opts_.upper;
            if (can_down && can_up) {
                x[i] = xi + h;
                const double up = value(x);
                x[i] = xi - h;
                const double down = value(x);
                g[i] = (up - down) / (2.0 * h);
            } else if (can_up) {
                x[i] = xi + h;
                g[i] = (value(x) - fx) / h;
            } else {
                x[i] = xi - h;
                g[i] = (fx - value(x)) / h;
            }
            x[i] = xi;
        }
    }

    int evaluations = 0;

private:
    const std::function<double(std::span<const double>)>& f_;
    const BoxSearchOptions& opts_;
};

void reset_identity(std::vector<double>& h, std::size_t n) {
    h.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
}

}  // namespace

BoxSearchResult projected_bfgs_maximize(const std::function<double(std::span<const double>)>& f,
                                        std::vector<double> x, const BoxSearchOptions& opts) {
    if (!(opts.upper > opts.lower)) throw std::invalid_argument("box search: empty box");
    const std::size_t n = x.size();
    const double range = opts.upper - opts.lower;
    for (double& v : x) v = std::clamp(v, opts.lower, opts.upper);

    Objective obj(f, opts);
    BoxSearchResult result;
    double fx = obj.value(x);
    if (n == 0) {
        result.x = std::move(x);
        result.value = fx;
        result.converged = true;
        result.evaluations = obj.evaluations;
        return result;
    }

    std::vector<double> g, gn, d(n), xn(n), s(n), y(n), hy(n);
    std::vector<char> free_var(n);
    std::vector<double> inv_hessian;
    reset_identity(inv_hessian, n);
    bool identity = true;
    bool scaled = false;
    int small_changes = 0;
    obj.gradient(x, fx, g);

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        double pg = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool pinned = (x[i] <= opts.lower && g[i] < 0.0) || (x[i] >= opts.upper && g[i] > 0.0);
            free_var[i] = !pinned;
            if (!pinned) pg = std::max(pg, std::abs(g[i]));
        }
        if (pg * range <= opts.tolerance * std::max(1.0, std::abs(fx))) {
            result.converged = true;
            break;
        }

        auto steepest = [&] {
            for (std::size_t i = 0; i < n; ++i) d[i] = free_var[i] ? g[i] : 0.0;
        };
        if (identity) {
            steepest();
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                if (free_var[i]) {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (free_var[j]) acc += inv_hessian[i * n + j] * g[j];
                    }
                }
                d[i] = acc;
            }
            double slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
            if (!(slope > 0.0)) {
                reset_identity(inv_hessian, n);
                identity = true;
                scaled = false;
                steepest();
            }
        }

        double dmax = 0.0;
        for (double v : d) dmax = std::max(dmax, std::abs(v));
        double alpha = 1.0;
        if (identity && dmax > 0.0) alpha = 0.1 * range / dmax;
        else if (dmax * alpha > 0.5 * range) alpha = 0.5 * range / dmax;

        bool accepted = false;
        double fn = fx;
        for (int ls = 0; ls < 80; ++ls) {
            double gain = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) {
                xn[i] = std::clamp(x[i] + alpha * d[i], opts.lower, opts.upper);
                s[i] = xn[i] - x[i];
                gain += g[i] * s[i];
                moved = moved || s[i] != 0.0;
            }
            if (!moved) break;
            fn = obj.value(xn);
            if (fn >= fx + 1e-4 * gain && fn >= fx) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (!identity) {
                reset_identity(inv_hessian, n);
                identity = true;
                scaled = false;
                continue;
            }
            result.converged = true;
            break;
        }

        obj.gradient(xn, fn, gn);
        // Curvature pair for the minimization of -f, restricted to free variables.
        double sy = 0.0;
        double yy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = free_var[i] ? -(gn[i] - g[i]) : 0.0;
            if (!free_var[i]) s[i] = 0.0;
            sy += s[i] * y[i];
            yy += y[i] * y[i];
        }
        if (sy > 1e-300 && yy > 0.0) {
            if (!scaled) {
                reset_identity(inv_hessian, n);
                for (std::size_t i = 0; i < n; ++i) inv_hessian[i * n + i] = sy / yy;
                scaled = true;
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += inv_hessian[i * n + j] * y[j];
                hy[i] = acc;
            }
            double yhy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yhy += y[i] * hy[i];
            const double coef = (1.0 + rho * yhy) * rho;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    inv_hessian[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
            identity = false;
        }

        const double change = fn - fx;
        x.swap(xn);
        g.swap(gn);
        fx = fn;
        if (change <= opts.tolerance * std::max(1.0, std::abs(fx))) {
            if (++small_changes >= 2) {
                result.converged = true;
                ++it;
                break;
            }
        } else {
            small_changes = 0;
        }
    }

    result.x = std::move(x);
    result.value = fx;
    result.iterations = it;
    result.evaluations = obj.evaluations;
    return result;
}

}  // namespace statpricing
