#include "statpricing/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "statpricing/box_search.hpp"
#include "statpricing/rng.hpp"

namespace statpricing {

namespace {

std::size_t initial_states(const QueueInstance& inst, const SolverConfig& cfg) {
    if (cfg.truncation.mode == TruncationRule::Mode::Fixed) return cfg.truncation.states;
    return static_cast<std::size_t>(inst.servers) + 8;
}

std::size_t grow_states(std::size_t m, const SolverConfig& cfg) {
    const auto grown = std::max(m + 4, static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(m))));
    return std::min(grown, cfg.max_states);
}

struct ViOutcome {
    std::vector<double> h;
    std::vector<double> rates;
    bool converged = false;
    int iterations = 0;
    double gain = 0.0;
};

ViOutcome relative_value_iteration(const QueueInstance& inst, std::size_t m, const SolverConfig& cfg,
                                   std::vector<double> h) {
    const DemandModel& demand = inst.demand;
    const double nu = inst.max_rate() + inst.capacity();
    h.resize(m + 1, h.empty() ? 0.0 : h.back());
    std::vector<double> next(m + 1);
    ViOutcome out;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i <= m; ++i) {
            double drift = -inst.cost_rate * static_cast<double>(i);
            if (i > 0) drift += service_rate(inst, i) * (h[i - 1] - h[i]);
            if (i < m) {
                const double marginal = h[i + 1] - h[i];
                const double lam = best_response_rate(demand, marginal);
                drift += revenue_fn(demand, lam) + lam * marginal;
            }
            next[i] = h[i] + drift / nu;
            lo = std::min(lo, next[i] - h[i]);
            hi = std::max(hi, next[i] - h[i]);
        }
        const double base = next[0];
        for (std::size_t i = 0; i <= m; ++i) h[i] = next[i] - base;
        out.iterations = it + 1;
        out.gain = 0.5 * nu * (lo + hi);
        if (nu * (hi - lo) < cfg.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.rates.resize(m);
    for (std::size_t i = 0; i < m; ++i) out.rates[i] = best_response_rate(demand, h[i + 1] - h[i]);
    out.h = std::move(h);
    return out;
}

SolveResult finish(const QueueInstance& inst, std::vector<double> rates) {
    // States past the first zero rate are unreachable; pin their rates to zero.
    auto first_zero = std::find(rates.begin(), rates.end(), 0.0);
    std::fill(first_zero, rates.end(), 0.0);
    SolveResult r;
    r.policy = Policy::dynamic(std::move(rates));
    r.metrics = metrics(r.policy, inst);
    r.monotone = verify_monotone(r.policy, inst);
    return r;
}

std::vector<double> fit_length(std::vector<double> v, std::size_t m, double pad) {
    v.resize(m, pad);
    return v;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("solver: max_iterations must be positive");
    if (truncation.mode == TruncationRule::Mode::Adaptive) {
        if (!(truncation.tail_mass > 0.0 && truncation.tail_mass < 1.0))
            throw std::invalid_argument("solver: tail mass must lie in (0, 1)");
    } else if (truncation.states < 1) {
        throw std::invalid_argument("solver: fixed truncation needs at least one state");
    }
    if (restarts < 1) throw std::invalid_argument("solver: need at least one start");
}

SolveResult solve_occupancy_vi(const QueueInstance& inst, const SolverConfig& cfg) {
    inst.validate();
    cfg.validate();
    if (inst.objective != Objective::Occupancy)
        throw std::invalid_argument("solve_occupancy_vi: value iteration needs the occupancy objective");

    std::size_t m = initial_states(inst, cfg);
    std::vector<double> h;
    int total_iterations = 0;
    while (true) {
        ViOutcome vi = relative_value_iteration(inst, m, cfg, std::move(h));
        total_iterations += vi.iterations;
        SolveResult result = finish(inst, vi.rates);
        result.iterations = total_iterations;
        result.converged = vi.converged;
        result.solver_value = vi.gain;
        const bool fixed = cfg.truncation.mode == TruncationRule::Mode::Fixed;
        if (fixed || result.metrics.blocking_prob < cfg.truncation.tail_mass) return result;
        if (m >= cfg.max_states) {
            result.converged = false;
            return result;
        }
        m = grow_states(m, cfg);
        h = std::move(vi.h);
    }
}

SolveResult solve_direct(const QueueInstance& inst, const SolverConfig& cfg) {
    inst.validate();
    cfg.validate();
    const double cap = inst.max_rate();
    const double myopic = myopic_rate(inst.demand);
    const std::function<double(std::span<const double>)> objective = [&](std::span<const double> x) {
        return objective_value(x, inst);
    };
    BoxSearchOptions opts;
    opts.lower = 0.0;
    opts.upper = cap;
    opts.fd_step = 1e-6 * cap;
    opts.tolerance = cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;

    std::size_t m = initial_states(inst, cfg);
    std::vector<double> carry;
    int total_iterations = 0;
    while (true) {
        std::vector<std::vector<double>> starts;
        // Small-rate starts matter when profit is only positive near zero: from large
        // rates the search can drive lambda_0 to 0, where every other coordinate is flat.
        const double scales[] = {1.0, 0.5, 0.1, 0.01};
        const double load_scales[] = {0.9, 0.5};
        for (double s : scales) starts.emplace_back(m, s * myopic);
        for (double s : load_scales) starts.emplace_back(m, std::min(myopic, s * inst.capacity()));
        starts.resize(std::min<std::size_t>(starts.size(), static_cast<std::size_t>(cfg.restarts)));
        Rng rng(derive_seed(cfg.seed, {m}));
        const double random_cap = std::min(cap, 2.0 * inst.capacity());
        for (int r = static_cast<int>(starts.size()); r < cfg.restarts; ++r) {
            std::vector<double> v(m);
            for (double& x : v) x = rng.uniform(0.0, random_cap);
            std::sort(v.begin(), v.end(), std::greater<>());
            starts.push_back(std::move(v));
        }
        if (!carry.empty()) starts.push_back(fit_length(carry, m, carry.back()));
        for (const auto& w : cfg.warm_starts) starts.push_back(fit_length(w, m, 0.0));

        std::vector<double> best(m, 0.0);
        double best_value = objective(best);
        bool any_converged = false;
        for (auto& start : starts) {
            BoxSearchResult local = projected_bfgs_maximize(objective, std::move(start), opts);
            total_iterations += local.iterations;
            any_converged = any_converged || local.converged;
            if (local.value > best_value) {
                best_value = local.value;
                best = std::move(local.x);
            }
        }
        const bool zero = std::all_of(best.begin(), best.end(), [](double v) { return v == 0.0; });

        SolveResult result = finish(inst, best);
        result.iterations = total_iterations;
        result.converged = any_converged || zero;
        result.solver_value = best_value;
        const bool fixed = cfg.truncation.mode == TruncationRule::Mode::Fixed;
        if (fixed || result.metrics.blocking_prob < cfg.truncation.tail_mass) return result;
        if (m >= cfg.max_states) {
            result.converged = false;
            return result;
        }
        carry = std::move(best);
        m = grow_states(m, cfg);
    }
}

bool verify_monotone(const Policy& policy, const QueueInstance& inst, std::optional<double> slack) {
    const double tol = slack.value_or(1e-5 * inst.max_rate());
    double prev = myopic_rate(inst.demand);
    for (double r : policy.rates) {
        if (r > prev + tol) return false;
        prev = r;
    }
    return true;
}

bool verify_monotone(const SolveResult& result, const QueueInstance& inst, std::optional<double> slack) {
    return verify_monotone(result.policy, inst, slack);
}

double average_arrival_rate(const Policy& policy, const QueueInstance& inst) {
    return metrics(expand_tail(policy, inst), inst).avg_arrival_rate;
}

}  // namespace statpricing
