#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "statpricing/demand.hpp"
#include "statpricing/markov.hpp"

namespace statpricing {

/// How many states a solver keeps. Adaptive grows the chain until the
/// boundary state carries less than `tail_mass` stationary probability.
struct TruncationRule {
    enum class Mode { Fixed, Adaptive };
    Mode mode = Mode::Adaptive;
    std::size_t states = 0;   // Fixed: number of controlled states M
    double tail_mass = 1e-4;  // Adaptive threshold on P_M

    static TruncationRule fixed(std::size_t states) { return {Mode::Fixed, states, 0.0}; }
    static TruncationRule adaptive(double tail_mass) { return {Mode::Adaptive, 0, tail_mass}; }
};

struct SolverConfig {
    TruncationRule truncation = TruncationRule::adaptive(1e-4);
    double tolerance = 1e-10;
    int max_iterations = 500000;
    int restarts = 8;
    std::uint64_t seed = 0;
    /// Upper bound on the adaptive state count.
    std::size_t max_states = 400;
    /// Extra starting rate vectors for solve_direct (resized to the working truncation).
    std::vector<std::vector<double>> warm_starts;

    void validate() const;
};

struct SolveResult {
    Policy policy;
    PolicyMetrics metrics;
    bool converged = false;
    int iterations = 0;
    bool monotone = false;
    /// Long-run value per unit time reported by the solver itself (VI gain bracket midpoint
    /// or the best local-search value); metrics.objective is the exact re-evaluation.
    double solver_value = 0.0;
};

/**
 * Relative value iteration on the uniformized occupancy MDP.
 *
 * Uniformization rate is Lambda + mu C. Each sweep sets
 *   h'(i) = h(i) + [max_l {r(l) + l (h(i+1) - h(i))} + mu_i (h(i-1) - h(i)) - c i] / nu
 * with no admissions in the last state, then re-centers at h'(0). The sweep
 * stops once nu * span(h' - h) falls below the tolerance, which brackets the
 * optimal gain to that width.
 */
SolveResult solve_occupancy_vi(const QueueInstance& inst, const SolverConfig& cfg);

/// Multi-start projected quasi-Newton search over truncated rate vectors; either objective.
SolveResult solve_direct(const QueueInstance& inst, const SolverConfig& cfg);

/// Rates are nonincreasing (within slack) and start at or below the myopic rate.
bool verify_monotone(const Policy& policy, const QueueInstance& inst, std::optional<double> slack = std::nullopt);
bool verify_monotone(const SolveResult& result, const QueueInstance& inst,
                     std::optional<double> slack = std::nullopt);

/// Long-run admitted rate; untruncated policies are expanded and throw UnstableError if not summable.
double average_arrival_rate(const Policy& policy, const QueueInstance& inst);

}  // namespace statpricing
