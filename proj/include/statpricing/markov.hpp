#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "statpricing/demand.hpp"

namespace statpricing {

/// Raised when a policy's birth-death weights are not summable.
class UnstableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PolicyKind { Dynamic, Static };

/**
 * State-dependent admission rates lambda_0 .. lambda_{M-1}.
 *
 * States run 0..M where M = rates.size(). Every state >= M admits at
 * `tail_rate`; a zero tail (the default) makes the chain finite. Static
 * threshold policies are the special case of a constant rate up to the cutoff.
 */
struct Policy {
    std::vector<double> rates;
    PolicyKind kind = PolicyKind::Dynamic;
    double static_rate = 0.0;  // only meaningful for Static
    int cutoff = -1;           // only meaningful for Static
    double tail_rate = 0.0;

    static Policy dynamic(std::vector<double> rates);
    /// Rate `rate` in states 0..cutoff, zero above.
    static Policy threshold(double rate, int cutoff);
    /// `head` followed by `tail_rate` in every later state.
    static Policy untruncated(std::vector<double> head, double tail_rate);

    std::size_t truncation() const { return rates.size(); }
    bool truncated() const { return tail_rate == 0.0; }
    bool is_static() const { return kind == PolicyKind::Static; }
};

struct StationaryDistribution {
    std::vector<double> probs;  // P_0 .. P_M
    bool stable = true;
    /// Probability at the truncation boundary for finite chains; analytic mass
    /// beyond the last listed state when a geometric tail was summed.
    double tail_mass_bound = 0.0;
};

struct PolicyMetrics {
    double revenue = 0.0;
    double congestion_cost = 0.0;
    double objective = 0.0;
    double avg_arrival_rate = 0.0;
    double expected_number = 0.0;
    std::optional<double> expected_sojourn;  // empty when nothing is admitted
    double blocking_prob = 0.0;
};

/// Service rate out of state k: mu * min(k, C).
inline double service_rate(const QueueInstance& inst, std::size_t k) {
    return inst.mu * static_cast<double>(std::min<std::size_t>(k, static_cast<std::size_t>(inst.servers)));
}

StationaryDistribution stationary_distribution(const Policy& policy, const QueueInstance& inst);

/// Closed-form M/M/1/(cutoff+1) distribution for unit service rate.
StationaryDistribution stationary_mm1_truncated(double rate, int cutoff);

/// Ratio test on the birth-death weights up to `horizon`.
bool is_stable(const Policy& policy, const QueueInstance& inst, std::size_t horizon);

/// Truncated copy of a stable untruncated policy whose neglected tail mass is below `tail_tol`.
Policy expand_tail(const Policy& policy, const QueueInstance& inst, double tail_tol = 1e-17);

/// Revenue, congestion and objective for a truncated policy under inst.objective.
PolicyMetrics metrics(const Policy& policy, const QueueInstance& inst);
PolicyMetrics metrics(std::span<const double> rates, const QueueInstance& inst);

/// Objective value of a truncated rate vector; the solvers' inner loop.
double objective_value(std::span<const double> rates, const QueueInstance& inst);

/// R - c E[L] / lambda_tilde regardless of inst.objective; zero when nothing is admitted.
double sojourn_value(const Policy& policy, const QueueInstance& inst);

}  // namespace statpricing
