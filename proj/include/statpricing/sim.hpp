#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "statpricing/demand.hpp"
#include "statpricing/markov.hpp"

namespace statpricing {

inline constexpr int kSimBatches = 32;

/// Student t quantiles with kSimBatches - 1 degrees of freedom.
inline constexpr double kT95 = 2.0395134464;
inline constexpr double kT99 = 2.7440394229;

struct SimResult {
    PolicyMetrics estimates;
    /// Batch-means standard errors; multiply by kT95 or kT99 for interval half-widths.
    PolicyMetrics std_errors;
    PolicyMetrics half_widths;  // 95%
    std::uint64_t events_processed = 0;
    std::uint64_t seed = 0;
    double simulated_time = 0.0;  // after warm-up

    // Bookkeeping over the whole run, warm-up included.
    std::uint64_t admitted = 0;
    std::uint64_t departed = 0;
    std::uint64_t in_system_at_end = 0;
    std::size_t max_occupancy = 0;
    /// Fraction of post-warm-up time spent in each state.
    std::vector<double> state_fractions;
};

/**
 * Event-driven simulation of the controlled birth-death process.
 *
 * Each event draws an exponential holding time at the total rate
 * lambda_i + mu min(i, C) and picks arrival or departure in proportion.
 * Service is FCFS: a departure removes a uniformly chosen customer among the
 * first min(i, C) in line, so sojourns are tracked per customer. The first 5%
 * of events are discarded and the rest split into 32 equal batches.
 */
SimResult simulate(const Policy& policy, const QueueInstance& inst, std::uint64_t horizon_events, std::uint64_t seed);

struct MetricZ {
    std::string name;
    double analytic = 0.0;
    double estimate = 0.0;
    double z = 0.0;
};

struct ComparisonReport {
    double max_z_score = 0.0;
    bool pass = false;
    std::vector<MetricZ> metrics;
    SimResult sim;
};

inline constexpr double kZLimit = 4.0;

/// z-scores of the exact metrics against a fresh simulation; pass iff max |z| <= 4.
ComparisonReport compare_to_analytic(const Policy& policy, const QueueInstance& inst, std::uint64_t horizon_events,
                                     std::uint64_t seed);

/// Same comparison against caller-supplied analytic values.
ComparisonReport compare_to_values(const PolicyMetrics& analytic, const SimResult& sim);

}  // namespace statpricing
