#pragma once

#include <utility>

#include "statpricing/demand.hpp"
#include "statpricing/dynamic.hpp"
#include "statpricing/markov.hpp"

namespace statpricing {

struct StaticChoice {
    Policy policy;
    PolicyMetrics metrics;
};

/// Threshold policy admitting at `rate` in states 0..cutoff; rate must lie in [0, b].
Policy make_static(const DemandModel& demand, double rate, int cutoff);

/// Best cutoff in 0..gamma_max for the dynamic optimum's average admitted rate.
StaticChoice tilde_static(const QueueInstance& inst, const SolveResult& dynamic, int gamma_max = 64);

/// Same construction from an explicit rate.
StaticChoice best_cutoff_for_rate(const QueueInstance& inst, double rate, int gamma_max = 64);

/// Joint search over (rate, cutoff): grid scan per cutoff, then golden-section refinement.
StaticChoice optimal_static(const QueueInstance& inst, int gamma_max = 64, int rate_grid = 1024);

/// Static policy without a cutoff. The geometric tail is summed in closed form.
struct UnthresholdedChoice {
    double rate = 0.0;
    double objective = 0.0;
    double revenue = 0.0;
    double expected_number = 0.0;
};
UnthresholdedChoice unthresholded_value(const QueueInstance& inst, double rate);
UnthresholdedChoice optimal_unthresholded(const QueueInstance& inst, int rate_grid = 1024);

/// max over l in [0, 1] of sum_{j=1}^{gamma+1} j l^j / sum_{i=1}^{gamma+2} l^i.
double g_single(int gamma);

/// max over l in [0, C] of E[L] / l for the threshold policy (l, gamma) with unit service rate.
double g_multi(int gamma, int servers);

/// One minus the blocking probability of an M/M/C/(gamma+1) queue offered load C.
double revenue_guarantee(int gamma, int servers);

/// revenue_guarantee(C - 1, C): one minus Erlang B at load C.
double profit_guarantee(int servers);

struct SojournFactors {
    double revenue = 0.0;
    double sojourn = 0.0;
};
SojournFactors sojourn_guarantees(int gamma, int servers);

struct GuaranteeBundle {
    int servers = 1;
    int gamma = 0;
    double profit_factor = 0.0;
    double revenue_factor = 0.0;
    double cost_factor = 0.0;
    double sojourn_revenue_factor = 0.0;
    double sojourn_cost_factor = 0.0;
};
GuaranteeBundle guarantee_bundle(int gamma, int servers);

/// Single-server linear instance with b = kappa a and mu = c = 1, where queueing never pays.
QueueInstance tightness_instance(double kappa, double a);

/// Optimal policy of a tightness instance: admit at sqrt(b - a + 1) - 1 when empty, never otherwise.
double tightness_optimal_rate(const QueueInstance& inst);

}  // namespace statpricing
