#include "statpricing/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "statpricing/rng.hpp"

namespace statpricing {

namespace {

struct BatchTotals {
    double time = 0.0;
    double area = 0.0;
    double revenue = 0.0;
    double admitted = 0.0;
    double sojourn_sum = 0.0;
    double sojourn_count = 0.0;
    double boundary_time = 0.0;
};

// Metrics implied by accumulated totals; sojourn objective uses the measured sojourn.
PolicyMetrics batch_metrics(const BatchTotals& t, const QueueInstance& inst) {
    PolicyMetrics m;
    m.revenue = t.revenue / t.time;
    m.expected_number = t.area / t.time;
    m.avg_arrival_rate = t.admitted / t.time;
    m.blocking_prob = t.boundary_time / t.time;
    if (t.sojourn_count > 0.0) m.expected_sojourn = t.sojourn_sum / t.sojourn_count;
    if (inst.objective == Objective::Occupancy) {
        m.congestion_cost = inst.cost_rate * m.expected_number;
    } else {
        m.congestion_cost = inst.cost_rate * m.expected_sojourn.value_or(0.0);
    }
    m.objective = m.revenue - m.congestion_cost;
    return m;
}

using Field = double PolicyMetrics::*;
constexpr std::array<Field, 6> kFields = {&PolicyMetrics::revenue,          &PolicyMetrics::congestion_cost,
                                          &PolicyMetrics::objective,        &PolicyMetrics::avg_arrival_rate,
                                          &PolicyMetrics::expected_number,  &PolicyMetrics::blocking_prob};
constexpr std::array<const char*, 6> kFieldNames = {"revenue",      "congestion_cost", "objective",
                                                    "lambda_tilde", "expected_number", "blocking_prob"};

double std_error(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0) / n);
}

double z_score(double analytic, double estimate, double se) {
    const double diff = analytic - estimate;
    if (se > 0.0) return diff / se;
    return std::abs(diff) <= 1e-9 * (1.0 + std::abs(analytic)) ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

SimResult simulate(const Policy& policy, const QueueInstance& inst, std::uint64_t horizon_events, std::uint64_t seed) {
    inst.validate();
    if (horizon_events < 1000) throw std::invalid_argument("simulate: horizon must be at least 1000 events");
    const std::uint64_t warmup = horizon_events / 20;
    const std::uint64_t measured = horizon_events - warmup;
    const std::uint64_t batch_size = measured / kSimBatches;
    if (batch_size < 1) throw std::invalid_argument("simulate: horizon too small for 32 batches");
    if (!policy.truncated() && !is_stable(policy, inst, 10000))
        throw UnstableError("simulate: policy is not stable");

    const std::size_t m = policy.truncation();
    auto rate_at = [&](std::size_t i) { return i < m ? policy.rates[i] : policy.tail_rate; };
    auto price_at = [&](std::size_t i) { return inverse_price(inst.demand, rate_at(i)); };

    SimResult out;
    out.seed = seed;
    std::vector<BatchTotals> batches(kSimBatches);
    std::vector<double> state_time;

    if (rate_at(0) <= 0.0) {
        // Empty system that never admits: every metric is exactly zero.
        out.events_processed = horizon_events;
        out.state_fractions = {1.0};
        out.estimates.expected_sojourn.reset();
        return out;
    }

    Rng rng(seed);
    std::deque<double> line;  // arrival times in FCFS order
    double now = 0.0;
    std::size_t state = 0;
    for (std::uint64_t e = 0; e < horizon_events; ++e) {
        const double lam = rate_at(state);
        const double mu = service_rate(inst, state);
        const double total = lam + mu;
        const double dt = rng.exponential(total);
        const bool arrival = rng.uniform() * total < lam;

        BatchTotals* batch = nullptr;
        if (e >= warmup) {
            const std::uint64_t k = std::min<std::uint64_t>((e - warmup) / batch_size, kSimBatches - 1);
            batch = &batches[k];
            batch->time += dt;
            batch->area += dt * static_cast<double>(state);
            if (state == m && policy.truncated()) batch->boundary_time += dt;
            if (state_time.size() <= state) state_time.resize(state + 1, 0.0);
            state_time[state] += dt;
        }
        now += dt;

        if (arrival) {
            if (batch) {
                batch->revenue += price_at(state);
                batch->admitted += 1.0;
            }
            line.push_back(now);
            ++out.admitted;
            ++state;
            out.max_occupancy = std::max(out.max_occupancy, state);
        } else {
            const std::size_t busy = std::min<std::size_t>(state, static_cast<std::size_t>(inst.servers));
            const auto pick = static_cast<std::size_t>(rng.index(busy));
            const double arrived = line[pick];
            line.erase(line.begin() + static_cast<std::ptrdiff_t>(pick));
            if (batch) {
                batch->sojourn_sum += now - arrived;
                batch->sojourn_count += 1.0;
            }
            ++out.departed;
            --state;
        }
    }
    out.events_processed = horizon_events;
    out.in_system_at_end = line.size();

    BatchTotals all;
    std::vector<PolicyMetrics> per_batch;
    per_batch.reserve(kSimBatches);
    for (const auto& b : batches) {
        all.time += b.time;
        all.area += b.area;
        all.revenue += b.revenue;
        all.admitted += b.admitted;
        all.sojourn_sum += b.sojourn_sum;
        all.sojourn_count += b.sojourn_count;
        all.boundary_time += b.boundary_time;
        per_batch.push_back(batch_metrics(b, inst));
    }
    out.simulated_time = all.time;
    out.estimates = batch_metrics(all, inst);

    std::vector<double> xs(kSimBatches);
    for (Field f : kFields) {
        for (int k = 0; k < kSimBatches; ++k) xs[k] = per_batch[k].*f;
        out.std_errors.*f = std_error(xs);
        out.half_widths.*f = kT95 * out.std_errors.*f;
    }
    const bool all_sojourns =
        std::all_of(per_batch.begin(), per_batch.end(), [](const PolicyMetrics& p) { return p.expected_sojourn.has_value(); });
    if (all_sojourns) {
        for (int k = 0; k < kSimBatches; ++k) xs[k] = *per_batch[k].expected_sojourn;
        out.std_errors.expected_sojourn = std_error(xs);
        out.half_widths.expected_sojourn = kT95 * *out.std_errors.expected_sojourn;
    }

    out.state_fractions.assign(state_time.size(), 0.0);
    for (std::size_t i = 0; i < state_time.size(); ++i) out.state_fractions[i] = state_time[i] / all.time;
    return out;
}

ComparisonReport compare_to_values(const PolicyMetrics& analytic, const SimResult& sim) {
    ComparisonReport report;
    for (std::size_t k = 0; k < kFields.size(); ++k) {
        const Field f = kFields[k];
        const double z = z_score(analytic.*f, sim.estimates.*f, sim.std_errors.*f);
        report.metrics.push_back({kFieldNames[k], analytic.*f, sim.estimates.*f, z});
    }
    if (analytic.expected_sojourn && sim.estimates.expected_sojourn && sim.std_errors.expected_sojourn) {
        const double z =
            z_score(*analytic.expected_sojourn, *sim.estimates.expected_sojourn, *sim.std_errors.expected_sojourn);
        report.metrics.push_back({"expected_sojourn", *analytic.expected_sojourn, *sim.estimates.expected_sojourn, z});
    }
    for (const auto& m : report.metrics) report.max_z_score = std::max(report.max_z_score, std::abs(m.z));
    report.pass = report.max_z_score <= kZLimit;
    report.sim = sim;
    return report;
}

ComparisonReport compare_to_analytic(const Policy& policy, const QueueInstance& inst, std::uint64_t horizon_events,
                                     std::uint64_t seed) {
    const SimResult sim = simulate(policy, inst, horizon_events, seed);
    const PolicyMetrics analytic = policy.truncated() ? metrics(policy, inst) : metrics(expand_tail(policy, inst), inst);
    return compare_to_values(analytic, sim);
}

}  // namespace statpricing
