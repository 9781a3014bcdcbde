#include "statpricing/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace statpricing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Normalized birth-death probabilities for a finite rate vector, via log weights.
void finite_probabilities(std::span<const double> rates, const QueueInstance& inst, std::vector<double>& probs) {
    const std::size_t m = rates.size();
    probs.assign(m + 1, 0.0);
    probs[0] = 0.0;
    double log_w = 0.0;
    double max_log = 0.0;
    std::size_t last = m;
    for (std::size_t i = 1; i <= m; ++i) {
        const double lam = rates[i - 1];
        if (lam < 0.0) throw std::domain_error("policy: negative rate");
        if (lam == 0.0) {
            last = i - 1;
            break;
        }
        log_w += std::log(lam) - std::log(service_rate(inst, i));
        probs[i] = log_w;
        max_log = std::max(max_log, log_w);
    }
    double total = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        if (i > last) {
            probs[i] = 0.0;
            continue;
        }
        probs[i] = std::exp(probs[i] - max_log);
        total += probs[i];
    }
    for (double& p : probs) p /= total;
}

void check_rates(std::span<const double> rates, const DemandModel& demand) {
    for (double r : rates) {
        if (!(r >= 0.0) || r > demand.b) throw std::domain_error("policy rate outside [0, b]");
    }
}

}  // namespace

Policy Policy::dynamic(std::vector<double> rates) {
    Policy p;
    p.rates = std::move(rates);
    return p;
}

Policy Policy::threshold(double rate, int cutoff) {
    if (cutoff < 0) throw std::domain_error("static policy: negative cutoff");
    if (!(rate >= 0.0)) throw std::domain_error("static policy: negative rate");
    Policy p;
    p.rates.assign(static_cast<std::size_t>(cutoff) + 1, rate);
    p.kind = PolicyKind::Static;
    p.static_rate = rate;
    p.cutoff = cutoff;
    return p;
}

Policy Policy::untruncated(std::vector<double> head, double tail_rate) {
    if (!(tail_rate >= 0.0)) throw std::domain_error("policy: negative tail rate");
    Policy p;
    p.rates = std::move(head);
    p.tail_rate = tail_rate;
    return p;
}

bool is_stable(const Policy& policy, const QueueInstance& inst, std::size_t horizon) {
    if (policy.truncated()) return true;
    if (std::any_of(policy.rates.begin(), policy.rates.end(), [](double r) { return r == 0.0; })) return true;
    // Beyond max(M, C) every ratio b_n / b_{n-1} equals tail_rate / (mu C); check it
    // across the tail of the horizon.
    const std::size_t start = std::max(policy.truncation(), static_cast<std::size_t>(inst.servers)) + 1;
    const std::size_t end = std::max(horizon, start);
    for (std::size_t n = start; n <= end; ++n) {
        const double ratio = policy.tail_rate / service_rate(inst, n);
        if (!(ratio < 1.0 - 1e-6)) return false;
    }
    return true;
}

Policy expand_tail(const Policy& policy, const QueueInstance& inst, double tail_tol) {
    if (policy.truncated()) return policy;
    const std::size_t head = std::max(policy.truncation(), static_cast<std::size_t>(inst.servers));
    if (!is_stable(policy, inst, head + 1)) throw UnstableError("policy weights are not summable");
    const double ratio = policy.tail_rate / inst.capacity();
    std::size_t extra = 1;
    if (ratio > 0.0) {
        extra = static_cast<std::size_t>(std::ceil(std::log(tail_tol) / std::log(ratio))) + 1;
    }
    if (head + extra > 50'000'000) throw UnstableError("tail too heavy to expand");
    Policy out = policy;
    out.rates.resize(head + extra, policy.tail_rate);
    out.tail_rate = 0.0;
    return out;
}

StationaryDistribution stationary_distribution(const Policy& policy, const QueueInstance& inst) {
    StationaryDistribution dist;
    if (policy.truncated()) {
        finite_probabilities(policy.rates, inst, dist.probs);
        dist.tail_mass_bound = dist.probs.back();
        return dist;
    }
    const Policy expanded = expand_tail(policy, inst);
    finite_probabilities(expanded.rates, inst, dist.probs);
    // The expanded chain reflects at its last state; the mass it would have carried
    // further is geometric with ratio tail_rate / (mu C).
    const double ratio = policy.tail_rate / inst.capacity();
    dist.tail_mass_bound = dist.probs.back() * ratio / (1.0 - ratio);
    return dist;
}

StationaryDistribution stationary_mm1_truncated(double rate, int cutoff) {
    if (!(rate >= 0.0)) throw std::domain_error("stationary_mm1_truncated: negative rate");
    if (cutoff < 0) throw std::domain_error("stationary_mm1_truncated: negative cutoff");
    StationaryDistribution dist;
    const int states = cutoff + 2;
    dist.probs.resize(static_cast<std::size_t>(states));
    if (std::abs(rate - 1.0) < 1e-9) {
        std::fill(dist.probs.begin(), dist.probs.end(), 1.0 / states);
    } else if (rate < 1.0) {
        const double head = (1.0 - rate) / (1.0 - std::pow(rate, states));
        for (int i = 0; i < states; ++i) dist.probs[static_cast<std::size_t>(i)] = head * std::pow(rate, i);
    } else {
        // Same formula with x = 1/rate so that powers do not overflow:
        // P_i = (1 - x) x^{gamma+1-i} / (1 - x^{gamma+2}).
        const double x = 1.0 / rate;
        const double head = (1.0 - x) / (1.0 - std::pow(x, states));
        for (int i = 0; i < states; ++i) dist.probs[static_cast<std::size_t>(i)] = head * std::pow(x, states - 1 - i);
    }
    dist.tail_mass_bound = dist.probs.back();
    return dist;
}

PolicyMetrics metrics(std::span<const double> rates, const QueueInstance& inst) {
    check_rates(rates, inst.demand);
    std::vector<double> probs;
    finite_probabilities(rates, inst, probs);
    PolicyMetrics m;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (probs[i] == 0.0) continue;
        m.revenue += revenue_fn(inst.demand, rates[i]) * probs[i];
        m.avg_arrival_rate += rates[i] * probs[i];
    }
    for (std::size_t i = 1; i < probs.size(); ++i) m.expected_number += static_cast<double>(i) * probs[i];
    m.blocking_prob = probs.back();
    if (m.avg_arrival_rate > 0.0) m.expected_sojourn = m.expected_number / m.avg_arrival_rate;
    if (inst.objective == Objective::Occupancy) {
        m.congestion_cost = inst.cost_rate * m.expected_number;
        m.objective = m.revenue - m.congestion_cost;
    } else if (m.expected_sojourn) {
        m.congestion_cost = inst.cost_rate * *m.expected_sojourn;
        m.objective = m.revenue - m.congestion_cost;
    } else {
        m.congestion_cost = 0.0;
        m.objective = 0.0;
    }
    return m;
}

PolicyMetrics metrics(const Policy& policy, const QueueInstance& inst) {
    if (!policy.truncated()) throw std::invalid_argument("metrics: policy must be truncated (see expand_tail)");
    return metrics(std::span<const double>(policy.rates), inst);
}

double objective_value(std::span<const double> rates, const QueueInstance& inst) {
    return metrics(rates, inst).objective;
}

double sojourn_value(const Policy& policy, const QueueInstance& inst) {
    QueueInstance sojourn = inst;
    sojourn.objective = Objective::Sojourn;
    return metrics(policy, sojourn).objective;
}

}  // namespace statpricing
