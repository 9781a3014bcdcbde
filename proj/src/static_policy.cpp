#include "statpricing/static_policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "statpricing/scalar_search.hpp"

namespace statpricing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double x, double y) {
    if (x == kNegInf) return y;
    if (y == kNegInf) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double static_value(const QueueInstance& inst, double revenue, double rate, double p_block, double expected_number) {
    const double admitted = rate * (1.0 - p_block);
    const double earned = revenue * (1.0 - p_block);
    if (inst.objective == Objective::Occupancy) return earned - inst.cost_rate * expected_number;
    if (!(admitted > 0.0)) return 0.0;
    return earned - inst.cost_rate * expected_number / admitted;
}

// Objective of the threshold policy (rate, gamma) for every gamma in 0..gamma_max,
// from running log-sums of the birth-death weights.
void scan_cutoffs(const QueueInstance& inst, double rate, int gamma_max, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(gamma_max) + 1, 0.0);
    if (rate <= 0.0) return;
    const double revenue = revenue_fn(inst.demand, rate);
    const double log_rate = std::log(rate);
    double log_w = 0.0;
    double log_s = 0.0;
    double log_t = kNegInf;
    for (int k = 1; k <= gamma_max + 1; ++k) {
        log_w += log_rate - std::log(service_rate(inst, static_cast<std::size_t>(k)));
        log_s = log_add_exp(log_s, log_w);
        log_t = log_add_exp(log_t, std::log(static_cast<double>(k)) + log_w);
        const double p_block = std::exp(log_w - log_s);
        const double number = std::exp(log_t - log_s);
        out[static_cast<std::size_t>(k - 1)] = static_value(inst, revenue, rate, p_block, number);
    }
}

double cutoff_value(const QueueInstance& inst, double rate, int gamma) {
    if (rate <= 0.0) return 0.0;
    const double log_rate = std::log(rate);
    double log_w = 0.0;
    double log_s = 0.0;
    double log_t = kNegInf;
    for (int k = 1; k <= gamma + 1; ++k) {
        log_w += log_rate - std::log(service_rate(inst, static_cast<std::size_t>(k)));
        log_s = log_add_exp(log_s, log_w);
        log_t = log_add_exp(log_t, std::log(static_cast<double>(k)) + log_w);
    }
    return static_value(inst, revenue_fn(inst.demand, rate), rate, std::exp(log_w - log_s), std::exp(log_t - log_s));
}

// E[L] / rate for the threshold policy (rate, gamma) with unit service rate.
double cost_ratio(double rate, int gamma, int servers) {
    if (rate <= 0.0) return 1.0;  // first-order limit: P_1 / rate -> 1 / mu_1
    const double log_rate = std::log(rate);
    double log_w = 0.0;
    double log_s = 0.0;
    double log_t = kNegInf;
    for (int k = 1; k <= gamma + 1; ++k) {
        log_w += log_rate - std::log(static_cast<double>(std::min(k, servers)));
        log_s = log_add_exp(log_s, log_w);
        log_t = log_add_exp(log_t, std::log(static_cast<double>(k)) + log_w);
    }
    return std::exp(log_t - log_s - log_rate);
}

// log(C^C / C!), the weight of the state where all servers become busy at load C.
double log_full_weight(int servers) {
    const double c = servers;
    return c * std::log(c) - std::lgamma(c + 1.0);
}

// sum_{l=0}^{C} (C^l / l!) / (C^C / C!)
double relative_erlang_sum(int servers) {
    const double log_full = log_full_weight(servers);
    const double log_c = std::log(static_cast<double>(servers));
    double sum = 0.0;
    for (int l = 0; l <= servers; ++l) sum += std::exp(l * log_c - std::lgamma(l + 1.0) - log_full);
    return sum;
}

void check_gamma(int gamma, int servers) {
    if (servers < 1) throw std::domain_error("need at least one server");
    if (gamma < servers - 1) throw std::domain_error("cutoff must be at least C - 1");
}

}  // namespace

Policy make_static(const DemandModel& demand, double rate, int cutoff) {
    if (!(rate >= 0.0) || rate > demand.b) throw std::domain_error("make_static: rate outside [0, b]");
    return Policy::threshold(rate, cutoff);
}

StaticChoice best_cutoff_for_rate(const QueueInstance& inst, double rate, int gamma_max) {
    if (gamma_max < 0) throw std::invalid_argument("gamma_max must be nonnegative");
    rate = std::clamp(rate, 0.0, inst.max_rate());
    std::vector<double> values;
    scan_cutoffs(inst, rate, gamma_max, values);
    const auto best = std::max_element(values.begin(), values.end());
    StaticChoice choice;
    choice.policy = make_static(inst.demand, rate, static_cast<int>(best - values.begin()));
    choice.metrics = metrics(choice.policy, inst);
    return choice;
}

StaticChoice tilde_static(const QueueInstance& inst, const SolveResult& dynamic, int gamma_max) {
    return best_cutoff_for_rate(inst, dynamic.metrics.avg_arrival_rate, gamma_max);
}

StaticChoice optimal_static(const QueueInstance& inst, int gamma_max, int rate_grid) {
    inst.validate();
    if (gamma_max < 0) throw std::invalid_argument("gamma_max must be nonnegative");
    if (rate_grid < 2) throw std::invalid_argument("rate_grid must be at least 2");
    const double cap = inst.max_rate();
    const double step = cap / (rate_grid - 1);
    const auto cutoffs = static_cast<std::size_t>(gamma_max) + 1;

    std::vector<double> best_value(cutoffs, 0.0);  // rate 0 is always available
    std::vector<int> best_node(cutoffs, 0);
    std::vector<double> scan;
    for (int k = 1; k < rate_grid; ++k) {
        const double rate = k == rate_grid - 1 ? cap : step * k;
        scan_cutoffs(inst, rate, gamma_max, scan);
        for (std::size_t g = 0; g < cutoffs; ++g) {
            if (scan[g] > best_value[g]) {
                best_value[g] = scan[g];
                best_node[g] = k;
            }
        }
    }

    double top_value = 0.0;
    double top_rate = 0.0;
    int top_gamma = 0;
    for (std::size_t g = 0; g < cutoffs; ++g) {
        const int gamma = static_cast<int>(g);
        double value = best_value[g];
        double rate = best_node[g] == rate_grid - 1 ? cap : step * best_node[g];
        if (best_node[g] > 0 || value > 0.0) {
            const double lo = std::max(0.0, step * (best_node[g] - 1));
            const double hi = std::min(cap, step * (best_node[g] + 1));
            const ScalarMax refined = golden_section_max(
                [&](double r) { return cutoff_value(inst, r, gamma); }, lo, hi, 1e-12 * cap);
            if (refined.value > value) {
                value = refined.value;
                rate = refined.arg;
            }
        }
        if (value > top_value) {
            top_value = value;
            top_rate = rate;
            top_gamma = gamma;
        }
    }
    StaticChoice choice;
    choice.policy = make_static(inst.demand, top_rate, top_gamma);
    choice.metrics = metrics(choice.policy, inst);
    return choice;
}

UnthresholdedChoice unthresholded_value(const QueueInstance& inst, double rate) {
    UnthresholdedChoice out;
    out.rate = rate;
    if (rate <= 0.0) return out;
    const double load = rate / inst.capacity();
    if (!(load < 1.0)) throw UnstableError("unthresholded static rate must be below mu C");
    // Weights (rate/mu)^i / i! up to C, then geometric with ratio `load`.
    const int servers = inst.servers;
    const double log_ratio = std::log(rate / inst.mu);
    double log_s = kNegInf;
    double log_t = kNegInf;
    double log_w = 0.0;
    for (int i = 0; i < servers; ++i) {
        log_w = i * log_ratio - std::lgamma(i + 1.0);
        log_s = log_add_exp(log_s, log_w);
        if (i > 0) log_t = log_add_exp(log_t, std::log(static_cast<double>(i)) + log_w);
    }
    const double log_wc = servers * log_ratio - std::lgamma(servers + 1.0);
    const double one_minus = 1.0 - load;
    log_s = log_add_exp(log_s, log_wc - std::log(one_minus));
    const double tail_moment = servers / one_minus + load / (one_minus * one_minus);
    log_t = log_add_exp(log_t, log_wc + std::log(tail_moment));
    out.revenue = revenue_fn(inst.demand, rate);
    out.expected_number = std::exp(log_t - log_s);
    out.objective = inst.objective == Objective::Occupancy
                        ? out.revenue - inst.cost_rate * out.expected_number
                        : out.revenue - inst.cost_rate * out.expected_number / rate;
    return out;
}

UnthresholdedChoice optimal_unthresholded(const QueueInstance& inst, int rate_grid) {
    inst.validate();
    const double hi = std::min(inst.max_rate(), inst.capacity() * (1.0 - 1e-9));
    const ScalarMax best = grid_refine_max([&](double r) { return unthresholded_value(inst, r).objective; }, 0.0, hi,
                                           rate_grid, 1e-13 * hi);
    if (best.value <= 0.0) return {};
    return unthresholded_value(inst, best.arg);
}

double g_single(int gamma) {
    if (gamma < 0) throw std::domain_error("g_single: negative cutoff");
    // f(l) = sum_j j l^{j-1} / sum_i l^{i-1}, the common factor l removed.
    auto f = [gamma](double l) {
        double num = 0.0;
        for (int j = gamma + 1; j >= 1; --j) num = num * l + j;
        double den = 0.0;
        for (int i = gamma + 2; i >= 1; --i) den = den * l + 1.0;
        return num / den;
    };
    return grid_refine_max(f, 0.0, 1.0, 100001, 1e-14).value;
}

double g_multi(int gamma, int servers) {
    check_gamma(gamma, servers);
    return grid_refine_max([&](double l) { return cost_ratio(l, gamma, servers); }, 0.0,
                           static_cast<double>(servers), 10001, 1e-13 * servers)
        .value;
}

double revenue_guarantee(int gamma, int servers) {
    check_gamma(gamma, servers);
    return 1.0 - 1.0 / (relative_erlang_sum(servers) + (gamma + 1 - servers));
}

double profit_guarantee(int servers) {
    if (servers < 1) throw std::domain_error("need at least one server");
    return revenue_guarantee(servers - 1, servers);
}

SojournFactors sojourn_guarantees(int gamma, int servers) {
    check_gamma(gamma, servers);
    const double c = servers;
    const double log_full = log_full_weight(servers);
    const double log_c = std::log(c);
    // Numerator and denominator both divided by C^C / C!.
    double numerator = 0.0;
    for (int i = 1; i <= servers; ++i) numerator += std::exp(i * log_c - std::lgamma(static_cast<double>(i)) - log_full);
    const double g1 = gamma + 1.0;
    numerator += 0.5 * g1 * (g1 + 1.0) - 0.5 * c * (c + 1.0);
    const double denominator = c * (relative_erlang_sum(servers) + (gamma - servers));
    return {revenue_guarantee(gamma, servers), numerator / denominator};
}

GuaranteeBundle guarantee_bundle(int gamma, int servers) {
    check_gamma(gamma, servers);
    GuaranteeBundle bundle;
    bundle.servers = servers;
    bundle.gamma = gamma;
    bundle.profit_factor = profit_guarantee(servers);
    bundle.revenue_factor = revenue_guarantee(gamma, servers);
    bundle.cost_factor = servers == 1 ? g_single(gamma) : g_multi(gamma, servers);
    const SojournFactors sojourn = sojourn_guarantees(gamma, servers);
    bundle.sojourn_revenue_factor = sojourn.revenue;
    bundle.sojourn_cost_factor = sojourn.sojourn;
    return bundle;
}

QueueInstance tightness_instance(double kappa, double a) {
    if (!(kappa > 1.0 && kappa < 2.0)) throw std::domain_error("tightness_instance: kappa must lie in (1, 2)");
    if (!(a > 0.0)) throw std::domain_error("tightness_instance: a must be positive");
    QueueInstance inst;
    inst.demand = DemandModel::linear(a, kappa * a);
    inst.mu = 1.0;
    inst.cost_rate = 1.0;
    inst.servers = 1;
    inst.objective = Objective::Occupancy;
    return inst;
}

double tightness_optimal_rate(const QueueInstance& inst) {
    return std::sqrt(inst.demand.b - inst.demand.a + 1.0) - 1.0;
}

}  // namespace statpricing
