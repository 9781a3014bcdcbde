#pragma once

#include <string>
#include <string_view>

namespace statpricing {

enum class DemandFamily { Linear, Exponential, Logistic };

std::string_view to_string(DemandFamily family);
DemandFamily parse_family(std::string_view name);

/**
 * Price-sensitive arrival process.
 *
 * Maps a posted price p to the rate lambda(p) of customers who accept it:
 *   Linear       lambda = max(b - a p, 0)
 *   Exponential  lambda = b exp(-a p)
 *   Logistic     lambda = b (1 + exp(-a p0)) / (1 + exp(a (p - p0)))
 * All three families satisfy lambda(0) = b, so b is the market size.
 */
struct DemandModel {
    DemandFamily family = DemandFamily::Linear;
    double a = 1.0;   // price sensitivity
    double b = 1.0;   // rate at price zero
    double p0 = 0.0;  // logistic midpoint, ignored otherwise

    static DemandModel linear(double a, double b);
    static DemandModel exponential(double a, double b);
    static DemandModel logistic(double a, double b, double p0);

    /// Throws std::invalid_argument unless a > 0 and b > 0.
    void validate() const;

    /// Largest rate any price can induce.
    double market_size() const { return b; }
};

enum class Objective { Occupancy, Sojourn };

std::string_view to_string(Objective objective);
Objective parse_objective(std::string_view name);

struct QueueInstance {
    DemandModel demand;
    double mu = 1.0;          // per-server service rate
    int servers = 1;
    double cost_rate = 1.0;   // congestion penalty per customer (or per unit sojourn) per time
    Objective objective = Objective::Occupancy;

    void validate() const;
    double max_rate() const { return demand.b; }
    double capacity() const { return mu * servers; }
};

/// Accepting rate at the given price; zero once linear demand is priced out.
double eval_rate(const DemandModel& demand, double price);

/// Price that induces `rate`; requires 0 < rate <= b, throws std::domain_error otherwise.
double inverse_price(const DemandModel& demand, double rate);

/// rate * p(rate), with revenue_fn(0) = 0.
double revenue_fn(const DemandModel& demand, double rate);

/// Supremum price: b/a for linear demand, +infinity for the others.
double price_cap(const DemandModel& demand);

/**
 * Maximizer over rate in [0, b] of revenue_fn(rate) + rate * marginal.
 *
 * `marginal` is the value change caused by one more admitted customer, so
 * marginal = 0 gives the myopic rate. Linear and exponential demand have closed
 * forms; logistic demand solves the first-order condition in price space, which
 * is monotone and is bracketed by bisection.
 */
double best_response_rate(const DemandModel& demand, double marginal);

/// argmax of revenue_fn over [0, b].
double myopic_rate(const DemandModel& demand);

struct RegularityReport {
    bool is_concave = true;
    double worst_violation = 0.0;  // largest second difference of revenue_fn
};

/// Scans second differences of revenue_fn on a uniform grid over [0, b].
RegularityReport check_regularity(const DemandModel& demand, int grid_points);

struct NormalizedInstance {
    QueueInstance instance;
    /// nominal value rate = scale * normalized value rate
    double scale = 1.0;
};

/// Rescales time to units of 1/mu and money to units of cost_rate/mu, giving mu = c = 1.
NormalizedInstance normalize_instance(const QueueInstance& inst);

}  // namespace statpricing
