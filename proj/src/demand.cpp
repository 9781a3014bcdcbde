#include "statpricing/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace statpricing {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

double log_add_exp(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double hi = std::max(x, y);
    return hi + std::log1p(std::exp(std::min(x, y) - hi));
}

double logistic_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Revenue-plus-marginal maximizer for logistic demand. In price space the
// objective is lambda(p) (p + m); its derivative has the sign of
// 1 - a (p + m) sigmoid(a (p - p0)), which is increasing on p >= max(0, -m).
double logistic_best_price(const DemandModel& d, double m) {
    auto excess = [&](double p) { return d.a * (p + m) * logistic_sigmoid(d.a * (p - d.p0)) - 1.0; };
    const double lo_start = std::max(0.0, -m);
    if (excess(lo_start) >= 0.0) return lo_start;
    double lo = lo_start;
    double hi = std::max(lo_start, d.p0) + 1.0 / d.a;
    while (excess(hi) < 0.0) {
        lo = hi;
        hi = lo_start + 2.0 * (hi - lo_start) + 1.0 / d.a;
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::string_view to_string(DemandFamily family) {
    switch (family) {
    case DemandFamily::Linear: return "linear";
    case DemandFamily::Exponential: return "exponential";
    case DemandFamily::Logistic: return "logistic";
    }
    return "unknown";
}

DemandFamily parse_family(std::string_view name) {
    if (name == "linear") return DemandFamily::Linear;
    if (name == "exponential") return DemandFamily::Exponential;
    if (name == "logistic") return DemandFamily::Logistic;
    throw std::invalid_argument("unknown demand family: " + std::string(name));
}

std::string_view to_string(Objective objective) {
    return objective == Objective::Occupancy ? "occupancy" : "sojourn";
}

Objective parse_objective(std::string_view name) {
    if (name == "occupancy") return Objective::Occupancy;
    if (name == "sojourn") return Objective::Sojourn;
    throw std::invalid_argument("unknown objective: " + std::string(name));
}

DemandModel DemandModel::linear(double a, double b) {
    DemandModel d{DemandFamily::Linear, a, b, 0.0};
    d.validate();
    return d;
}

DemandModel DemandModel::exponential(double a, double b) {
    DemandModel d{DemandFamily::Exponential, a, b, 0.0};
    d.validate();
    return d;
}

DemandModel DemandModel::logistic(double a, double b, double p0) {
    DemandModel d{DemandFamily::Logistic, a, b, p0};
    d.validate();
    return d;
}

void DemandModel::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("demand: a must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("demand: b must be positive");
    if (!std::isfinite(p0)) throw std::invalid_argument("demand: p0 must be finite");
}

void QueueInstance::validate() const {
    demand.validate();
    if (!(mu > 0.0)) throw std::invalid_argument("instance: mu must be positive");
    if (!(cost_rate > 0.0)) throw std::invalid_argument("instance: cost rate must be positive");
    if (servers < 1) throw std::invalid_argument("instance: need at least one server");
}

double eval_rate(const DemandModel& d, double price) {
    if (price < 0.0) throw std::domain_error("eval_rate: negative price");
    switch (d.family) {
    case DemandFamily::Linear:
        return std::max(d.b - d.a * price, 0.0);
    case DemandFamily::Exponential:
        return d.b * std::exp(-d.a * price);
    case DemandFamily::Logistic:
        return d.b * std::exp(softplus(-d.a * d.p0) - softplus(d.a * (price - d.p0)));
    }
    return 0.0;
}

double inverse_price(const DemandModel& d, double rate) {
    if (!(rate > 0.0) || rate > d.b) throw std::domain_error("inverse_price: rate outside (0, b]");
    switch (d.family) {
    case DemandFamily::Linear:
        return (d.b - rate) / d.a;
    case DemandFamily::Exponential:
        return std::log(d.b / rate) / d.a;
    case DemandFamily::Logistic: {
        // p = p0 + ln(b (1 + e^{-a p0}) / rate - 1) / a, expanded so that the
        // rate = b end and large |a p0| stay exact.
        const double log_rate = std::log(rate);
        const double slack = d.b - rate;
        const double first = slack > 0.0 ? std::log(slack) - log_rate
                                         : -std::numeric_limits<double>::infinity();
        const double second = std::log(d.b) - log_rate - d.a * d.p0;
        const double price = d.p0 + log_add_exp(first, second) / d.a;
        return std::max(price, 0.0);
    }
    }
    return 0.0;
}

double revenue_fn(const DemandModel& d, double rate) {
    if (rate > d.b) throw std::domain_error("revenue_fn: rate exceeds market size");
    if (rate < 0.0) throw std::domain_error("revenue_fn: negative rate");
    if (rate == 0.0) return 0.0;
    return rate * inverse_price(d, rate);
}

double price_cap(const DemandModel& d) {
    if (d.family == DemandFamily::Linear) return d.b / d.a;
    return std::numeric_limits<double>::infinity();
}

double best_response_rate(const DemandModel& d, double marginal) {
    switch (d.family) {
    case DemandFamily::Linear:
        return std::clamp(0.5 * (d.b + d.a * marginal), 0.0, d.b);
    case DemandFamily::Exponential: {
        const double exponent = d.a * marginal - 1.0;
        return exponent >= 0.0 ? d.b : d.b * std::exp(exponent);
    }
    case DemandFamily::Logistic:
        return std::min(eval_rate(d, logistic_best_price(d, marginal)), d.b);
    }
    return 0.0;
}

double myopic_rate(const DemandModel& d) { return best_response_rate(d, 0.0); }

RegularityReport check_regularity(const DemandModel& d, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("check_regularity: need at least 3 grid points");
    RegularityReport report;
    report.worst_violation = -std::numeric_limits<double>::infinity();
    const double step = d.b / static_cast<double>(grid_points - 1);
    auto rev_at = [&](int k) { return k == grid_points - 1 ? revenue_fn(d, d.b) : revenue_fn(d, step * k); };
    double prev = rev_at(0);
    double cur = rev_at(1);
    for (int k = 1; k + 1 < grid_points; ++k) {
        const double next = rev_at(k + 1);
        const double second = prev - 2.0 * cur + next;
        report.worst_violation = std::max(report.worst_violation, second);
        prev = cur;
        cur = next;
    }
    report.is_concave = report.worst_violation <= 1e-9 * d.b;
    return report;
}

NormalizedInstance normalize_instance(const QueueInstance& inst) {
    inst.validate();
    // New time unit 1/mu, new money unit c/mu. Prices scale by mu/c and rates by 1/mu.
    const double price_scale = inst.cost_rate / inst.mu;  // nominal price per normalized price
    NormalizedInstance out;
    out.instance = inst;
    out.instance.mu = 1.0;
    out.instance.cost_rate = 1.0;
    DemandModel& d = out.instance.demand;
    d.b = inst.demand.b / inst.mu;
    switch (inst.demand.family) {
    case DemandFamily::Linear:
        d.a = inst.demand.a * price_scale / inst.mu;
        break;
    case DemandFamily::Exponential:
        d.a = inst.demand.a * price_scale;
        break;
    case DemandFamily::Logistic:
        d.a = inst.demand.a * price_scale;
        d.p0 = inst.demand.p0 / price_scale;
        break;
    }
    out.scale = inst.cost_rate;
    return out;
}

}  // namespace statpricing
