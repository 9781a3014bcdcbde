#include "statpricing/serialize.hpp"

#include <string>

namespace statpricing {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void to_json(json& j, const DemandModel& d) {
    j = json{{"family", std::string(to_string(d.family))}, {"a", d.a}, {"b", d.b}};
    if (d.family == DemandFamily::Logistic) j["p0"] = d.p0;
}

void from_json(const json& j, DemandModel& d) {
    d.family = parse_family(j.at("family").get<std::string>());
    d.a = j.at("a").get<double>();
    d.b = j.at("b").get<double>();
    d.p0 = j.value("p0", 0.0);
}

void to_json(json& j, const QueueInstance& inst) {
    j = json{{"demand", inst.demand},
             {"mu", inst.mu},
             {"servers", inst.servers},
             {"cost_rate", inst.cost_rate},
             {"objective", std::string(to_string(inst.objective))}};
}

void from_json(const json& j, QueueInstance& inst) {
    inst.demand = j.at("demand").get<DemandModel>();
    inst.mu = j.value("mu", 1.0);
    inst.servers = j.value("servers", 1);
    inst.cost_rate = j.value("cost_rate", 1.0);
    inst.objective = parse_objective(j.value("objective", std::string("occupancy")));
}

void to_json(json& j, const Policy& p) {
    j = json{{"kind", p.is_static() ? "static" : "dynamic"}, {"rates", p.rates}};
    if (p.is_static()) {
        j["rate"] = p.static_rate;
        j["cutoff"] = p.cutoff;
    }
    if (!p.truncated()) j["tail_rate"] = p.tail_rate;
}

void to_json(json& j, const PolicyMetrics& m) {
    j = json{{"revenue", m.revenue},
             {"cost", m.congestion_cost},
             {"objective", m.objective},
             {"lambda_tilde", m.avg_arrival_rate},
             {"expected_number", m.expected_number},
             {"expected_sojourn", optional_number(m.expected_sojourn)},
             {"blocking", m.blocking_prob}};
}

void to_json(json& j, const SolveResult& r) {
    j = json{{"policy", r.policy},
             {"metrics", r.metrics},
             {"converged", r.converged},
             {"iterations", r.iterations},
             {"monotone", r.monotone},
             {"solver_value", r.solver_value}};
}

void to_json(json& j, const StaticChoice& s) { j = json{{"policy", s.policy}, {"metrics", s.metrics}}; }

void to_json(json& j, const SimResult& s) {
    j = json{{"estimates", s.estimates},
             {"half_widths", s.half_widths},
             {"std_errors", s.std_errors},
             {"events_processed", s.events_processed},
             {"seed", s.seed},
             {"simulated_time", s.simulated_time},
             {"admitted", s.admitted},
             {"departed", s.departed},
             {"in_system_at_end", s.in_system_at_end},
             {"max_occupancy", s.max_occupancy},
             {"state_fractions", s.state_fractions}};
}

void to_json(json& j, const ComparisonReport& r) {
    json zs = json::array();
    for (const auto& m : r.metrics)
        zs.push_back(json{{"metric", m.name}, {"analytic", m.analytic}, {"estimate", m.estimate}, {"z", m.z}});
    j = json{{"max_z_score", r.max_z_score}, {"pass", r.pass}, {"metrics", zs}};
}

void to_json(json& j, const GuaranteeBundle& g) {
    j = json{{"C", g.servers},
             {"gamma", g.gamma},
             {"profit", g.profit_factor},
             {"revenue", g.revenue_factor},
             {"cost", g.cost_factor},
             {"sojourn_revenue", g.sojourn_revenue_factor},
             {"sojourn_cost", g.sojourn_cost_factor}};
}

void to_json(json& j, const Ratios& r) {
    j = json{{"objective", r.objective}, {"revenue", r.revenue}, {"cost", r.cost}};
}

void to_json(json& j, const RatioRow& r) {
    j = json{{"table", r.table},
             {"family", std::string(to_string(r.family))},
             {"servers", r.servers},
             {"index", r.index},
             {"attempts", r.attempts},
             {"instance", r.instance},
             {"optimal_objective", r.optimal_objective},
             {"optimal_revenue", r.optimal_revenue},
             {"optimal_cost", r.optimal_cost},
             {"lambda_tilde", r.lambda_tilde},
             {"static_rate", r.static_rate},
             {"static_cutoff", r.static_cutoff},
             {"tilde_cutoff", r.tilde_cutoff},
             {"optimal_static", r.optimal_static},
             {"tilde_static", r.tilde_static},
             {"converged", r.converged},
             {"excluded", r.excluded},
             {"bound_ok", r.bound_ok}};
}

void to_json(json& j, const CellSummary& c) {
    j = json{{"table", c.table},
             {"family", std::string(to_string(c.family))},
             {"servers", c.servers},
             {"instances", c.instances},
             {"excluded", c.excluded},
             {"resampled", c.resampled},
             {"failures", c.failures},
             {"bound_violations", c.bound_violations},
             {"average_optimal", c.average_optimal},
             {"average_tilde", c.average_tilde},
             {"worst_optimal", c.worst_optimal},
             {"worst_tilde", c.worst_tilde}};
}

void to_json(json& j, const TightnessRow& r) {
    j = json{{"a", r.a}, {"optimal", r.optimal}, {"static", r.static_value}, {"ratio", r.ratio}};
}

void to_json(json& j, const SojournExample& s) {
    j = json{{"label", s.label},
             {"instance", s.instance},
             {"optimal", s.optimal},
             {"optimal_rates", s.optimal_rates},
             {"lambda_tilde", s.lambda_tilde},
             {"tilde_static", s.tilde_value},
             {"optimal_static", s.static_value},
             {"static_rate", s.static_rate},
             {"static_cutoff", s.static_cutoff},
             {"static_fraction", s.static_fraction}};
}

}  // namespace statpricing
