#include "statpricing/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "statpricing/dynamic.hpp"
#include "statpricing/markov.hpp"
#include "statpricing/serialize.hpp"
#include "statpricing/static_policy.hpp"

namespace statpricing {

namespace {

constexpr double kExcludeBelow = 1e-9;

double safe_ratio(double num, double den) { return den != 0.0 ? num / den : 1.0; }

Ratios ratios_of(const PolicyMetrics& m, const PolicyMetrics& opt) {
    return {safe_ratio(m.objective, opt.objective), safe_ratio(m.revenue, opt.revenue),
            safe_ratio(m.congestion_cost, opt.congestion_cost)};
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::string_view to_string(ReportFormat format) { return format == ReportFormat::Csv ? "csv" : "json"; }

ReportFormat parse_format(std::string_view name) {
    if (name == "csv") return ReportFormat::Csv;
    if (name == "json") return ReportFormat::Json;
    throw std::invalid_argument("unknown report format: " + std::string(name));
}

void ExperimentConfig::validate() const {
    if (replications < 1) throw std::invalid_argument("experiment: replications must be at least 1");
    if (families.empty() || servers.empty()) throw std::invalid_argument("experiment: empty cell grid");
    for (int c : servers)
        if (c < 1) throw std::invalid_argument("experiment: server counts must be positive");
    if (gamma_max < 0 || rate_grid < 2 || max_attempts < 1) throw std::invalid_argument("experiment: bad search settings");
}

QueueInstance sample_instance(DemandFamily family, int servers, Rng& rng, Objective objective) {
    QueueInstance inst;
    inst.mu = 1.0;
    inst.cost_rate = 1.0;
    inst.servers = servers;
    inst.objective = objective;
    while (true) {
        const double a = rng.uniform(0.1, 5.0);
        const double b = rng.uniform(0.5, 10.0);
        if (family == DemandFamily::Linear) {
            if (a > b) continue;
            inst.demand = DemandModel::linear(a, b);
        } else if (family == DemandFamily::Exponential) {
            inst.demand = DemandModel::exponential(a, b);
        } else {
            inst.demand = DemandModel::logistic(a, b, rng.uniform(0.0, 20.0));
        }
        return inst;
    }
}

bool table_uses_sojourn(int table) { return table == 3 || table == 4; }
bool table_is_worst_case(int table) { return table == 1 || table == 3; }

RatioRow evaluate_instance(const QueueInstance& inst, int gamma_max, int rate_grid, std::uint64_t seed) {
    RatioRow row;
    row.instance = inst;
    row.family = inst.demand.family;
    row.servers = inst.servers;

    const StaticChoice best_static = optimal_static(inst, gamma_max, rate_grid);
    SolverConfig cfg;
    cfg.seed = seed;
    if (best_static.policy.static_rate > 0.0) cfg.warm_starts.push_back(best_static.policy.rates);
    const SolveResult dyn = solve_direct(inst, cfg);
    row.converged = dyn.converged;

    const PolicyMetrics& opt = dyn.metrics;
    row.optimal_objective = opt.objective;
    row.optimal_revenue = opt.revenue;
    row.optimal_cost = opt.congestion_cost;
    row.lambda_tilde = opt.avg_arrival_rate;
    row.static_rate = best_static.policy.static_rate;
    row.static_cutoff = best_static.policy.cutoff;
    row.excluded = !(opt.objective > kExcludeBelow);

    const StaticChoice tilde = best_cutoff_for_rate(inst, row.lambda_tilde, gamma_max);
    row.tilde_cutoff = tilde.policy.cutoff;
    row.optimal_static = ratios_of(best_static.metrics, opt);
    row.tilde_static = ratios_of(tilde.metrics, opt);

    if (inst.objective == Objective::Occupancy && !row.excluded) {
        const Policy base = make_static(inst.demand, std::min(row.lambda_tilde, inst.max_rate()), inst.servers - 1);
        row.bound_ok = metrics(base, inst).objective >= profit_guarantee(inst.servers) * opt.objective - 1e-6;
    }
    return row;
}

double TableResult::failure_rate() const {
    if (rows.empty()) return 0.0;
    const auto failed = std::count_if(rows.begin(), rows.end(), [](const RatioRow& r) { return !r.converged; });
    return static_cast<double>(failed) / static_cast<double>(rows.size());
}

TableResult replicate_table(int table, const ExperimentConfig& base_cfg) {
    if (table < 1 || table > 4) throw std::invalid_argument("replicate_table: table must be 1..4");
    ExperimentConfig cfg = base_cfg;
    cfg.objective = table_uses_sojourn(table) ? Objective::Sojourn : Objective::Occupancy;
    cfg.validate();

    const std::size_t reps = static_cast<std::size_t>(cfg.replications);
    const std::size_t per_family = cfg.servers.size() * reps;
    const std::size_t total = cfg.families.size() * per_family;
    TableResult result;
    result.table = table;
    result.rows.resize(total);
    const std::uint64_t objective_tag = cfg.objective == Objective::Occupancy ? 0 : 1;

    parallel_for(total, cfg.threads, [&](std::size_t slot) {
        const std::size_t f = slot / per_family;
        const std::size_t s = (slot % per_family) / reps;
        const std::size_t index = slot % reps;
        const DemandFamily family = cfg.families[f];
        const int servers = cfg.servers[s];
        RatioRow row;
        for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
            const std::uint64_t key = derive_seed(
                cfg.seed, {objective_tag, static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(servers),
                           index, static_cast<std::uint64_t>(attempt)});
            Rng rng(key);
            const QueueInstance inst = sample_instance(family, servers, rng, cfg.objective);
            row = evaluate_instance(inst, cfg.gamma_max, cfg.rate_grid, key);
            row.attempts = attempt + 1;
            if (row.converged) break;
        }
        row.table = table;
        row.index = static_cast<int>(index);
        result.rows[slot] = std::move(row);
    });

    // Sequential reduction in slot order keeps the summary deterministic.
    for (std::size_t f = 0; f < cfg.families.size(); ++f) {
        for (std::size_t s = 0; s < cfg.servers.size(); ++s) {
            CellSummary cell;
            cell.table = table;
            cell.family = cfg.families[f];
            cell.servers = cfg.servers[s];
            const double inf = std::numeric_limits<double>::infinity();
            cell.worst_optimal = {inf, inf, -inf};
            cell.worst_tilde = {inf, inf, -inf};
            int used = 0;
            for (std::size_t i = 0; i < reps; ++i) {
                const RatioRow& row = result.rows[f * per_family + s * reps + i];
                ++cell.instances;
                cell.resampled += row.attempts - 1;
                if (!row.converged) ++cell.failures;
                if (!row.bound_ok) ++cell.bound_violations;
                if (row.excluded) {
                    ++cell.excluded;
                    continue;
                }
                ++used;
                auto accumulate = [](Ratios& avg, Ratios& worst, const Ratios& r) {
                    avg.objective += r.objective;
                    avg.revenue += r.revenue;
                    avg.cost += r.cost;
                    worst.objective = std::min(worst.objective, r.objective);
                    worst.revenue = std::min(worst.revenue, r.revenue);
                    worst.cost = std::max(worst.cost, r.cost);
                };
                accumulate(cell.average_optimal, cell.worst_optimal, row.optimal_static);
                accumulate(cell.average_tilde, cell.worst_tilde, row.tilde_static);
            }
            if (used > 0) {
                for (Ratios* r : {&cell.average_optimal, &cell.average_tilde}) {
                    r->objective /= used;
                    r->revenue /= used;
                    r->cost /= used;
                }
            } else {
                cell.worst_optimal = cell.worst_tilde = Ratios{};
            }
            result.cells.push_back(cell);
        }
    }
    return result;
}

double tightness_optimal_value(const QueueInstance& inst) {
    const double rate = tightness_optimal_rate(inst);
    if (!(rate > 0.0)) return 0.0;
    const double mu = inst.mu;
    return (mu * revenue_fn(inst.demand, rate) - inst.cost_rate * rate) / (mu + rate);
}

std::vector<TightnessRow> tightness_sweep(double kappa, const std::vector<double>& a_values) {
    std::vector<TightnessRow> rows;
    rows.reserve(a_values.size());
    for (double a : a_values) {
        const QueueInstance inst = tightness_instance(kappa, a);
        const double rate = tightness_optimal_rate(inst);
        const double tilde = rate * inst.mu / (inst.mu + rate);  // admitted only from the empty state
        TightnessRow row;
        row.a = a;
        row.optimal = tightness_optimal_value(inst);
        row.static_value = metrics(make_static(inst.demand, tilde, 0), inst).objective;
        row.ratio = row.static_value / row.optimal;
        rows.push_back(row);
    }
    return rows;
}

SojournExample sojourn_example(const std::string& label, const QueueInstance& base, int gamma_max, int rate_grid) {
    QueueInstance inst = base;
    inst.objective = Objective::Sojourn;
    SojournExample ex;
    ex.label = label;
    ex.instance = inst;

    const StaticChoice best_static = optimal_static(inst, gamma_max, rate_grid);
    SolverConfig cfg;
    if (best_static.policy.static_rate > 0.0) cfg.warm_starts.push_back(best_static.policy.rates);
    const SolveResult dyn = solve_direct(inst, cfg);

    ex.optimal = dyn.metrics.objective;
    ex.optimal_rates = dyn.policy.rates;
    ex.lambda_tilde = dyn.metrics.avg_arrival_rate;
    ex.tilde_value = metrics(make_static(inst.demand, ex.lambda_tilde, 0), inst).objective;
    ex.static_value = best_static.metrics.objective;
    ex.static_rate = best_static.policy.static_rate;
    ex.static_cutoff = best_static.policy.cutoff;
    ex.static_fraction = ex.optimal != 0.0 ? ex.static_value / ex.optimal : 0.0;
    return ex;
}

std::vector<SojournExample> sojourn_counterexamples() {
    QueueInstance linear;
    linear.demand = DemandModel::linear(5000.0, 6000.0);
    QueueInstance expo;
    expo.demand = DemandModel::exponential(0.463, 2.0);
    return {sojourn_example("linear a=5000 b=6000", linear), sojourn_example("exponential a=0.463 b=2", expo)};
}

std::string report_header() {
    return "table,family,servers,index,attempts,a,b,p0,mu,cost_rate,objective_kind,"
           "optimal_objective,optimal_revenue,optimal_cost,lambda_tilde,static_rate,static_cutoff,tilde_cutoff,"
           "static_objective_ratio,static_revenue_ratio,static_cost_ratio,"
           "tilde_objective_ratio,tilde_revenue_ratio,tilde_cost_ratio,converged,excluded,bound_ok";
}

std::string format_report(const std::vector<RatioRow>& rows, ReportFormat format) {
    if (format == ReportFormat::Json) return nlohmann::json(rows).dump(2) + "\n";
    std::string out = report_header() + "\n";
    for (const RatioRow& r : rows) {
        const QueueInstance& q = r.instance;
        const std::string cells[] = {
            std::to_string(r.table),
            std::string(to_string(r.family)),
            std::to_string(r.servers),
            std::to_string(r.index),
            std::to_string(r.attempts),
            num(q.demand.a),
            num(q.demand.b),
            num(q.demand.p0),
            num(q.mu),
            num(q.cost_rate),
            std::string(to_string(q.objective)),
            num(r.optimal_objective),
            num(r.optimal_revenue),
            num(r.optimal_cost),
            num(r.lambda_tilde),
            num(r.static_rate),
            std::to_string(r.static_cutoff),
            std::to_string(r.tilde_cutoff),
            num(r.optimal_static.objective),
            num(r.optimal_static.revenue),
            num(r.optimal_static.cost),
            num(r.tilde_static.objective),
            num(r.tilde_static.revenue),
            num(r.tilde_static.cost),
            r.converged ? "1" : "0",
            r.excluded ? "1" : "0",
            r.bound_ok ? "1" : "0",
        };
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out += ',';
            out += c;
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::vector<RatioRow> parse_csv_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != report_header()) throw std::runtime_error("report: unexpected header");
    std::vector<RatioRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 27) throw std::runtime_error("report: wrong column count");
        RatioRow r;
        r.table = std::stoi(c[0]);
        r.family = parse_family(c[1]);
        r.servers = std::stoi(c[2]);
        r.index = std::stoi(c[3]);
        r.attempts = std::stoi(c[4]);
        r.instance.demand = DemandModel{r.family, std::stod(c[5]), std::stod(c[6]), std::stod(c[7])};
        r.instance.mu = std::stod(c[8]);
        r.instance.cost_rate = std::stod(c[9]);
        r.instance.servers = r.servers;
        r.instance.objective = parse_objective(c[10]);
        r.optimal_objective = std::stod(c[11]);
        r.optimal_revenue = std::stod(c[12]);
        r.optimal_cost = std::stod(c[13]);
        r.lambda_tilde = std::stod(c[14]);
        r.static_rate = std::stod(c[15]);
        r.static_cutoff = std::stoi(c[16]);
        r.tilde_cutoff = std::stoi(c[17]);
        r.optimal_static = {std::stod(c[18]), std::stod(c[19]), std::stod(c[20])};
        r.tilde_static = {std::stod(c[21]), std::stod(c[22]), std::stod(c[23])};
        r.converged = c[24] == "1";
        r.excluded = c[25] == "1";
        r.bound_ok = c[26] == "1";
        rows.push_back(r);
    }
    return rows;
}

std::string format_cells(const std::vector<CellSummary>& cells, ReportFormat format) {
    if (format == ReportFormat::Json) return nlohmann::json(cells).dump(2) + "\n";
    std::string out =
        "table,family,servers,instances,excluded,resampled,failures,bound_violations,"
        "avg_static_objective,avg_static_revenue,avg_static_cost,avg_tilde_objective,avg_tilde_revenue,avg_tilde_cost,"
        "worst_static_objective,worst_static_revenue,worst_static_cost,"
        "worst_tilde_objective,worst_tilde_revenue,worst_tilde_cost\n";
    for (const CellSummary& c : cells) {
        out += std::to_string(c.table) + ',' + std::string(to_string(c.family)) + ',' + std::to_string(c.servers) + ',' +
               std::to_string(c.instances) + ',' + std::to_string(c.excluded) + ',' + std::to_string(c.resampled) + ',' +
               std::to_string(c.failures) + ',' + std::to_string(c.bound_violations);
        for (const Ratios* r : {&c.average_optimal, &c.average_tilde, &c.worst_optimal, &c.worst_tilde})
            out += ',' + num(r->objective) + ',' + num(r->revenue) + ',' + num(r->cost);
        out += '\n';
    }
    return out;
}

void write_report(const std::vector<RatioRow>& rows, const ExperimentConfig& cfg) {
    if (rows.empty()) throw std::invalid_argument("write_report: no rows");
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_report: cannot open " + cfg.output_path);
    out << format_report(rows, cfg.format);
    out.flush();
    if (!out) throw std::runtime_error("write_report: write failed for " + cfg.output_path);
}

}  // namespace statpricing
