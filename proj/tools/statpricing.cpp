// Command-line front end: solvers, static policies, guarantee grids, table
// replication, tightness sweeps and simulation.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "statpricing/dynamic.hpp"
#include "statpricing/experiment.hpp"
#include "statpricing/serialize.hpp"
#include "statpricing/sim.hpp"
#include "statpricing/static_policy.hpp"

using namespace statpricing;
using nlohmann::json;

namespace {

struct InstanceArgs {
    std::string family = "linear";
    double a = 1.0;
    double b = 2.0;
    double p0 = 0.0;
    double mu = 1.0;
    int servers = 1;
    double cost = 1.0;
    std::string objective = "occupancy";

    QueueInstance build() const {
        QueueInstance inst;
        inst.demand = DemandModel{parse_family(family), a, b, p0};
        inst.mu = mu;
        inst.servers = servers;
        inst.cost_rate = cost;
        inst.objective = parse_objective(objective);
        inst.validate();
        return inst;
    }
};

void add_instance_flags(CLI::App* cmd, InstanceArgs& args) {
    cmd->add_option("--family", args.family, "linear | exponential | logistic")
        ->check(CLI::IsMember({"linear", "exponential", "logistic"}));
    cmd->add_option("--a", args.a, "price sensitivity");
    cmd->add_option("--b", args.b, "market size (rate at price zero)");
    cmd->add_option("--p0", args.p0, "logistic midpoint");
    cmd->add_option("--mu", args.mu, "per-server service rate");
    cmd->add_option("--servers,-C", args.servers, "number of servers");
    cmd->add_option("--cost", args.cost, "congestion cost rate");
    cmd->add_option("--objective", args.objective, "occupancy | sojourn")
        ->check(CLI::IsMember({"occupancy", "sojourn"}));
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Static and dynamic pricing for M/M/C queues"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int reps = 200;
    std::string out_path;
    std::string format = "csv";
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--reps", reps, "replications per table cell")->capture_default_str();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    InstanceArgs solve_args;
    std::string method = "direct";
    int states = 0;
    auto* solve = app.add_subcommand("solve", "optimal dynamic policy of one instance (JSON)");
    add_instance_flags(solve, solve_args);
    solve->add_option("--method", method, "vi | direct")->check(CLI::IsMember({"vi", "direct"}));
    solve->add_option("--states", states, "fixed truncation (0 = adaptive)");

    InstanceArgs static_args;
    int gamma_max = 64;
    int rate_grid = 1024;
    auto* stat = app.add_subcommand("static", "optimal static and lambda-tilde policies (JSON)");
    add_instance_flags(stat, static_args);
    stat->add_option("--gamma-max", gamma_max, "largest cutoff searched");
    stat->add_option("--rate-grid", rate_grid, "rate grid size before refinement");

    std::vector<int> guarantee_servers = {1};
    int guarantee_gamma_max = 10;
    auto* guarantees = app.add_subcommand("guarantees", "guarantee factors over a (C, gamma) grid");
    guarantees->add_option("--servers,-C", guarantee_servers, "server counts")->capture_default_str();
    guarantees->add_option("--gamma-max", guarantee_gamma_max, "largest cutoff")->capture_default_str();

    int table = 2;
    std::vector<std::string> families = {"linear", "exponential", "logistic"};
    std::vector<int> table_servers = {1, 3, 10};
    int threads = 0;
    std::string rows_path;
    auto* tables = app.add_subcommand("tables", "replicate a ratio table; cell summary to --out, rows to --rows");
    tables->add_option("--table", table, "1 | 2 | 3 | 4")->required()->check(CLI::Range(1, 4));
    tables->add_option("--families", families, "demand families")->capture_default_str();
    tables->add_option("--servers,-C", table_servers, "server counts")->capture_default_str();
    tables->add_option("--threads", threads, "worker threads (0 = all cores)");
    tables->add_option("--rows", rows_path, "per-instance ratio rows");

    double kappa = 1.5;
    std::vector<double> a_values = {10, 100, 1000, 10000, 100000, 1000000};
    bool counterexamples = false;
    auto* tight = app.add_subcommand("tightness", "tightness sweep for b = kappa a");
    tight->add_option("--kappa", kappa, "ratio b / a in (1, 2)")->capture_default_str();
    tight->add_option("--a", a_values, "sensitivities to sweep");
    tight->add_flag("--sojourn-examples", counterexamples, "also solve the sojourn counterexamples (JSON only)");

    InstanceArgs sim_args;
    double sim_rate = 1.0;
    int sim_cutoff = 0;
    std::vector<double> sim_rates;
    std::uint64_t events = 1000000;
    bool compare = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate a policy and emit the SimResult (JSON)");
    add_instance_flags(simulate_cmd, sim_args);
    simulate_cmd->add_option("--rate", sim_rate, "static rate");
    simulate_cmd->add_option("--cutoff", sim_cutoff, "static cutoff");
    simulate_cmd->add_option("--rates", sim_rates, "explicit state-dependent rates (overrides --rate/--cutoff)");
    simulate_cmd->add_option("--events", events, "event horizon")->capture_default_str();
    simulate_cmd->add_flag("--compare", compare, "also report z-scores against the exact metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        const ReportFormat fmt = parse_format(format);
        if (*solve) {
            const QueueInstance inst = solve_args.build();
            SolverConfig cfg;
            cfg.seed = seed;
            if (states > 0) cfg.truncation = TruncationRule::fixed(static_cast<std::size_t>(states));
            const SolveResult r = method == "vi" ? solve_occupancy_vi(inst, cfg) : solve_direct(inst, cfg);
            emit(json{{"instance", inst}, {"result", r}}.dump(2) + "\n", out_path);
        } else if (*stat) {
            const QueueInstance inst = static_args.build();
            const StaticChoice best = optimal_static(inst, gamma_max, rate_grid);
            SolverConfig cfg;
            cfg.seed = seed;
            if (best.policy.static_rate > 0.0) cfg.warm_starts.push_back(best.policy.rates);
            const SolveResult dyn = solve_direct(inst, cfg);
            const StaticChoice tilde = tilde_static(inst, dyn, gamma_max);
            json j{{"instance", inst}, {"optimal_static", best}, {"tilde_static", tilde}, {"dynamic", dyn.metrics}};
            emit(j.dump(2) + "\n", out_path);
        } else if (*guarantees) {
            std::vector<GuaranteeBundle> grid;
            for (int c : guarantee_servers)
                for (int g = c - 1; g <= guarantee_gamma_max; ++g) grid.push_back(guarantee_bundle(g, c));
            if (fmt == ReportFormat::Json) {
                emit(json(grid).dump(2) + "\n", out_path);
            } else {
                std::string text = "C,gamma,profit,revenue,cost,sojourn_revenue,sojourn_cost\n";
                for (const auto& g : grid)
                    text += std::to_string(g.servers) + ',' + std::to_string(g.gamma) + ',' + num(g.profit_factor) + ',' +
                            num(g.revenue_factor) + ',' + num(g.cost_factor) + ',' + num(g.sojourn_revenue_factor) +
                            ',' + num(g.sojourn_cost_factor) + '\n';
                emit(text, out_path);
            }
        } else if (*tables) {
            ExperimentConfig cfg;
            cfg.families.clear();
            for (const auto& f : families) cfg.families.push_back(parse_family(f));
            cfg.servers = table_servers;
            cfg.replications = reps;
            cfg.seed = seed;
            cfg.threads = threads;
            cfg.format = fmt;
            const TableResult result = replicate_table(table, cfg);
            emit(format_cells(result.cells, fmt), out_path);
            if (!rows_path.empty()) {
                cfg.output_path = rows_path;
                write_report(result.rows, cfg);
            }
            if (result.failure_rate() > 0.01) {
                std::cerr << "solver failure rate " << result.failure_rate() << " exceeds 1%\n";
                return 2;
            }
        } else if (*tight) {
            const auto rows = tightness_sweep(kappa, a_values);
            if (fmt == ReportFormat::Json || counterexamples) {
                json j{{"kappa", kappa}, {"rows", rows}};
                if (counterexamples) j["sojourn_examples"] = sojourn_counterexamples();
                emit(j.dump(2) + "\n", out_path);
            } else {
                std::string text = "a,optimal,static,ratio\n";
                for (const auto& r : rows)
                    text += num(r.a) + ',' + num(r.optimal) + ',' + num(r.static_value) + ',' + num(r.ratio) + '\n';
                emit(text, out_path);
            }
        } else if (*simulate_cmd) {
            const QueueInstance inst = sim_args.build();
            const Policy policy =
                sim_rates.empty() ? make_static(inst.demand, sim_rate, sim_cutoff) : Policy::dynamic(sim_rates);
            json j;
            if (compare) {
                const ComparisonReport rep = compare_to_analytic(policy, inst, events, seed);
                j = json{{"sim", rep.sim}, {"comparison", rep}};
            } else {
                j = simulate(policy, inst, events, seed);
            }
            emit(j.dump(2) + "\n", out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
