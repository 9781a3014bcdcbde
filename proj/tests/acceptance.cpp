// Acceptance suite: one PASS/FAIL line per criterion. `--only N` runs a single criterion.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "statpricing/dynamic.hpp"
#include "statpricing/experiment.hpp"
#include "statpricing/markov.hpp"
#include "statpricing/rng.hpp"
#include "statpricing/sim.hpp"
#include "statpricing/static_policy.hpp"

using namespace statpricing;

namespace {

// Collects sub-check outcomes; the first few failures are kept for the report line.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        ++total_;
        if (ok) return;
        ++failed_;
        if (messages_.size() < 4) messages_.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream os;
        os.precision(10);
        os << what << " = " << got << " (want " << want << " +/- " << tol << ")";
        expect(std::abs(got - want) <= tol, os.str());
    }
    void note(const std::string& s) { notes_.push_back(s); }

    bool passed() const { return failed_ == 0; }
    std::string summary() const {
        std::ostringstream os;
        os << (total_ - failed_) << "/" << total_ << " checks";
        for (const auto& n : notes_) os << "; " << n;
        for (const auto& m : messages_) os << "; FAILED " << m;
        return os.str();
    }

private:
    int total_ = 0;
    int failed_ = 0;
    std::vector<std::string> messages_;
    std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void guarantee_constants(Checks& c) {
    c.near(g_single(0), 1.0, 1e-9, "g(0)");
    c.near(g_single(1), 2.0 / std::sqrt(3.0), 1e-9, "g(1)");
    c.near(g_single(2), 1.532, 5e-4, "g(2)");
    c.near(g_single(3), 2.0, 1e-9, "g(3)");
    c.near(profit_guarantee(1), 0.5, 1e-12, "profit_guarantee(1)");
    c.near(profit_guarantee(10), 0.785, 1e-3, "profit_guarantee(10)");
    c.near(profit_guarantee(100), 0.924, 1e-3, "profit_guarantee(100)");
    c.note("g(2)=" + fmt(g_single(2)) + " profit(10)=" + fmt(profit_guarantee(10)) +
           " profit(100)=" + fmt(profit_guarantee(100)));
}

void bicriteria_point(Checks& c) {
    c.near(revenue_guarantee(5, 3), 0.830, 1e-3, "revenue_guarantee(5,3)");
    c.near(g_multi(5, 3), 1.18, 1e-2, "g_multi(5,3)");
    int found = -1;
    for (int g = 9; g <= 64 && found < 0; ++g)
        if (revenue_guarantee(g, 10) >= 0.90 && g_multi(g, 10) <= 1.20) found = g;
    c.expect(found >= 0, "no gamma with revenue >= 0.90 and cost <= 1.20 at C=10");
    if (found >= 0)
        c.note("C=10 gamma=" + std::to_string(found) + " revenue=" + fmt(revenue_guarantee(found, 10)) +
               " cost=" + fmt(g_multi(found, 10)));
}

void sojourn_reductions(Checks& c) {
    for (int g = 0; g <= 10; ++g) {
        const auto s = sojourn_guarantees(g, 1);
        c.near(s.revenue, (g + 1.0) / (g + 2.0), 1e-12, "sojourn revenue factor gamma=" + std::to_string(g));
        c.near(s.sojourn, (g + 2.0) / 2.0, 1e-12, "sojourn factor gamma=" + std::to_string(g));
    }
    for (int servers = 1; servers <= 10; ++servers)
        c.near(sojourn_guarantees(servers - 1, servers).sojourn, 1.0, 1e-12, "sojourn factor C=" + std::to_string(servers));
}

void guarantee_suite(Checks& c) {
    const int per_setting = 500;
    int solved = 0;
    double worst_profit_margin = 1e9;
    for (DemandFamily family : {DemandFamily::Linear, DemandFamily::Exponential, DemandFamily::Logistic}) {
        for (int servers : {1, 3}) {
            for (int i = 0; i < per_setting; ++i) {
                Rng rng(derive_seed(4, {static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(servers),
                                        static_cast<std::uint64_t>(i)}));
                const QueueInstance inst = sample_instance(family, servers, rng);
                const SolveResult dyn = solve_occupancy_vi(inst, SolverConfig{});
                ++solved;
                const std::string tag = std::string(to_string(family)) + " C=" + std::to_string(servers) + " #" +
                                        std::to_string(i);
                const PolicyMetrics& opt = dyn.metrics;
                const double lt = opt.avg_arrival_rate;
                c.expect(dyn.converged, tag + " value iteration did not converge");

                const auto base = metrics(make_static(inst.demand, lt, servers - 1), inst);
                const double bound = profit_guarantee(servers) * opt.objective;
                worst_profit_margin = std::min(worst_profit_margin, base.objective - bound);
                c.expect(base.objective >= bound - 1e-6, tag + " profit factor");
                for (int g = servers - 1; g <= servers + 4; ++g) {
                    const auto m = metrics(make_static(inst.demand, lt, g), inst);
                    c.expect(m.revenue >= revenue_guarantee(g, servers) * opt.revenue - 1e-6,
                             tag + " revenue factor gamma=" + std::to_string(g));
                    c.expect(m.congestion_cost <= g_multi(g, servers) * opt.congestion_cost + 1e-6,
                             tag + " cost factor gamma=" + std::to_string(g));
                }
                const double jensen = lt > 0.0 ? revenue_fn(inst.demand, lt) : 0.0;
                c.expect(opt.revenue <= jensen + 1e-8, tag + " Jensen bound");
                c.expect(lt < inst.capacity(), tag + " lambda_tilde < mu C");
                c.expect(verify_monotone(dyn, inst, 1e-5 * inst.max_rate()), tag + " monotone rates");
            }
        }
    }
    c.note(std::to_string(solved) + " instances, min profit margin " + fmt(worst_profit_margin));
}

void tightness_family(Checks& c) {
    const std::vector<double> as = {10, 1e2, 1e3, 1e4, 1e5, 1e6};
    const auto rows = tightness_sweep(1.5, as);
    bool decreasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].ratio < rows[i - 1].ratio;
    c.expect(decreasing, "ratio not decreasing in a");
    for (const auto& r : rows) c.expect(r.ratio >= 0.5, "ratio below 1/2 at a=" + fmt(r.a));
    c.expect(rows.back().ratio >= 0.5 && rows.back().ratio <= 0.51, "ratio at a=1e6 is " + fmt(rows.back().ratio));
    c.note("ratio(1e6)=" + fmt(rows.back().ratio));

    // Thresholded against unthresholded static pricing at a = 1000, kappa = 1.05.
    const QueueInstance inst = tightness_instance(1.05, 1000.0);
    const double thresholded = optimal_static(inst).metrics.objective;
    const double unthresholded = optimal_unthresholded(inst).objective;
    const double ratio = unthresholded / thresholded;
    c.near(thresholded, 0.37, 0.05 * 0.37, "thresholded static value");
    c.near(unthresholded, 0.0006, 0.05 * 0.0006, "unthresholded static value");
    c.near(ratio, 0.016, 0.05 * 0.016, "unthresholded / thresholded");
    c.note("thresholded=" + fmt(thresholded) + " unthresholded=" + fmt(unthresholded) + " ratio=" + fmt(ratio));
}

void sojourn_counterexamples_check(Checks& c) {
    QueueInstance linear;
    linear.demand = DemandModel::linear(5000.0, 6000.0);
    const auto lin = sojourn_example("linear", linear);
    c.near(lin.optimal, 0.17, 0.02, "linear Z_s(optimal)");
    c.near(lin.tilde_value, -0.4, 0.05, "linear Z_s(lambda-tilde static, cutoff 0)");

    QueueInstance expo;
    expo.demand = DemandModel::exponential(0.463, 2.0);
    const auto ex = sojourn_example("exponential", expo);
    c.near(ex.static_fraction, 0.001, 0.0005, "exponential optimal static fraction");
    c.note("linear optimal=" + fmt(lin.optimal) + " tilde=" + fmt(lin.tilde_value) + "; exponential optimal=" +
           fmt(ex.optimal) + " static=" + fmt(ex.static_value) + " fraction=" + fmt(ex.static_fraction));
}

void oracle_equivalence(Checks& c) {
    Rng rng(7001);
    double worst_rel = 0.0;
    for (int i = 0; i < 100; ++i) {
        const QueueInstance inst = oracle::random_instance(rng, 1 + static_cast<int>(rng.index(3)));
        SolverConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(i);
        const auto vi = solve_occupancy_vi(inst, cfg);
        const auto direct = solve_direct(inst, cfg);
        // Values below 1e-9 count as zero profit; there the gap is rounding noise.
        const double scale = std::max({std::abs(vi.metrics.objective), std::abs(direct.metrics.objective), 1e-5});
        const double rel = std::abs(vi.metrics.objective - direct.metrics.objective) / scale;
        worst_rel = std::max(worst_rel, rel);
        c.expect(rel <= 1e-4, "VI vs direct instance " + std::to_string(i) + " relative gap " + fmt(rel));
    }
    double worst_brute = 0.0;
    for (int i = 0; i < 20; ++i) {
        QueueInstance inst = oracle::random_instance(rng, 1 + static_cast<int>(rng.index(3)));
        inst.demand.b = rng.uniform(0.5, 3.0);
        if (inst.demand.family == DemandFamily::Linear) inst.demand.a = rng.uniform(0.1, inst.demand.b);
        SolverConfig cfg;
        cfg.truncation = TruncationRule::fixed(4);
        const double ref = oracle::brute_force_m4(inst, 60);
        for (const auto& r : {solve_occupancy_vi(inst, cfg), solve_direct(inst, cfg)}) {
            const double rel = std::abs(r.metrics.objective - ref) / std::max(std::abs(ref), 1e-5);
            worst_brute = std::max(worst_brute, rel);
            c.expect(rel <= 1e-4,
                     "M=4 brute force instance " + std::to_string(i) + " gap " + fmt(rel));
        }
    }
    QueueInstance unit;
    unit.demand = DemandModel::linear(1.0, 100.0);
    double worst_mm1 = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double rate = rng.uniform(0.0, 4.0);
        const int cutoff = static_cast<int>(rng.index(40));
        const auto closed = stationary_mm1_truncated(rate, cutoff);
        const auto generic = stationary_distribution(Policy::threshold(rate, cutoff), unit);
        for (std::size_t k = 0; k < closed.probs.size(); ++k)
            worst_mm1 = std::max(worst_mm1, std::abs(closed.probs[k] - generic.probs[k]));
    }
    c.expect(worst_mm1 <= 1e-12, "M/M/1 closed form differs by " + fmt(worst_mm1));
    c.note("VI/direct max rel " + fmt(worst_rel) + ", brute force max rel " + fmt(worst_brute) + ", M/M/1 max abs " +
           fmt(worst_mm1));
}

void simulation_validation(Checks& c) {
    Rng rng(8001);
    int multi = 0;
    double worst_z = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int servers = i % 3 == 2 ? 3 : 1 + static_cast<int>(rng.index(2));
        multi += servers == 3;
        QueueInstance inst = oracle::random_instance(rng, servers, i % 4 == 3 ? Objective::Sojourn : Objective::Occupancy);
        inst.demand.b = servers * rng.uniform(1.5, 3.0);
        if (inst.demand.family == DemandFamily::Linear) inst.demand.a = rng.uniform(0.1, inst.demand.b);
        // Rates in [0.3 C, 1.5 C] keep every state of the chain visited.
        Policy policy;
        const int states = servers + static_cast<int>(rng.index(6));
        if (i % 2 == 0) {
            policy = make_static(inst.demand, servers * rng.uniform(0.3, 1.5), states - 1);
        } else {
            std::vector<double> rates(states);
            for (auto& r : rates) r = servers * rng.uniform(0.3, 1.5);
            std::sort(rates.begin(), rates.end(), std::greater<>());
            policy = Policy::dynamic(rates);
        }
        const auto rep = compare_to_analytic(policy, inst, 1000000, derive_seed(8, {static_cast<std::uint64_t>(i)}));
        worst_z = std::max(worst_z, rep.max_z_score);
        c.expect(rep.pass, "pair " + std::to_string(i) + " C=" + std::to_string(servers) + " max|z|=" +
                               fmt(rep.max_z_score));
    }
    c.expect(multi >= 10, "too few C=3 cases");

    QueueInstance inst;
    inst.demand = DemandModel::linear(1.0, 4.0);
    const Policy p = make_static(inst.demand, 1.0, 3);
    const auto sim = simulate(p, inst, 1000000, 99);
    PolicyMetrics corrupted = metrics(p, inst);
    corrupted.expected_number *= 1.10;
    corrupted.revenue *= 1.10;
    const auto negative = compare_to_values(corrupted, sim);
    c.expect(!negative.pass, "negative control passed with max|z|=" + fmt(negative.max_z_score));
    c.note("50 pairs (" + std::to_string(multi) + " with C=3), worst max|z| " + fmt(worst_z, 3) +
           ", negative control max|z| " + fmt(negative.max_z_score, 3));
}

void table_replication(Checks& c) {
    // Average objective ratios (optimal static, lambda-tilde static) and worst cases, by (family, C).
    struct Cell {
        double avg_opt, avg_tilde, worst_opt, worst_tilde;
    };
    const std::map<std::pair<DemandFamily, int>, Cell> reference = {
        {{DemandFamily::Linear, 1}, {0.980, 0.870, 0.930, 0.757}},
        {{DemandFamily::Linear, 3}, {0.978, 0.977, 0.954, 0.951}},
        {{DemandFamily::Linear, 10}, {0.999, 0.999, 0.999, 0.999}},
        {{DemandFamily::Exponential, 1}, {0.974, 0.971, 0.897, 0.890}},
        {{DemandFamily::Exponential, 3}, {0.998, 0.997, 0.974, 0.971}},
        {{DemandFamily::Exponential, 10}, {0.999, 0.999, 0.999, 0.999}},
        {{DemandFamily::Logistic, 1}, {0.960, 0.852, 0.891, 0.730}},
        {{DemandFamily::Logistic, 3}, {0.978, 0.946, 0.933, 0.879}},
        {{DemandFamily::Logistic, 10}, {0.999, 0.999, 0.992, 0.989}},
    };
    ExperimentConfig cfg;
    cfg.replications = 200;
    cfg.seed = 9;
    const TableResult table = replicate_table(2, cfg);
    double worst_gap = 0.0;
    for (const CellSummary& cell : table.cells) {
        const Cell& ref = reference.at({cell.family, cell.servers});
        const std::string tag = std::string(to_string(cell.family)) + " C=" + std::to_string(cell.servers);
        const double gap_opt = std::abs(cell.average_optimal.objective - ref.avg_opt);
        const double gap_tilde = std::abs(cell.average_tilde.objective - ref.avg_tilde);
        worst_gap = std::max({worst_gap, gap_opt, gap_tilde});
        c.expect(gap_opt <= 0.03, tag + " average static ratio " + fmt(cell.average_optimal.objective, 4));
        c.expect(gap_tilde <= 0.03, tag + " average tilde ratio " + fmt(cell.average_tilde.objective, 4));
        c.expect(cell.worst_optimal.objective >= ref.worst_opt - 0.05,
                 tag + " worst static ratio " + fmt(cell.worst_optimal.objective, 4));
        c.expect(cell.worst_tilde.objective >= ref.worst_tilde - 0.05,
                 tag + " worst tilde ratio " + fmt(cell.worst_tilde.objective, 4));
    }
    c.expect(table.failure_rate() <= 0.01, "solver failure rate " + fmt(table.failure_rate()));
    c.note("9 cells x 200 replications, largest gap to reference averages " + fmt(worst_gap, 3));
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Checks&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-9)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "guarantee constants", guarantee_constants},
        {2, "multi-server bi-criteria point", bicriteria_point},
        {3, "sojourn reductions", sojourn_reductions},
        {4, "guarantee property suite", guarantee_suite},
        {5, "tightness family", tightness_family},
        {6, "sojourn counterexamples", sojourn_counterexamples_check},
        {7, "oracle equivalence", oracle_equivalence},
        {8, "simulation validation", simulation_validation},
        {9, "table replication", table_replication},
    };
    int failures = 0;
    for (const auto& cr : criteria) {
        if (only != 0 && cr.id != only) continue;
        Checks checks;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(checks);
        } catch (const std::exception& e) {
            checks.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %d %s (%.1fs): %s\n", checks.passed() ? "PASS" : "FAIL", cr.id, cr.name, secs,
                    checks.summary().c_str());
        std::fflush(stdout);
        failures += !checks.passed();
    }
    return failures == 0 ? 0 : 1;
}
