#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "statpricing/dynamic.hpp"
#include "statpricing/experiment.hpp"
#include "statpricing/rng.hpp"
#include "statpricing/static_policy.hpp"

using namespace statpricing;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("statpricing_" + name)).string();
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.families = {DemandFamily::Linear, DemandFamily::Logistic};
    cfg.servers = {1, 2};
    cfg.replications = 3;
    cfg.seed = 17;
    cfg.threads = 1;
    return cfg;
}

}  // namespace

TEST(Sampling, LinearDrawsRespectMarketBound) {
    Rng rng(51);
    for (int i = 0; i < 5000; ++i) {
        const auto inst = sample_instance(DemandFamily::Linear, 1, rng);
        EXPECT_LE(inst.demand.a, inst.demand.b);
        EXPECT_EQ(inst.mu, 1.0);
        EXPECT_EQ(inst.cost_rate, 1.0);
    }
}

TEST(Sampling, RangesAndFamilies) {
    Rng rng(52);
    for (int i = 0; i < 2000; ++i) {
        const auto inst = sample_instance(DemandFamily::Logistic, 3, rng, Objective::Sojourn);
        EXPECT_EQ(inst.demand.family, DemandFamily::Logistic);
        EXPECT_EQ(inst.servers, 3);
        EXPECT_EQ(inst.objective, Objective::Sojourn);
        EXPECT_GE(inst.demand.a, 0.1);
        EXPECT_LT(inst.demand.a, 5.0);
        EXPECT_GE(inst.demand.b, 0.5);
        EXPECT_LT(inst.demand.b, 10.0);
        EXPECT_GE(inst.demand.p0, 0.0);
        EXPECT_LT(inst.demand.p0, 20.0);
    }
}

TEST(Sampling, FixedSeedSameSequence) {
    Rng a(53), b(53);
    for (int i = 0; i < 100; ++i) {
        const auto x = sample_instance(DemandFamily::Exponential, 1, a);
        const auto y = sample_instance(DemandFamily::Exponential, 1, b);
        EXPECT_EQ(x.demand.a, y.demand.a);
        EXPECT_EQ(x.demand.b, y.demand.b);
    }
}

TEST(Sampling, SensitivityMarginalIsUniform) {
    Rng rng(54);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = sample_instance(DemandFamily::Exponential, 1, rng).demand.a;
    // KS critical value at level 0.01.
    EXPECT_LT(oracle::ks_uniform(xs, 0.1, 5.0), 1.628 / std::sqrt(10000.0));
}

TEST(Tables, SingleReplicationCell) {
    ExperimentConfig cfg;
    cfg.families = {DemandFamily::Exponential};
    cfg.servers = {1};
    cfg.replications = 1;
    const auto result = replicate_table(2, cfg);
    ASSERT_EQ(result.rows.size(), 1u);
    ASSERT_EQ(result.cells.size(), 1u);
    const auto& r = result.rows[0];
    EXPECT_GE(r.optimal_static.objective, 0.0);
    EXPECT_LE(r.optimal_static.objective, 1.0 + 1e-6);
    EXPECT_GE(r.tilde_static.objective, 0.0);
    EXPECT_LE(r.tilde_static.objective, 1.0 + 1e-6);
}

TEST(Tables, RowsRespectGuaranteesAndOrdering) {
    const auto result = replicate_table(1, small_config());
    ASSERT_EQ(result.rows.size(), 12u);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        EXPECT_EQ(r.index, static_cast<int>(i % 3));
        EXPECT_TRUE(r.bound_ok);
        if (r.excluded) continue;
        EXPECT_GE(r.tilde_static.objective, profit_guarantee(r.servers) - 1e-6);
        EXPECT_LE(r.optimal_static.objective, 1.0 + 1e-6);
        EXPECT_GE(r.optimal_static.objective, r.tilde_static.objective - 1e-9);
    }
    for (const auto& c : result.cells) {
        EXPECT_LE(c.worst_optimal.objective, c.average_optimal.objective + 1e-15);
        EXPECT_LE(c.worst_tilde.objective, c.average_tilde.objective + 1e-15);
        EXPECT_EQ(c.bound_violations, 0);
    }
    EXPECT_EQ(result.failure_rate(), 0.0);
}

TEST(Tables, SojournTablesUseSojournObjective) {
    auto cfg = small_config();
    cfg.replications = 2;
    const auto result = replicate_table(4, cfg);
    for (const auto& r : result.rows) EXPECT_EQ(r.instance.objective, Objective::Sojourn);
    EXPECT_THROW(replicate_table(5, cfg), std::invalid_argument);
}

TEST(Tables, ThreadCountDoesNotChangeResults) {
    auto cfg = small_config();
    const auto one = format_report(replicate_table(2, cfg).rows, ReportFormat::Csv);
    cfg.threads = 3;
    const auto three = format_report(replicate_table(2, cfg).rows, ReportFormat::Csv);
    EXPECT_EQ(one, three);
}

TEST(Reports, CsvRoundTrip) {
    const auto rows = replicate_table(2, small_config()).rows;
    const auto parsed = parse_csv_report(format_report(rows, ReportFormat::Csv));
    ASSERT_EQ(parsed.size(), rows.size());
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_TRUE(close(parsed[i].optimal_objective, rows[i].optimal_objective));
        EXPECT_TRUE(close(parsed[i].tilde_static.cost, rows[i].tilde_static.cost));
        EXPECT_TRUE(close(parsed[i].instance.demand.p0, rows[i].instance.demand.p0));
        EXPECT_EQ(parsed[i].family, rows[i].family);
        EXPECT_EQ(parsed[i].static_cutoff, rows[i].static_cutoff);
        EXPECT_EQ(parsed[i].excluded, rows[i].excluded);
    }
}

TEST(Reports, JsonSchema) {
    const auto rows = replicate_table(2, small_config()).rows;
    const auto j = nlohmann::json::parse(format_report(rows, ReportFormat::Json));
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), rows.size());
    for (const auto& r : j) {
        for (const char* key : {"table", "family", "servers", "index", "instance", "optimal_objective", "lambda_tilde",
                                "optimal_static", "tilde_static", "converged", "excluded", "bound_ok"})
            EXPECT_TRUE(r.contains(key)) << key;
        for (const char* key : {"objective", "revenue", "cost"}) {
            EXPECT_TRUE(r["optimal_static"][key].is_number());
            EXPECT_TRUE(r["tilde_static"][key].is_number());
        }
        EXPECT_TRUE(r["instance"]["demand"]["family"].is_string());
    }
}

TEST(Reports, EqualSeedsGiveIdenticalFiles) {
    auto cfg = small_config();
    cfg.families = {DemandFamily::Linear, DemandFamily::Exponential};
    cfg.servers = {1};
    cfg.replications = 5;
    for (auto format : {ReportFormat::Csv, ReportFormat::Json}) {
        cfg.format = format;
        cfg.output_path = temp_path("a");
        write_report(replicate_table(2, cfg).rows, cfg);
        const auto first = read_file(cfg.output_path);
        cfg.output_path = temp_path("b");
        write_report(replicate_table(2, cfg).rows, cfg);
        EXPECT_EQ(first, read_file(cfg.output_path));
        std::remove(temp_path("a").c_str());
        std::remove(temp_path("b").c_str());
    }
}

TEST(Reports, UnwritablePathThrows) {
    auto cfg = small_config();
    cfg.output_path = "/nonexistent_dir/report.csv";
    RatioRow row;
    EXPECT_THROW(write_report({row}, cfg), std::runtime_error);
    EXPECT_THROW(write_report({}, cfg), std::invalid_argument);
}

TEST(Tightness, RatioDecreasesTowardHalf) {
    const auto rows = tightness_sweep(1.5, {10, 1e2, 1e3, 1e4, 1e5, 1e6});
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].ratio, rows[i - 1].ratio);
    EXPECT_GE(rows.back().ratio, 0.5);
    EXPECT_LE(rows.back().ratio, 0.51);
}

TEST(Tightness, ClosedFormMatchesSolver) {
    for (double a : {10.0, 100.0, 1000.0}) {
        const auto inst = tightness_instance(1.3, a);
        const auto vi = solve_occupancy_vi(inst, SolverConfig{});
        EXPECT_NEAR(tightness_optimal_value(inst), vi.metrics.objective, 1e-8);
    }
}
