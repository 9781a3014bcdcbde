#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "statpricing/demand.hpp"
#include "statpricing/rng.hpp"

namespace statpricing {

enum class ReportFormat { Csv, Json };
std::string_view to_string(ReportFormat format);
ReportFormat parse_format(std::string_view name);

/// Settings for replicating one ratio table over a grid of (family, C) cells.
struct ExperimentConfig {
    std::vector<DemandFamily> families = {DemandFamily::Linear, DemandFamily::Exponential, DemandFamily::Logistic};
    std::vector<int> servers = {1, 3, 10};
    int replications = 200;
    std::uint64_t seed = 0;
    Objective objective = Objective::Occupancy;
    std::string output_path;
    ReportFormat format = ReportFormat::Csv;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 0;
    int gamma_max = 64;
    int rate_grid = 1024;
    /// Resampling budget per instance slot when the solver fails to converge.
    int max_attempts = 5;

    void validate() const;
};

/// Draws per the experimental protocol: a ~ U[0.1, 5], b ~ U[0.5, 10],
/// p0 ~ U[0, 20] (logistic only), mu = c = 1. Linear draws with a > b are redrawn.
QueueInstance sample_instance(DemandFamily family, int servers, Rng& rng,
                              Objective objective = Objective::Occupancy);

/// Ratios of one policy class against the dynamic optimum.
struct Ratios {
    double objective = 0.0;
    double revenue = 0.0;
    double cost = 0.0;
};

struct RatioRow {
    int table = 0;
    DemandFamily family = DemandFamily::Linear;
    int servers = 1;
    int index = 0;  // instance slot within the cell
    int attempts = 1;
    QueueInstance instance;

    double optimal_objective = 0.0;
    double optimal_revenue = 0.0;
    double optimal_cost = 0.0;
    double lambda_tilde = 0.0;

    double static_rate = 0.0;
    int static_cutoff = 0;
    int tilde_cutoff = 0;
    Ratios optimal_static;
    Ratios tilde_static;

    bool converged = true;
    /// Z* too small for ratios to mean anything; left out of aggregation.
    bool excluded = false;
    /// Occupancy rows: the lambda-tilde construction respects the profit factor for C.
    bool bound_ok = true;
};

struct CellSummary {
    int table = 0;
    DemandFamily family = DemandFamily::Linear;
    int servers = 1;
    int instances = 0;
    int excluded = 0;
    int resampled = 0;
    int failures = 0;  // slots that never converged
    int bound_violations = 0;
    Ratios average_optimal;
    Ratios average_tilde;
    /// Minimum objective and revenue ratios, maximum cost ratio.
    Ratios worst_optimal;
    Ratios worst_tilde;
};

struct TableResult {
    int table = 0;
    std::vector<RatioRow> rows;  // ordered by (family, C, index)
    std::vector<CellSummary> cells;

    double failure_rate() const;
};

/// Tables 1 and 3 report worst cases, 2 and 4 averages; 3 and 4 use the sojourn objective.
bool table_uses_sojourn(int table);
bool table_is_worst_case(int table);

/// Solves one instance: dynamic optimum (direct method, warm-started from the
/// best static policy), optimal static policy and the lambda-tilde construction.
RatioRow evaluate_instance(const QueueInstance& inst, int gamma_max, int rate_grid, std::uint64_t seed);

TableResult replicate_table(int table, const ExperimentConfig& cfg);

struct TightnessRow {
    double a = 0.0;
    double optimal = 0.0;       // closed form
    double static_value = 0.0;  // lambda-tilde static with cutoff 0
    double ratio = 0.0;
};

/// One row per a for the single-server family with b = kappa a.
std::vector<TightnessRow> tightness_sweep(double kappa, const std::vector<double>& a_values);

/// Closed-form optimum of a tightness instance: admit only when empty at the optimal rate.
double tightness_optimal_value(const QueueInstance& inst);

struct SojournExample {
    std::string label;
    QueueInstance instance;
    double optimal = 0.0;              // Z_s of the dynamic optimum
    std::vector<double> optimal_rates;
    double lambda_tilde = 0.0;
    double tilde_value = 0.0;          // lambda-tilde static with cutoff 0
    double static_value = 0.0;         // best static threshold policy
    double static_rate = 0.0;
    int static_cutoff = 0;
    double static_fraction = 0.0;      // static_value / optimal
};

SojournExample sojourn_example(const std::string& label, const QueueInstance& inst, int gamma_max = 64,
                               int rate_grid = 1024);

/// Two single-server sojourn instances where static pricing does poorly.
std::vector<SojournExample> sojourn_counterexamples();

/// Documented CSV header for ratio rows.
std::string report_header();

/// CSV (fixed header, 17 significant digits) or a JSON array. Throws std::runtime_error on I/O failure.
void write_report(const std::vector<RatioRow>& rows, const ExperimentConfig& cfg);
std::string format_report(const std::vector<RatioRow>& rows, ReportFormat format);
std::string format_cells(const std::vector<CellSummary>& cells, ReportFormat format);

/// Parses a CSV report produced by format_report.
std::vector<RatioRow> parse_csv_report(const std::string& text);

}  // namespace statpricing
