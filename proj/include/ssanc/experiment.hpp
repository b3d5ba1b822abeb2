#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ssanc/config.hpp"

namespace ssanc::experiment {

struct ResultRow {
    std::string scenario_id;
    int delta = 0;
    int l_a = 0;
    double beta_divisor = 0.0;
    double rho_divisor = 0.0;
    double sd_db = std::numeric_limits<double>::quiet_NaN();
    double nr_db = std::numeric_limits<double>::quiet_NaN();
    double dsnr_db = std::numeric_limits<double>::quiet_NaN();
    double solve_time_s = std::numeric_limits<double>::quiet_NaN();
    double constraint_residual = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // non-empty marks a failed point; metric fields stay nan
};

struct RunOptions {
    int jobs = 0;         // worker threads; 0 picks the hardware concurrency
    bool use_cache = true;  // switchable so tests can diff cached vs recomputed runs
};

struct RunResult {
    std::vector<ResultRow> rows;  // ordered by (delta, l_a, beta_divisor, rho_divisor)
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> prep_wall_s;
    std::vector<double> point_wall_s;  // aligned with rows
    int failed_rows() const;
};

RunResult run_experiment(const config::ExperimentConfig& cfg, const RunOptions& opt = {});

// deterministic cost model for the dense solve, in units of 1e9 flops; keeps
// results.csv reproducible byte for byte (wall clock goes to timings.csv)
double nominal_solve_seconds(int n_filter, int n_constraints);

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& path);
void write_timings_csv(const std::string& path, const RunResult& run);

void emit_plots(const std::string& dir, const std::vector<ResultRow>& rows, int sample_rate_hz);

// results.csv, timings.csv and the line plots under dir
void emit_results(const std::string& dir, const RunResult& run, int sample_rate_hz);

}  // namespace ssanc::experiment
