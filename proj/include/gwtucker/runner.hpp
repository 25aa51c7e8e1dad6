#pragma once

#include <string>
#include <vector>

#include "gwtucker/archive.hpp"
#include "gwtucker/config.hpp"
#include "gwtucker/metrics.hpp"
#include "gwtucker/sinr.hpp"

namespace gwt {

struct ExperimentResult {
    StorageModel storage;
    SolveTrace trace;
    SinrReport full_report;
    SinrReport compressed_report;
    double t_full_seconds = 0.0;        // median over repetitions
    double t_compressed_seconds = 0.0;  // median over repetitions
    Speedup rt;
    ErrorSummary error;
};

struct SweepRow {
    int value = 0;
    double r_s = 0.0;
    double r_t = 0.0;
    double e_c = 0.0;
};

/// Full chain for one configuration: generate, compress, run both SINR
/// pipelines (warmup discarded, median of `repetitions` timed runs), and
/// score. Deterministic for a fixed seed except wall-clock timings.
ExperimentResult run_experiment(const ExperimentConfig& config, int repetitions = 5);

/// run_experiment plus report.json, table.txt and compressed.gwtk in
/// config.out_dir.
ExperimentResult run_experiment_files(const ExperimentConfig& config, int repetitions = 5);

/// Storage-only report: R_s from the count formulas, no channel data.
/// Writes report.json and table.txt when write_files is set.
StorageModel run_storage_only(const ExperimentConfig& config, bool write_files);

/// One row per swept rank value; writes sweep.csv
/// (header "axis,Rs,Rt,ec") in config.out_dir.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, int repetitions = 3);

// Report serialization, exposed for the CLI and tests.
std::string report_json_text(const ExperimentConfig& config, const ExperimentResult& result);
std::string report_table_text(const ExperimentConfig& config, const ExperimentResult* result,
                              const StorageModel& storage);
std::string sweep_csv_text(const std::vector<SweepRow>& rows);

}  // namespace gwt
