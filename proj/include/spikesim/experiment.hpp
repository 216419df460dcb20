#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spikesim/config.hpp"
#include "spikesim/errors.hpp"
#include "spikesim/integrators.hpp"
#include "spikesim/spiketrain.hpp"

namespace spikesim {

struct BenchReport {
  Scheme scheme = Scheme::hybrid_adaptive;
  double wall_time_median = 0.0;  // seconds
  std::int64_t step_count = 0;
  std::optional<double> first_spike_time;
  std::optional<double> first_spike_w;
  std::size_t spike_count = 0;
  std::optional<PatternClass> pattern;
  double pattern_tolerance = 0.0;
  std::size_t transient_skip = 0;
  Termination terminated_by = Termination::horizon;
};

struct RunOutput {
  BenchReport report;
  SimulationResult result;
};

/// Runs the configured solver `repeat` times (the result of the last run is
/// kept; all runs are identical) and reports the median wall time.
RunOutput execute(const ExperimentConfig& config, int repeat);

/// Resolves a configured output path against `out_dir` (absolute paths are kept).
std::filesystem::path resolve_output(const std::filesystem::path& out_dir, const std::string& path);

/// Executes the config once per `repeat`, writes trajectory, spike and report
/// files under `out_dir` and returns the report. Solver failures are written
/// to the report file as an error record and rethrown.
BenchReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct ComparisonRow {
  std::string name;
  BenchReport report;
  std::optional<double> first_spike_delta;  // against the oracle row
  std::optional<double> first_w_delta;
};

/// One row per config; configs must share model, current and init.
std::vector<ComparisonRow> run_comparison(const std::vector<ExperimentConfig>& configs);

struct ErrorSweepRow {
  double theta = 0.0;
  double tau = 0.0;
  double spike_time_error = 0.0;
  double w_error = 0.0;
};

/// tau is the step of the base scheme (dt for euler / hybrid-fixed, epsilon for hybrid-adaptive).
std::vector<ErrorSweepRow> run_error_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                           const std::vector<double>& thetas);

std::string format_number(double x);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
void write_spikes_csv(std::ostream& out, const SpikeTrain& train);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void write_error_sweep_csv(std::ostream& out, const std::vector<ErrorSweepRow>& rows);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& bins);

/// Reads a spike CSV with header index,spike_time,w_at_spike. Throws Error{data}.
SpikeTrain read_spikes_csv(std::istream& in);

/// Report document: config echo plus results, or an error record.
std::string report_json(const ExperimentConfig& config, const BenchReport& report);
std::string error_report_json(const ExperimentConfig& config, const Error& error);
std::string pattern_json(const ResetSequence& seq, double tol, const PatternClass& pattern);

}  // namespace spikesim
