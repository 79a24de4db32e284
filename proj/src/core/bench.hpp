#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cgc.hpp"
#include "transfer.hpp"

// Experiment driver behind the phicgc command line: heat-equation runs
// reported as matvecs and tolerances per grid, plus the verification suite.
namespace phicgc::bench {

enum class ProblemKind { kHeat1d, kHeat3d };

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemKind problem = ProblemKind::kHeat1d;
  std::vector<Index> extents;
  // Problem defaults when absent.
  std::optional<double> T;
  std::optional<double> rel_tol;
  Index levels = 2;
  transfer::InterpolationMethod transfer_method = transfer::InterpolationMethod::kCubicSpline;
  Index krylov_max_dim = 30;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  cgc::OmegaSource omega_source = cgc::OmegaSource::kHierarchy;
  double reference_rel_tol = 1e-13;
  Index reference_max_dim = 100;
};

// Throws Error(kConfig) with the offending field named.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

struct MethodRow {
  std::string method;
  Index levels = 1;
  double error = 0.0;
  // Coarse-grid error estimate relative to the reference norm.
  std::optional<double> estimate;
  double wall_seconds = 0.0;
  std::vector<std::uint64_t> matvecs;
  std::vector<double> tolerances;
};

struct ExperimentResult {
  std::vector<MethodRow> rows;
  std::string csv_path;
  std::string markdown_path;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string format_csv(const std::vector<MethodRow>& rows);
std::string format_markdown(const std::vector<MethodRow>& rows, const std::string& title);
std::vector<MethodRow> parse_csv(const std::string& text);
// Concatenates the rows of several CSV files into one table.
std::string format_table(const std::vector<std::string>& csv_paths, bool markdown);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class Suite { kFast, kFull };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  Suite suite = Suite::kFast;
  std::uint64_t seed = 1;
  // Fault injection: multiplies every coarse tolerance in the CGC runs.
  double coarse_tolerance_skew = 1.0;
};

std::vector<CheckResult> verify(const VerifyOptions& options,
                                const std::function<void(const CheckResult&)>& on_result = {});

}  // namespace phicgc::bench
