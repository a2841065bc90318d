#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diagpc/forms.hpp"

namespace diagpc {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { csv, json, plots };

struct ExperimentConfig {
  SampleMode mode;
  std::vector<double> T;
  /// Explicit window; when absent the mode default is used, narrowed to
  /// width T^-rho around the same center when rho is set.
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> rho;
  std::uint64_t seed = 0;
  std::size_t samples = 1;
  /// Fixed coefficients (alpha, beta or alpha_2..alpha_k); overrides sampling.
  std::optional<std::vector<double>> coeffs;
  int threads = 1;
  bool include_zero = false;
  std::string out;
  ReportFormat format = ReportFormat::csv;
  std::uint64_t mc_samples = 1'000'000;
  bool with_constant = true;
  std::optional<double> budget_seconds;
  std::uint64_t memory_cap = std::uint64_t{1} << 31;
  std::string cache_dir;
  /// Fill the ms column (wall time makes the CSV run-dependent).
  bool timing = false;
  bool diagnostics_analytic = false;
  bool diagnostics_reductions = false;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
};

/// Flat JSON object, keys named like the CLI flags ("mc-samples", "include-zero", ...).
ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

ReportFormat parse_format(const std::string& name);
SampleMode parse_mode(const std::string& mode, int k);

/// Window used for threshold T.
Window window_for(const ExperimentConfig& config, double T);

struct RunRecord {
  std::string mode;
  int k = 2;
  std::vector<double> coeffs;
  double T = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::uint64_t N = 0;
  std::int64_t count = 0;
  std::int64_t count_inner = 0;
  std::int64_t count_outer = 0;
  double R = 0.0;
  std::optional<double> c;
  std::optional<double> prediction;
  std::optional<double> ratio;
  std::uint64_t seed = 0;
  std::optional<double> ms;
  std::string error;  ///< empty on success
  std::string error_kind;
};

struct TAggregate {
  double T = 0.0;
  std::size_t runs = 0;
  std::optional<double> median_ratio;
  std::optional<double> median_abs_deviation;  ///< median |ratio - 1|
};

struct ExperimentReport {
  std::vector<RunRecord> records;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string version = kVersion;
  std::vector<TAggregate> aggregates;
  /// Slope of log median |ratio - 1| against log T.
  std::optional<double> trend_slope;
  /// Extra diagnostic entries as (key, value) in insertion order.
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// Rough wall-time estimate of enumerating and counting one run.
double estimate_run_seconds(const Form& form, double T);

/// Forms of the experiment, in sample order.
std::vector<Form> experiment_forms(const ExperimentConfig& config);

/// Runs every (form, T) in config order. Config and budget errors throw before
/// any work; per-run failures are recorded and the sweep continues.
ExperimentReport run(const ExperimentConfig& config);

std::string csv_header(const ExperimentReport& report, const ExperimentConfig& config);
void emit_csv(const ExperimentReport& report, const ExperimentConfig& config, std::ostream& out);
void emit_json(const ExperimentReport& report, const ExperimentConfig& config, std::ostream& out);
/// Python script plotting ratio against T from the CSV at csv_path.
void emit_plot_script(const std::string& csv_path, std::ostream& out);
/// Writes to config.out (stdout when empty); plots writes the CSV there and
/// the script next to it with a .py suffix.
void emit(const ExperimentReport& report, const ExperimentConfig& config);

/// %.12g
std::string format_number(double v);

}  // namespace diagpc
