#pragma once

#include "bep/analysis.hpp"
#include "bep/checkpoint.hpp"
#include "bep/linear.hpp"
#include "bep/norms.hpp"
#include "bep/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bep {

enum class ExperimentMode { linear_decay, nonlinear_run, norm_suite, inequality_suite };

/// Norm column: the key in [norms] names the series column.
struct NamedNorm {
  std::string key;
  NormSpec spec;
};

struct TimeSampling {
  double t_min = 1.0;
  double t_max = 1e4;
  int samples = 81;
  bool logarithmic = true;

  std::vector<double> times() const;
};

struct AnalysisSettings {
  DataClass data_class{DataClassKind::neg_sobolev, 1.5};
  std::optional<double> t0;  ///< fit window; mode-dependent defaults
  std::optional<double> t1;
  Tolerances tolerances;
  double transient = 1.0;
  double monitor_factor = 1.1;
  std::optional<double> data_radius;  ///< nonlinear trust window
  double margin = 1.0;
  double envelope_t0 = 1.0;
  double envelope_t1 = 20.0;
  double envelope_max = -0.45;
  double compare_gap = 0.3;
  /// Norm keys per check; unset lists take mode defaults.
  std::optional<std::vector<std::string>> decay;
  std::optional<std::vector<std::string>> monitor;
  std::optional<std::vector<std::string>> envelope;
  std::vector<std::pair<std::string, std::string>> compare;  ///< (disparity key, carrier key)
  bool energy = true;
};

struct InequalitySettings {
  int fields = 1000;
  int n = 8;
  int band = 3;
  std::vector<int> l{0, 1, 2};
  std::vector<double> s{0.0, 0.5, 1.0, 1.5};
  std::vector<double> besov_s{0.5, 1.0, 1.5};
  int hls_n = 192;
  double hls_p = 1.5;
  std::vector<double> hls_widths{6.0, 12.0};
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::linear_decay;
  std::uint64_t seed = 1;
  std::string output;

  // nonlinear-run, norm-suite
  SolverConfig solver;
  InitialParams initial;
  bool write_checkpoint = true;
  std::string input_checkpoint;  ///< norm-suite: evaluate a saved field instead

  // linear-decay
  SpectralProfile profile;
  Branch branch = Branch::sum;
  TimeSampling sampling;

  std::vector<NamedNorm> norms;
  AnalysisSettings analysis;
  InequalitySettings inequality;

  /// The fully resolved INI text; parsing it gives back this config.
  std::string echo;
};

/// Parses the INI text. Unknown sections or keys, malformed values and
/// sections that do not belong to the mode throw ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string mode_name(ExperimentMode mode);

enum ExitCode : int { kExitPass = 0, kExitVerdictFailure = 1, kExitConfigError = 2, kExitRuntimeError = 3 };

struct ExperimentResult {
  int exit_code = kExitPass;
  std::string status;  ///< "completed" or the runtime failure message
  std::vector<Verdict> verdicts;
  std::vector<NormSeries> series;               ///< one per norm, same order as the config
  std::vector<EnergyDiagnostics> diagnostics;   ///< nonlinear-run only
  std::vector<std::pair<NamedNorm, double>> table;  ///< norm-suite only
};

/// Runs the experiment and, when config.output is non-empty, writes
/// config.ini, report.tsv, status.txt and the mode's data files there.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Interpolation, partition and dilation checks on seeded random fields.
std::vector<Verdict> inequality_suite(const InequalitySettings& settings, std::uint64_t seed);

/// Norms of a checkpoint. Solver-state checkpoints accept every quantity
/// name; other checkpoints accept "total" or one of their labels.
std::vector<double> norm_table(const Checkpoint& checkpoint, const std::vector<NormSpec>& specs);

/// Tab-separated columns t, key... with %.17g numbers.
std::string format_series(const std::vector<std::string>& keys, const std::vector<NormSeries>& series);
std::string format_diagnostics(const std::vector<EnergyDiagnostics>& diagnostics);

struct ReportSummary {
  std::vector<std::string> lines;  ///< one per verdict row, prefixed with its directory
  int passed = 0;
  int failed = 0;
  int runtime_failures = 0;
  int exit_code() const;
};

/// Collects every report.tsv and status.txt below dir.
ReportSummary summarize_reports(const std::string& dir);

}  // namespace bep
