#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "kdvlab/fit.hpp"
#include "kdvlab/kernels.hpp"
#include "kdvlab/picard.hpp"
#include "kdvlab/solver.hpp"

namespace kdvlab {

// Rejected configuration or malformed input. Maps to process exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial data menu for experiment runs. Width is the Gaussian sigma; mass,
// when finite, overrides amplitude so runs can pin the integral directly.
struct InitialDataSpec {
  std::string shape = "gaussian";  // gaussian | dgaussian | double-bump
  double amplitude = 1.0;
  double center = 0.0;
  double width = 1.0;
  double mass = std::numeric_limits<double>::quiet_NaN();
};
RealField make_initial_data(const Grid& g, const InitialDataSpec& spec);

struct SeriesSpec {
  Lp p = Lp::L2;
  int j = 0;
};

// Per-kind pass thresholds. Only the fields a kind consumes are required in
// its config; the rest stay at their defaults.
struct CheckSpec {
  double slope_tolerance = std::numeric_limits<double>::quiet_NaN();
  double max_abs_error = std::numeric_limits<double>::quiet_NaN();
  double rho_max = -0.5;
  double ratio_t = std::numeric_limits<double>::quiet_NaN();
  double ratio_rel_tolerance = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string kind;  // kernel-check | linear-expansion | decay | first-order
                     // | profile-sub1 | profile-log | picard | invariants
  double alpha = 1.5;
  int n = 0;
  double L = 0.0;
  InitialDataSpec initial;
  SolverConfig solver;
  std::vector<double> times;  // sample times for solver-free kinds
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::vector<SeriesSpec> series;
  int order = -1;  // expansion order N, or picard level override (-1 = auto)
  CheckSpec checks;
  unsigned long long seed = 0;
  std::string output_dir = "out";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct SeriesOutcome {
  std::string label;
  Lp p = Lp::L2;
  int j = 0;
  bool has_fit = false;
  DecayFit fit{};
  double predicted_exponent = std::numeric_limits<double>::quiet_NaN();
  double spearman_rho = std::numeric_limits<double>::quiet_NaN();
  std::string trend;
  std::vector<double> ts;
  std::vector<double> values;
  std::vector<double> predicted;  // reference curve for plots; may be empty
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string kind;
  nlohmann::json config_echo;
  unsigned long long seed = 0;
  bool passed = false;
  bool with_warnings = false;
  double wall_seconds = 0.0;
  std::vector<SeriesOutcome> series;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> artifacts;  // name -> relative path
};

// Runs the experiment described by the config. Throws ConfigError before any
// compute when the description is invalid, NumericalError when the run
// itself breaks down.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes series CSVs, report.json, and plot.gp under the config's output
// directory (rooted at $KDVLAB_OUTPUT_ROOT when that is set and the path is
// relative). Records the paths in report.artifacts.
void write_artifacts(const ExperimentConfig& cfg, ExperimentReport& report);

// 0 when every series passed, 1 otherwise.
int exit_code(const ExperimentReport& report);

}  // namespace kdvlab
