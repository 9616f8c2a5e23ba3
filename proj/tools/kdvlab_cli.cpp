#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kdvlab/experiment.hpp"
#include "kdvlab/fit.hpp"
#include "kdvlab/kernels.hpp"
#include "kdvlab/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string d17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_run(const std::string& path) {
  kdvlab::ExperimentConfig cfg = kdvlab::load_config(path);
  kdvlab::ExperimentReport rep = kdvlab::run_experiment(cfg);
  kdvlab::write_artifacts(cfg, rep);
  std::cout << "kind: " << rep.kind << "\n";
  std::cout << "seed: " << rep.seed << "\n";
  for (const kdvlab::SeriesOutcome& out : rep.series) {
    std::cout << (out.passed ? "[pass] " : "[FAIL] ") << out.label << ": "
              << out.detail << "\n";
  }
  for (const std::string& w : rep.warnings) {
    std::cout << "warning: " << w << "\n";
  }
  for (const auto& [name, rel] : rep.artifacts) {
    std::cout << "artifact " << name << ": " << rel << "\n";
  }
  std::cout << (rep.passed ? "PASSED" : "FAILED")
            << (rep.with_warnings ? " (with warnings)" : "") << " in "
            << d17(rep.wall_seconds) << " s\n";
  return kdvlab::exit_code(rep);
}

int cmd_verify(const std::vector<std::string>& filters) {
  kdvlab::VerifySummary summary =
      kdvlab::run_verification(filters, &std::cout);
  kdvlab::print_table(summary, std::cout);
  return summary.all_passed ? kExitPass : kExitAssertion;
}

int cmd_kernel(double alpha, double t, double x, const std::string& kind_name,
               double tol) {
  const kdvlab::KernelKind kind = kind_name == "full"
                                      ? kdvlab::KernelKind::Full
                                      : kdvlab::KernelKind::Heat;
  kdvlab::QuadratureResult q = kdvlab::kernel_quadrature(kind, alpha, t, x, tol);
  if (!q.converged) {
    throw kdvlab::NumericalError("kernel quadrature did not converge");
  }
  std::cout << d17(q.value) << "\n";
  std::cout << "error_estimate: " << d17(q.error_estimate)
            << ", evaluations: " << q.evaluations << "\n";
  return kExitPass;
}

int cmd_fit(const std::string& csv_path, const std::string& window,
            bool log_correction) {
  const auto colon = window.find(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 == window.size()) {
    throw kdvlab::ConfigError("--window expects the form a:b");
  }
  double lo = 0.0, hi = 0.0;
  try {
    lo = std::stod(window.substr(0, colon));
    hi = std::stod(window.substr(colon + 1));
  } catch (const std::exception&) {
    throw kdvlab::ConfigError("--window expects numeric bounds a:b");
  }

  std::ifstream in(csv_path);
  if (!in.good()) {
    throw kdvlab::ConfigError("cannot open " + csv_path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw kdvlab::ConfigError(csv_path + ": empty file");
  }
  if (line.rfind("t,p,j,value", 0) != 0) {
    throw kdvlab::ConfigError(csv_path +
                              ": expected header t,p,j,value[,predicted]");
  }
  std::vector<double> ts, vs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) {
      throw kdvlab::ConfigError(csv_path + ":" + std::to_string(lineno) +
                                ": expected at least 4 columns");
    }
    try {
      ts.push_back(std::stod(cells[0]));
      vs.push_back(std::stod(cells[3]));
    } catch (const std::exception&) {
      throw kdvlab::ConfigError(csv_path + ":" + std::to_string(lineno) +
                                ": non-numeric t or value");
    }
  }
  kdvlab::DecayFit fit = kdvlab::fit_power_law(ts, vs, lo, hi, log_correction);
  std::cout << "slope: " << d17(fit.slope) << "\n";
  std::cout << "intercept: " << d17(fit.intercept) << "\n";
  std::cout << "r_squared: " << d17(fit.r_squared) << "\n";
  std::cout << "points_used: " << fit.points_used << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pseudo-spectral laboratory for the dissipative KdV equation "
      "u_t + u_xxx + |D|^a u + u u_x = 0"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand(
      "run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Path to the config file")
      ->required();

  std::vector<std::string> filters;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the acceptance criteria and print a pass/fail table");
  verify->add_option("--filter", filters,
                     "Only run criteria whose name contains this substring "
                     "(repeatable)");

  double alpha = 1.5, t = 1.0, x = 0.0, tol = 1e-10;
  std::string kind_name = "heat";
  CLI::App* kernel = app.add_subcommand(
      "kernel", "Evaluate a kernel at one point by adaptive quadrature");
  kernel->add_option("--alpha", alpha, "Dissipation exponent in (0, 2]")
      ->required();
  kernel->add_option("--t", t, "Time > 0")->required();
  kernel->add_option("--x", x, "Position")->required();
  kernel->add_option("--kind", kind_name, "heat (default) or full")
      ->check(CLI::IsMember({"heat", "full"}));
  kernel->add_option("--tol", tol, "Absolute tolerance (default 1e-10)");

  std::string csv_path, window;
  bool log_correction = false;
  CLI::App* fit = app.add_subcommand(
      "fit", "Fit a power law to a series CSV written by `run`");
  fit->add_option("csv", csv_path, "Path to a series_*.csv artifact")
      ->required();
  fit->add_option("--window", window, "Fit window as a:b in time")
      ->required();
  fit->add_flag("--log", log_correction,
                "Fit value * log t / t^s instead of a plain power law");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(filters);
    if (kernel->parsed()) return cmd_kernel(alpha, t, x, kind_name, tol);
    return cmd_fit(csv_path, window, log_correction);
  } catch (const kdvlab::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const kdvlab::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
