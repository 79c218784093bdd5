#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nestsearch/complexity.hpp"

namespace nestsearch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitValidation = 2,
  kExitRefused = 3,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "a,b,c" or "lo:hi:count" (count evenly spaced points, endpoints included).
/// Throws std::invalid_argument unless the result is non-empty and strictly increasing.
std::vector<double> parse_grid(const std::string& text);

enum class Varying { x, alpha, n, N, k };

Varying parse_varying(const std::string& name);
std::string to_string(Varying v);

struct SweepSpec {
  Varying varying = Varying::x;
  std::vector<double> grid;
  /// Non-varying fields; the varying one is overwritten per row.
  PartitionModel fixed;
  double epsilon = 1.0;
  double quadrature_tolerance = 1e-8;
};

struct SweepRow {
  PartitionModel model;
  double epsilon = 1.0;
  ModelEstimates estimates;
  TimeBudget budget;
  double log2_time_approx = 0.0;
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Column order of every sweep CSV; stable across releases.
const std::vector<std::string>& sweep_columns();
void write_sweep_csv(const std::vector<SweepRow>& rows, Varying varying, std::ostream& out);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual.
  double residual = 0.0;
};

/// Ordinary least squares; needs at least two distinct abscissae.
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

struct ScalingResult {
  LinearFit numeric;
  LinearFit approx;
  std::vector<SweepRow> rows;
};

/// log2 T against n at fixed (k, alpha, x); needs at least five grid points.
ScalingResult run_scaling(int k, double alpha, double x, const std::vector<double>& n_grid, double epsilon,
                          double quadrature_tolerance = 1e-8);

/// Short matplotlib script that plots a sweep CSV.
std::string plot_script(const std::string& csv_path, Varying varying);

std::string tool_version();

}  // namespace nestsearch::cli
