#pragma once

#include <array>
#include <functional>

#include "nestsearch/schedule_time.hpp"
#include "nestsearch/spectral.hpp"

namespace nestsearch {

/// Inputs of the average-case model. n_A = x n is continuous here; integer
/// partitions only exist for explicit instances (csp.hpp).
struct PartitionModel {
  int n = 32;
  int k = 2;
  double alpha = 1.0;
  double x = 0.5;

  /// Throws std::invalid_argument naming the violated bound.
  void validate() const;
};

/// Base-2 logs of M_j ~ 2^(n_j - n alpha (n_j / n)^k), j = A, B, AB.
struct ModelEstimates {
  double log2_N_A = 0.0;
  double log2_N_B = 0.0;
  /// Clamped below at 0 (M >= 1).
  double log2_M_A = 0.0;
  double log2_M_B = 0.0;
  double log2_M_AB = 0.0;
  /// Values before clamping.
  double raw_log2_M_A = 0.0;
  double raw_log2_M_B = 0.0;
  double raw_log2_M_AB = 0.0;
  bool clamped = false;
};

ModelEstimates estimate(const PartitionModel& model);

/// Subsystem shapes built from the clamped A and B estimates.
std::array<SubsystemShape, 2> model_shapes(const ModelEstimates& estimates);

/// Numeric T_I and total time for the model. The stage-II factor uses the
/// unclamped M_AB so that log2 T stays a function of n alpha (and is monotone
/// in alpha) above the critical density; `clamped_estimate` records when any
/// estimate fell below one solution.
TimeBudget model_time(const PartitionModel& model, const AccuracyTarget& target = AccuracyTarget{},
                      const Stage2Policy& policy = {}, const QuadratureOptions& options = {});

/// (n/2) max(alpha - alpha (1-x)^k, alpha - alpha x^k): the approximate log2 T.
double approx_model_time_log2(const PartitionModel& model);

/// alpha/2 - alpha/2^(k+1): exponent of N in the optimal-partition running time.
double scaling_exponent(int k, double alpha);

struct OptimizeConfig {
  double x_lo = 0.02;
  double x_hi = 0.98;
  int grid_points = 101;
  double x_tolerance = 1e-4;
};

struct OptimizeResult {
  double x_opt = 0.5;
  double log2_time = 0.0;
  int evaluations = 0;
};

/// Minimum of f on [a, b] by golden-section search down to a bracket of width `tolerance`.
double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tolerance);

/// argmin over x of log2 model_time: coarse grid, then golden-section refinement
/// around the best grid point. Ties (and a flat objective) resolve towards x = 1/2.
OptimizeResult optimize_x(int n, int k, double alpha, const AccuracyTarget& target = AccuracyTarget{},
                          const OptimizeConfig& config = {});

}  // namespace nestsearch
