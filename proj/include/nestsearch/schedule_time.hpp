#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nestsearch/spectral.hpp"

namespace nestsearch {

/// Adiabatic accuracy epsilon in (0, 1]. Reported times scale as 1/epsilon.
class AccuracyTarget {
public:
  explicit AccuracyTarget(double epsilon = 1.0);
  double epsilon() const { return epsilon_; }

private:
  double epsilon_;
};

/// Multiplier on sqrt(prod M_i / M_AB) for the global-search step count.
struct Stage2Policy {
  double constant = 1.0;
};

struct QuadratureOptions {
  double relative_tolerance = 1e-8;
  int max_panels = 4000;
};

struct TimeBudget {
  double stage1_time = 0.0;
  std::uint64_t iterations = 1;
  double total_time = 0.0;
  double log2_stage1_time = 0.0;
  double log2_total_time = 0.0;
  double integrand_peak_s = 0.5;
  double quadrature_error_estimate = 0.0;
  int quadrature_panels = 0;
  /// Every subsystem has M = N; no search is needed and stage1_time is 0.
  bool degenerate = false;
  /// A model estimate was below one solution (see complexity.hpp).
  bool clamped_estimate = false;
};

/// sqrt(sum_i xi_i^2 / omega_i(s)^6), the stage-I time density at epsilon = 1.
double stage1_integrand(std::span<const SubsystemShape> shapes, double s);

/// Fills stage1_time, log2_stage1_time, peak, error and degenerate fields.
/// Adaptive Gauss-Kronrod with a forced split at s = 1/2.
TimeBudget stage1_time(std::span<const SubsystemShape> shapes, const AccuracyTarget& target,
                       const QuadratureOptions& options = {});

/// ceil(sqrt(M_A M_B / M_AB)); exact in integer arithmetic when the policy constant is 1.
/// Throws NoGlobalSolution for M_AB = 0 and std::invalid_argument for M_AB > M_A M_B.
std::uint64_t stage2_iterations(std::uint64_t m_a, std::uint64_t m_b, std::uint64_t m_ab,
                                const Stage2Policy& policy = {});

/// Same count from log2(prod M_i / M_AB) >= 0, for fractional model quantities.
std::uint64_t stage2_iterations_log2(double log2_ratio, const Stage2Policy& policy = {});

/// T = T_I * iterations for any number of subsets (two for the main algorithm).
/// m_ab may be fractional; it must be positive and at most prod M_i.
TimeBudget total_time(std::span<const SubsystemShape> shapes, double m_ab, const AccuracyTarget& target,
                      const Stage2Policy& policy = {}, const QuadratureOptions& options = {});
TimeBudget total_time_log2(std::span<const SubsystemShape> shapes, double log2_m_ab, const AccuracyTarget& target,
                           const Stage2Policy& policy = {}, const QuadratureOptions& options = {});

/// sqrt(max_i N_i / M_i), and its base-2 log.
double approx_stage1_time(std::span<const SubsystemShape> shapes);
double log2_approx_stage1_time(std::span<const SubsystemShape> shapes);

/// sqrt(max_i N_i prod_{j != i} M_j / M_AB), and its base-2 log.
double approx_total_time(std::span<const SubsystemShape> shapes, double m_ab);
double log2_approx_total_time(std::span<const SubsystemShape> shapes, double log2_m_ab);

/// Integrand sampled on a uniform grid of `points` nodes over [0, 1].
std::vector<double> integrand_profile(std::span<const SubsystemShape> shapes, int points);

}  // namespace nestsearch
