#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nestsearch/csp.hpp"
#include "nestsearch/schedule_time.hpp"
#include "nestsearch/spectral.hpp"

namespace nestsearch {

enum class Schedule {
  /// s(t) = t / T.
  linear,
  /// ds/dt proportional to 1 / stage1_integrand(s): the schedule whose duration at
  /// accuracy epsilon is exactly stage1_time(). At T = T_I it saturates the
  /// adiabatic condition at every s.
  local_adiabatic,
};

struct EvolutionConfig {
  double total_time = 1.0;
  /// 0 selects the default (see resolved_steps()).
  long long steps = 0;
  Schedule schedule = Schedule::linear;

  /// Explicit step counts must be >= 100.
  void validate() const;
  /// max(1000, 100 T); the local schedule also integrates s(t) and takes
  /// max(1000, 400 T, 20 / min(M_i/N_i)).
  long long resolved_steps(std::span<const SubsystemShape> shapes) const;
};

struct SimulationReport {
  double final_fidelity = 0.0;
  std::vector<double> per_subsystem_fidelity;
  double norm_error = 0.0;
  double max_step_drift = 0.0;
  double success_probability = 0.0;
  long long steps = 0;
};

inline constexpr double kMaxStepNormDrift = 1e-9;
inline constexpr double kMaxNormError = 1e-8;

/// Integrates i d(psi)/dt = H_i(s(t)) psi with classical RK4 in each subsystem's
/// invariant 2-space from |Psi_0i>; fidelities are squared overlaps with |Psi_fi>.
/// Throws IntegratorStepTooCoarse when the norm drift bounds are exceeded.
SimulationReport simulate_stage1(std::span<const SubsystemShape> shapes, const EvolutionConfig& config);

struct AdiabaticBoundCheck {
  double stage1_time = 0.0;
  std::array<double, 3> times{};
  std::array<double, 3> infidelity{};
  /// Least-squares slope of -log(infidelity) against log(T).
  double decay_order = 0.0;
};

/// Local-schedule runs at T_I, 2 T_I and 4 T_I. Requires every M_i/N_i <= 1/16.
AdiabaticBoundCheck verify_adiabatic_bound(std::span<const SubsystemShape> shapes, const AccuracyTarget& target);

/// Global search in span{|Psi^S>, |Psi^NS>}: starts from the stage-I output with
/// amplitude sqrt(M_AB / (M_A M_B)) on |Psi^S> and applies exp(-i H(s_l) dt) for
/// s_l = l / steps, l = 1..steps, with H(s) = (1 - s) H_i + s H_f.
SimulationReport simulate_stage2(double m_a, double m_b, double m_ab, long long steps, double step_time);

/// Frozen stage-II calibration. The continuous-time reference run needs a total
/// time of about kappa M_A M_B / M_AB; the discrete run uses
/// multiplier * ceil(sqrt(M_A M_B / M_AB)) steps sharing that time.
/// Reproduced by calibrate_stage2().
inline constexpr double kStage2Kappa = 4.0;
inline constexpr int kStage2StepMultiplier = 2;

struct Stage2Calibration {
  /// Smallest kappa at which the dense reference reaches the success target.
  double reference_kappa_90 = 0.0;
  double reference_kappa_95 = 0.0;
  /// ceil(reference_kappa_95).
  double kappa = 0.0;
  /// Smallest c such that every c' in [c, 16] reaches 0.9 with the stepped evolution.
  int multiplier = 0;
};

inline constexpr long long kStage2ReferenceSteps = 10000;

/// Calibrates on (M_A, M_B, M_AB) = (16, 16, 1).
Stage2Calibration calibrate_stage2();

struct Stage2Plan {
  long long steps = 0;
  double step_time = 0.0;
};

/// Steps and per-step time for a global search over the given counts, using the frozen constants.
Stage2Plan stage2_plan(double m_a, double m_b, double m_ab);

struct NestedSearchReport {
  SolutionCensus census;
  bool locally_unsatisfiable = false;
  bool no_global_solution = false;
  double stage1_time = 0.0;
  std::uint64_t iterations = 0;
  double total_time = 0.0;
  double stage1_fidelity = 0.0;
  double stage2_success = 0.0;
  Stage2Plan stage2;
};

/// census -> shapes -> T_I -> stage-I dynamics at T_I (local schedule) ->
/// stage-II step count and dynamics.
NestedSearchReport run_nested_search(const CspInstance& instance, const AccuracyTarget& target);

}  // namespace nestsearch
