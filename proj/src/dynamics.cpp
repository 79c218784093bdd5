#include "nestsearch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "nestsearch/errors.hpp"

namespace nestsearch {
namespace {

using cplx = std::complex<double>;
using Spinor = std::array<cplx, 2>;

constexpr cplx kMinusI{0.0, -1.0};
constexpr long long kMaxSteps = 2'000'000'000LL;
constexpr double kScheduleEndTolerance = 1e-6;

Spinor schrodinger_rhs(const Symmetric2x2& h, const Spinor& v) {
  return {kMinusI * (h.a * v[0] + h.b * v[1]), kMinusI * (h.b * v[0] + h.c * v[1])};
}

double norm2(const Spinor& v) { return std::norm(v[0]) + std::norm(v[1]); }

// State of the joint stage-I integration: one spinor per subsystem plus the
// schedule position, which the local schedule advances as an ODE of its own.
struct Stage1State {
  std::vector<Spinor> psi;
  double s = 0.0;
};

class Stage1System {
public:
  Stage1System(std::span<const SubsystemShape> shapes, const EvolutionConfig& config)
      : shapes_(shapes), config_(config) {
    if (config.schedule == Schedule::local_adiabatic) {
      velocity_scale_ = stage1_time(shapes, AccuracyTarget{1.0}).stage1_time / config.total_time;
    }
  }

  bool local() const { return velocity_scale_ > 0.0; }

  double schedule_at(double t, double s_state) const { return local() ? s_state : t / config_.total_time; }

  Stage1State derivative(double t, const Stage1State& y) const {
    const double s = std::clamp(schedule_at(t, y.s), 0.0, 1.0);
    const SchedulePoint point(s);
    Stage1State dy;
    dy.psi.resize(y.psi.size());
    for (std::size_t i = 0; i < shapes_.size(); ++i) {
      dy.psi[i] = schrodinger_rhs(subspace_hamiltonian(point, shapes_[i]), y.psi[i]);
    }
    dy.s = local() ? velocity_scale_ / stage1_integrand(shapes_, s) : 0.0;
    return dy;
  }

private:
  std::span<const SubsystemShape> shapes_;
  EvolutionConfig config_;
  double velocity_scale_ = 0.0;
};

Stage1State axpy(const Stage1State& y, double h, const Stage1State& k) {
  Stage1State out;
  out.psi.resize(y.psi.size());
  for (std::size_t i = 0; i < y.psi.size(); ++i) {
    out.psi[i] = {y.psi[i][0] + h * k.psi[i][0], y.psi[i][1] + h * k.psi[i][1]};
  }
  out.s = y.s + h * k.s;
  return out;
}

// exp(-i H dt) for real symmetric H = m I + (p sigma_z + b sigma_x).
std::array<cplx, 4> propagator(const Symmetric2x2& h, double dt) {
  const double mean = 0.5 * (h.a + h.c);
  const double p = 0.5 * (h.a - h.c);
  const double r = std::hypot(p, h.b);
  const cplx phase = std::exp(cplx{0.0, -mean * dt});
  const double cs = std::cos(r * dt);
  const double sn = r > 0.0 ? std::sin(r * dt) / r : dt;
  return {phase * cplx{cs, -sn * p}, phase * cplx{0.0, -sn * h.b}, phase * cplx{0.0, -sn * h.b},
          phase * cplx{cs, sn * p}};
}

}  // namespace

void EvolutionConfig::validate() const {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw std::invalid_argument("evolution total_time must be positive and finite");
  }
  if (steps != 0 && steps < 100) {
    throw std::invalid_argument("evolution needs at least 100 steps, got " + std::to_string(steps));
  }
}

long long EvolutionConfig::resolved_steps(std::span<const SubsystemShape> shapes) const {
  if (steps != 0) return steps;
  double wanted = std::max(1000.0, std::ceil(100.0 * total_time));
  if (schedule == Schedule::local_adiabatic) {
    double min_ratio = 1.0;
    for (const auto& s : shapes) min_ratio = std::min(min_ratio, s.ratio());
    wanted = std::max({wanted, std::ceil(400.0 * total_time), std::ceil(20.0 / min_ratio)});
  }
  if (wanted > static_cast<double>(kMaxSteps)) {
    throw ScaleRefused("stage-I simulation would need more than " + std::to_string(kMaxSteps) + " steps");
  }
  return static_cast<long long>(wanted);
}

SimulationReport simulate_stage1(std::span<const SubsystemShape> shapes, const EvolutionConfig& config_in) {
  if (shapes.empty()) throw std::invalid_argument("simulate_stage1 needs at least one subsystem");
  config_in.validate();
  EvolutionConfig config = config_in;
  const bool all_degenerate =
      std::all_of(shapes.begin(), shapes.end(), [](const auto& s) { return s.degenerate(); });
  if (all_degenerate) config.schedule = Schedule::linear;

  const long long steps = config.resolved_steps(shapes);
  const Stage1System system(shapes, config);
  const double h = config.total_time / static_cast<double>(steps);

  Stage1State y;
  y.psi.assign(shapes.size(), Spinor{cplx{1.0, 0.0}, cplx{0.0, 0.0}});

  SimulationReport report;
  report.steps = steps;
  for (long long step = 0; step < steps; ++step) {
    const double t = h * static_cast<double>(step);
    const Stage1State k1 = system.derivative(t, y);
    const Stage1State k2 = system.derivative(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const Stage1State k3 = system.derivative(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const Stage1State k4 = system.derivative(t + h, axpy(y, h, k3));
    Stage1State next = y;
    for (std::size_t i = 0; i < y.psi.size(); ++i) {
      for (int c = 0; c < 2; ++c) {
        next.psi[i][c] += (h / 6.0) * (k1.psi[i][c] + 2.0 * k2.psi[i][c] + 2.0 * k3.psi[i][c] + k4.psi[i][c]);
      }
      report.max_step_drift = std::max(report.max_step_drift, std::abs(norm2(next.psi[i]) - norm2(y.psi[i])));
    }
    next.s += (h / 6.0) * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    y = std::move(next);
  }

  for (const auto& psi : y.psi) report.norm_error = std::max(report.norm_error, std::abs(std::sqrt(norm2(psi)) - 1.0));
  const double final_s = system.schedule_at(config.total_time, y.s);
  if (report.max_step_drift > kMaxStepNormDrift || report.norm_error > kMaxNormError ||
      std::abs(final_s - 1.0) > kScheduleEndTolerance) {
    double excess = std::max({report.max_step_drift / kMaxStepNormDrift, report.norm_error / kMaxNormError,
                              std::abs(final_s - 1.0) / kScheduleEndTolerance, 1.0});
    // A blown-up state gives inf or NaN; the suggestion is then only a lower bound.
    if (!(excess < 1e16)) excess = 1e16;
    const auto suggested = static_cast<long long>(
        std::min(static_cast<double>(kMaxSteps), std::ceil(2.0 * steps * std::pow(excess, 0.25))));
    throw IntegratorStepTooCoarse("integrator step too coarse (" + std::to_string(steps) +
                                      " steps); try at least " + std::to_string(suggested),
                                  suggested);
  }

  report.final_fidelity = 1.0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto target = final_state(shapes[i]);
    const cplx overlap = target[0] * y.psi[i][0] + target[1] * y.psi[i][1];
    const double fidelity = std::norm(overlap);
    report.per_subsystem_fidelity.push_back(fidelity);
    report.final_fidelity *= fidelity;
  }
  report.success_probability = report.final_fidelity;
  return report;
}

AdiabaticBoundCheck verify_adiabatic_bound(std::span<const SubsystemShape> shapes, const AccuracyTarget& target) {
  for (const auto& s : shapes) {
    if (s.ratio() > 1.0 / 16.0) {
      throw std::invalid_argument("verify_adiabatic_bound needs M/N <= 1/16 for every subsystem");
    }
  }
  AdiabaticBoundCheck out;
  out.stage1_time = stage1_time(shapes, target).stage1_time;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    out.times[i] = out.stage1_time * static_cast<double>(1 << i);
    EvolutionConfig config;
    config.total_time = out.times[i];
    config.schedule = Schedule::local_adiabatic;
    out.infidelity[i] = std::max(0.0, 1.0 - simulate_stage1(shapes, config).final_fidelity);
    const double lx = std::log(out.times[i]);
    const double ly = std::log(std::max(out.infidelity[i], std::numeric_limits<double>::min()));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.decay_order = -(3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  return out;
}

SimulationReport simulate_stage2(double m_a, double m_b, double m_ab, long long steps, double step_time) {
  if (m_ab == 0.0) throw NoGlobalSolution();
  if (!(m_a >= 1.0 && m_b >= 1.0 && m_ab >= 1.0) || m_ab > m_a * m_b) {
    throw std::invalid_argument("simulate_stage2 needs M_A, M_B >= 1 and 1 <= M_AB <= M_A M_B");
  }
  if (steps < 0 || !(step_time >= 0.0)) {
    throw std::invalid_argument("simulate_stage2 needs steps >= 0 and step_time >= 0");
  }

  // Basis {|Psi^S>, |Psi^NS>}; the stage-I output is (a, b).
  const double a = std::sqrt(m_ab / (m_a * m_b));
  const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
  Spinor psi{cplx{a, 0.0}, cplx{b, 0.0}};

  for (long long l = 1; l <= steps; ++l) {
    const double s = static_cast<double>(l) / static_cast<double>(steps);
    // (1 - s)(1 - |phi><phi|) + s (1 - |S><S|)
    const Symmetric2x2 h{(1.0 - s) * (1.0 - a * a), -(1.0 - s) * a * b, (1.0 - s) * (1.0 - b * b) + s};
    const auto u = propagator(h, step_time);
    psi = {u[0] * psi[0] + u[1] * psi[1], u[2] * psi[0] + u[3] * psi[1]};
  }

  SimulationReport report;
  report.steps = steps;
  report.norm_error = std::abs(std::sqrt(norm2(psi)) - 1.0);
  report.success_probability = std::norm(psi[0]);
  report.final_fidelity = report.success_probability;
  return report;
}

namespace {

constexpr double kCalibrationCount = 16.0;
constexpr int kCalibrationMaxMultiplier = 16;

double reference_success(double kappa) {
  const double ratio = kCalibrationCount * kCalibrationCount;
  return simulate_stage2(kCalibrationCount, kCalibrationCount, 1.0, kStage2ReferenceSteps,
                         kappa * ratio / static_cast<double>(kStage2ReferenceSteps))
      .success_probability;
}

double smallest_kappa(double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (reference_success(hi) < target) hi *= 2.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    (reference_success(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

Stage2Calibration calibrate_stage2() {
  Stage2Calibration out;
  out.reference_kappa_90 = smallest_kappa(0.9);
  out.reference_kappa_95 = smallest_kappa(0.95);
  out.kappa = std::ceil(out.reference_kappa_95);

  const double ratio = kCalibrationCount * kCalibrationCount;
  const auto iterations = static_cast<long long>(std::ceil(std::sqrt(ratio)));
  out.multiplier = kCalibrationMaxMultiplier + 1;
  for (int c = kCalibrationMaxMultiplier; c >= 1; --c) {
    const long long steps = c * iterations;
    const double success =
        simulate_stage2(kCalibrationCount, kCalibrationCount, 1.0, steps, out.kappa * ratio / steps)
            .success_probability;
    if (success < 0.9) break;
    out.multiplier = c;
  }
  return out;
}

Stage2Plan stage2_plan(double m_a, double m_b, double m_ab) {
  if (m_ab == 0.0) throw NoGlobalSolution();
  const double ratio = m_a * m_b / m_ab;
  const std::uint64_t iterations = stage2_iterations_log2(std::log2(ratio));
  Stage2Plan plan;
  plan.steps = kStage2StepMultiplier * static_cast<long long>(iterations);
  plan.step_time = kStage2Kappa * ratio / static_cast<double>(plan.steps);
  return plan;
}

NestedSearchReport run_nested_search(const CspInstance& instance, const AccuracyTarget& target) {
  NestedSearchReport report;
  report.census = census(instance);
  const SolutionCensus& c = report.census;
  if (c.M_A == 0 || c.M_B == 0) {
    report.locally_unsatisfiable = true;
    return report;
  }
  const CensusShapes shapes = shapes_from_census(instance, c);
  const std::array<SubsystemShape, 2> pair{shapes.A, shapes.B};

  const TimeBudget stage1 = stage1_time(pair, target);
  report.stage1_time = stage1.stage1_time;
  if (stage1.degenerate) {
    report.stage1_fidelity = 1.0;
  } else {
    EvolutionConfig config;
    config.total_time = stage1.stage1_time;
    config.schedule = Schedule::local_adiabatic;
    report.stage1_fidelity = simulate_stage1(pair, config).final_fidelity;
  }

  if (c.M_AB == 0) {
    report.no_global_solution = true;
    return report;
  }
  report.iterations = stage2_iterations(c.M_A, c.M_B, c.M_AB);
  report.total_time = report.stage1_time * static_cast<double>(report.iterations);
  const auto m_a = static_cast<double>(c.M_A);
  const auto m_b = static_cast<double>(c.M_B);
  const auto m_ab = static_cast<double>(c.M_AB);
  report.stage2 = stage2_plan(m_a, m_b, m_ab);
  report.stage2_success = simulate_stage2(m_a, m_b, m_ab, report.stage2.steps, report.stage2.step_time).success_probability;
  return report;
}

}  // namespace nestsearch
