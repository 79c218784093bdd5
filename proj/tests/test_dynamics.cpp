#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "nestsearch/dynamics.hpp"
#include "nestsearch/errors.hpp"

using namespace nestsearch;

namespace {

using cplx = std::complex<double>;
using Vec4 = std::array<cplx, 4>;

SubsystemShape shape(std::uint64_t n, std::uint64_t m) { return SubsystemShape::from_counts(n, m); }

// Per-subsystem 2x2 built from the two projectors: f (1 - |e0><e0|) + g (1 - |phi><phi|).
std::array<double, 4> projector_hamiltonian(double s, double ratio) {
  const double c = std::sqrt(ratio), d = std::sqrt(1.0 - ratio);
  const double f = 1.0 - s, g = s;
  return {f * 0.0 + g * (1.0 - c * c), -g * c * d, f * 1.0 + g * (1.0 - d * d), 0.0};
}

// Joint evolution of two subsystems in the 4-dimensional tensor-product space,
// H = H_A (x) 1 + 1 (x) H_B, linear schedule, classical RK4.
double joint_fidelity(double ra, double rb, double total, long steps) {
  const auto rhs = [&](double t, const Vec4& v) {
    const auto a = projector_hamiltonian(t / total, ra);
    const auto b = projector_hamiltonian(t / total, rb);
    const double ha[2][2] = {{a[0], a[1]}, {a[1], a[2]}};
    const double hb[2][2] = {{b[0], b[1]}, {b[1], b[2]}};
    Vec4 out{};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        cplx acc = 0.0;
        for (int k = 0; k < 2; ++k) acc += ha[i][k] * v[2 * k + j] + hb[j][k] * v[2 * i + k];
        out[2 * i + j] = cplx{0.0, -1.0} * acc;
      }
    }
    return out;
  };
  const auto axpy = [](const Vec4& y, double h, const Vec4& k) {
    Vec4 out;
    for (int i = 0; i < 4; ++i) out[i] = y[i] + h * k[i];
    return out;
  };
  Vec4 y{1.0, 0.0, 0.0, 0.0};
  const double h = total / static_cast<double>(steps);
  for (long i = 0; i < steps; ++i) {
    const double t = h * i;
    const auto k1 = rhs(t, y);
    const auto k2 = rhs(t + h / 2, axpy(y, h / 2, k1));
    const auto k3 = rhs(t + h / 2, axpy(y, h / 2, k2));
    const auto k4 = rhs(t + h, axpy(y, h, k3));
    for (int j = 0; j < 4; ++j) y[j] += h / 6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  const std::array<double, 2> fa{std::sqrt(ra), std::sqrt(1 - ra)};
  const std::array<double, 2> fb{std::sqrt(rb), std::sqrt(1 - rb)};
  cplx overlap = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) overlap += fa[i] * fb[j] * y[2 * i + j];
  }
  return std::norm(overlap);
}

}  // namespace

TEST_CASE("evolution config validation") {
  EvolutionConfig config;
  config.steps = 50;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.steps = 0;
  config.total_time = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.total_time = 3.0;
  const std::array<SubsystemShape, 1> one{shape(64, 1)};
  CHECK(config.resolved_steps(one) == 1000);
  config.total_time = 50.0;
  CHECK(config.resolved_steps(one) == 5000);
}

TEST_CASE("degenerate subsystems keep fidelity 1") {
  const std::array<SubsystemShape, 2> full{shape(8, 8), shape(4, 4)};
  for (double t : {1e-3, 1.0, 37.0}) {
    EvolutionConfig config;
    config.total_time = t;
    CHECK(simulate_stage1(full, config).final_fidelity == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sudden limit leaves the initial state unchanged") {
  const std::array<SubsystemShape, 1> one{shape(1024, 1)};
  EvolutionConfig config;
  config.total_time = 1e-4;
  const auto report = simulate_stage1(one, config);
  CHECK(std::abs(report.final_fidelity - 1.0 / 1024.0) < 1e-3);

  const std::array<SubsystemShape, 2> pair{shape(16, 1), shape(64, 4)};
  const auto both = simulate_stage1(pair, config);
  CHECK(std::abs(both.per_subsystem_fidelity[0] - 1.0 / 16.0) < 1e-3);
  CHECK(std::abs(both.per_subsystem_fidelity[1] - 1.0 / 16.0) < 1e-3);
}

TEST_CASE("deep adiabatic run reaches the final ground state") {
  const std::array<SubsystemShape, 2> pair{shape(16, 1), shape(16, 1)};
  const double t_i = stage1_time(pair, AccuracyTarget(1.0)).stage1_time;
  EvolutionConfig config;
  config.total_time = 100.0 * t_i;
  const auto report = simulate_stage1(pair, config);
  CHECK(report.final_fidelity >= 0.999);
  CHECK(report.norm_error < kMaxNormError);

  EvolutionConfig fine = config;
  fine.steps = 10 * report.steps;
  CHECK(std::abs(simulate_stage1(pair, fine).final_fidelity - report.final_fidelity) < 1e-9);
}

TEST_CASE("joint fidelity is the product of subsystem fidelities") {
  for (auto [ra, rb, t] : std::vector<std::tuple<double, double, double>>{
           {1.0 / 16, 1.0 / 16, 8.0}, {1.0 / 16, 1.0 / 64, 20.0}, {0.25, 1.0 / 32, 3.0}}) {
    const std::array<SubsystemShape, 2> pair{SubsystemShape::from_log2(10, 10 + std::log2(ra)),
                                             SubsystemShape::from_log2(10, 10 + std::log2(rb))};
    EvolutionConfig config;
    config.total_time = t;
    config.steps = 20000;
    const auto report = simulate_stage1(pair, config);
    CHECK(std::abs(report.final_fidelity -
                   report.per_subsystem_fidelity[0] * report.per_subsystem_fidelity[1]) < 1e-10);
    CHECK(std::abs(report.final_fidelity - joint_fidelity(ra, rb, t, 20000)) < 1e-9);
  }
}

TEST_CASE("coarse steps are reported with a suggestion") {
  const std::array<SubsystemShape, 1> one{shape(64, 1)};
  EvolutionConfig config;
  config.total_time = 2000.0;
  config.steps = 100;
  try {
    simulate_stage1(one, config);
    FAIL("expected IntegratorStepTooCoarse");
  } catch (const IntegratorStepTooCoarse& e) {
    CHECK(e.suggested_steps() > 100);
  }
}

TEST_CASE("local schedule ends at s = 1 and follows the adiabatic bound") {
  const std::array<SubsystemShape, 2> pair{shape(64, 1), shape(64, 1)};
  const auto check = verify_adiabatic_bound(pair, AccuracyTarget(0.1));
  CHECK(check.times[0] == doctest::Approx(check.stage1_time));
  CHECK(check.infidelity[0] <= 0.1);
  CHECK(check.infidelity[2] <= check.infidelity[0] / 8.0);
  CHECK(check.decay_order > 1.0);

  const auto half = verify_adiabatic_bound(pair, AccuracyTarget(0.05));
  CHECK(half.stage1_time == doctest::Approx(2.0 * check.stage1_time).epsilon(1e-12));

  const std::array<SubsystemShape, 2> dense{shape(8, 1), shape(64, 1)};
  CHECK_THROWS_AS(verify_adiabatic_bound(dense, AccuracyTarget(0.1)), std::invalid_argument);
}

TEST_CASE("stage-I infidelity falls as the time grows") {
  for (auto [a, b] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{
           {16, 16}, {32, 32}, {64, 64}, {64, 256}, {1024, 16}, {128, 16}, {256, 256}}) {
    const std::array<SubsystemShape, 2> pair{shape(a, 1), shape(b, 1)};
    for (double eps : {0.3, 0.1, 0.05}) {
      const double t_i = stage1_time(pair, AccuracyTarget(eps)).stage1_time;
      std::array<double, 3> infidelity{};
      for (int i = 0; i < 3; ++i) {
        EvolutionConfig config;
        config.total_time = t_i * (1 << i);
        infidelity[i] = 1.0 - simulate_stage1(pair, config).final_fidelity;
      }
      CHECK(infidelity[1] < infidelity[0]);
      CHECK(infidelity[2] < infidelity[1]);
    }
  }
  // The local schedule has an O(1/T^2) contribution from its end points that
  // oscillates with T, so only the (1/64, 1/64) pair is asserted for it.
  const std::array<SubsystemShape, 2> pair{shape(64, 1), shape(64, 1)};
  for (double eps : {0.1, 0.05}) {
    const auto check = verify_adiabatic_bound(pair, AccuracyTarget(eps));
    CHECK(check.infidelity[1] < check.infidelity[0]);
    CHECK(check.infidelity[2] < check.infidelity[1]);
  }
}

TEST_CASE("local schedule default steps suffice") {
  for (auto [a, b] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{16, 16}, {256, 256}, {1024, 16}}) {
    const std::array<SubsystemShape, 2> pair{shape(a, 1), shape(b, 1)};
    for (double eps : {0.3, 0.1}) {
      EvolutionConfig config;
      config.total_time = stage1_time(pair, AccuracyTarget(eps)).stage1_time;
      config.schedule = Schedule::local_adiabatic;
      CHECK_NOTHROW(simulate_stage1(pair, config));
    }
  }
}

TEST_CASE("stage-II trivial and calibrated cases") {
  CHECK(simulate_stage2(4, 4, 16, 0, 0.0).success_probability == doctest::Approx(1.0));
  CHECK(simulate_stage2(4, 4, 16, 100, 1.0).success_probability == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(simulate_stage2(4, 4, 0, 10, 1.0), NoGlobalSolution);
  CHECK_THROWS_AS(simulate_stage2(4, 4, 17, 10, 1.0), std::invalid_argument);

  const auto plan = stage2_plan(16, 16, 1);
  CHECK(plan.steps == kStage2StepMultiplier * 16);
  CHECK(plan.steps * plan.step_time == doctest::Approx(kStage2Kappa * 256.0));
  const auto report = simulate_stage2(16, 16, 1, plan.steps, plan.step_time);
  CHECK(report.success_probability >= 0.9);
  CHECK(report.norm_error < 1e-12);
}

TEST_CASE("stage-II calibration reproduces the frozen constants") {
  const auto cal = calibrate_stage2();
  CHECK(cal.kappa == kStage2Kappa);
  CHECK(cal.multiplier == kStage2StepMultiplier);
  CHECK(cal.reference_kappa_90 < cal.reference_kappa_95);
  CHECK(cal.reference_kappa_95 <= cal.kappa);
}

TEST_CASE("stage-II success with the calibrated plan on other counts") {
  for (auto [a, b, ab] : std::vector<std::array<double, 3>>{
           {16, 16, 1}, {64, 64, 1}, {256, 256, 1}, {10, 10, 3}, {32, 8, 2}, {100, 100, 7}, {1024, 1024, 1}}) {
    const auto plan = stage2_plan(a, b, ab);
    CHECK(simulate_stage2(a, b, ab, plan.steps, plan.step_time).success_probability >= 0.9);
  }
}

TEST_CASE("stage-II adiabatic limit") {
  const double ratio = 256.0;
  const long long steps = 100000;
  double last = 0.0;
  for (double kappa : {16.0, 32.0, 64.0, 128.0, 256.0}) {
    const double p = simulate_stage2(16, 16, 1, steps, kappa * ratio / steps).success_probability;
    CHECK(p >= last);
    last = p;
  }
  CHECK(last >= 1.0 - 1e-3);
}

TEST_CASE("nested search end to end") {
  const auto free = run_nested_search(make_instance(4, {0, 1}, {}), AccuracyTarget(0.1));
  CHECK(free.iterations == 1);
  CHECK(free.stage2_success == doctest::Approx(1.0));
  CHECK(free.stage1_fidelity == doctest::Approx(1.0));

  const auto worked =
      run_nested_search(make_instance(4, {0, 1}, {Constraint::from_pattern({0, 2}, "11")}), AccuracyTarget(0.1));
  CHECK(worked.iterations == 2);
  CHECK(worked.total_time == doctest::Approx(2.0 * worked.stage1_time));

  const auto unsat = run_nested_search(
      make_instance(3, {0}, {Constraint::from_pattern({0}, "0"), Constraint::from_pattern({0}, "1")}), AccuracyTarget(0.1));
  CHECK(unsat.locally_unsatisfiable);

  int checked = 0;
  for (std::uint64_t seed = 1; checked < 3 && seed < 100; ++seed) {
    const auto inst = generate(12, 2, 1.0, 0.5, seed);
    const auto c = census(inst);
    if (c.M_AB == 0 || c.M_A == 0 || c.M_B == 0) continue;
    const auto report = run_nested_search(inst, AccuracyTarget(0.1));
    CHECK(report.stage2_success >= 0.8);
    CHECK(report.stage1_fidelity >= 0.9);
    CHECK(report.iterations == stage2_iterations(c.M_A, c.M_B, c.M_AB));
    ++checked;
  }
  CHECK(checked == 3);
}
