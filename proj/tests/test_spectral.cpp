#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nestsearch/spectral.hpp"

using namespace nestsearch;

namespace {

// Eigenvalues of a real symmetric 2x2 via trace and determinant.
std::pair<double, double> eig2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double half = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mean - half, mean + half};
}

}  // namespace

TEST_CASE("gap examples") {
  const auto quarter = SubsystemShape::from_counts(4, 1);
  CHECK(gap(SchedulePoint(0.0), quarter) == 1.0);
  CHECK(gap(SchedulePoint(1.0), quarter) == 1.0);
  CHECK(gap(SchedulePoint(0.5), quarter) == doctest::Approx(0.5).epsilon(1e-15));

  const auto tiny = SubsystemShape::from_qubits(40, 1);
  const long double r = 1.0L / 1099511627776.0L;
  const long double s = 0.25L;
  const long double ref = std::sqrt((1 - 2 * s) * (1 - 2 * s) + 4 * r * s * (1 - s));
  CHECK(std::abs(gap(SchedulePoint(0.25), tiny) - static_cast<double>(ref)) < 1e-12);
  CHECK(std::abs(gap(SchedulePoint(0.25), tiny) - 0.5) < 1e-6);
}

TEST_CASE("schedule point rejects s outside [0, 1]") {
  CHECK_THROWS_AS(SchedulePoint(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(SchedulePoint(1.5), std::invalid_argument);
  CHECK_THROWS_AS(SubsystemShape::from_counts(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(SubsystemShape::from_counts(4, 5), std::invalid_argument);
}

TEST_CASE("transition strength examples") {
  CHECK(transition_strength(SubsystemShape::from_counts(8, 8)) == 0.0);
  CHECK(transition_strength(SubsystemShape::from_qubits(20, 1u << 20)) == 0.0);
  CHECK(transition_strength(SubsystemShape::from_counts(4, 1)) == doctest::Approx(0.25 * std::sqrt(3.0)));
  const double ref = (2.0 / 1024.0) * std::sqrt(511.0);
  CHECK(transition_strength(SubsystemShape::from_counts(1024, 2)) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(ref == doctest::Approx(0.0441).epsilon(1e-3));
}

TEST_CASE("transition strength rises then falls in M/N") {
  std::vector<double> xi;
  for (int i = 0; i <= 400; ++i) {
    const double log2_ratio = -20.0 + 20.0 * i / 400.0;
    xi.push_back(transition_strength(SubsystemShape::from_log2(20.0, 20.0 + log2_ratio)));
  }
  int sign_changes = 0;
  int last = 0;
  for (std::size_t i = 1; i < xi.size(); ++i) {
    const int sign = xi[i] > xi[i - 1] ? 1 : -1;
    if (last != 0 && sign != last) ++sign_changes;
    last = sign;
  }
  CHECK(sign_changes == 1);
  CHECK(xi.front() < xi[200]);
  CHECK(xi.back() == 0.0);
}

TEST_CASE("two-level spectrum at the endpoints") {
  const auto shape = SubsystemShape::from_counts(16, 3);
  CHECK(two_level_spectrum(SchedulePoint(0.0), shape).ground_energy == doctest::Approx(0.0));
  CHECK(two_level_spectrum(SchedulePoint(1.0), shape).ground_energy == doctest::Approx(0.0));
  const auto g1 = two_level_spectrum(SchedulePoint(1.0), shape).ground_state;
  const auto f = final_state(shape);
  CHECK(std::abs(g1[0] * f[0] + g1[1] * f[1]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-level spectrum matches an explicit Gram-Schmidt construction") {
  // Full N = 16 space, marked state |0>, uniform start.
  constexpr int N = 16;
  const double s = 0.3;
  std::vector<double> psi0(N, 1.0 / 4.0);
  std::vector<double> psif(N, 0.0);
  psif[0] = 1.0;
  double overlap = 0.0;
  for (int i = 0; i < N; ++i) overlap += psi0[i] * psif[i];
  std::vector<double> e1(N);
  double norm = 0.0;
  for (int i = 0; i < N; ++i) {
    e1[i] = psif[i] - overlap * psi0[i];
    norm += e1[i] * e1[i];
  }
  for (auto& v : e1) v /= std::sqrt(norm);
  // <u|H|v> with H = (1-s)(1 - |psi0><psi0|) + s(1 - |psif><psif|).
  const auto element = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double uv = 0.0, u0 = 0.0, v0 = 0.0, uf = 0.0, vf = 0.0;
    for (int i = 0; i < N; ++i) {
      uv += u[i] * v[i];
      u0 += u[i] * psi0[i];
      v0 += v[i] * psi0[i];
      uf += u[i] * psif[i];
      vf += v[i] * psif[i];
    }
    return (1 - s) * (uv - u0 * v0) + s * (uv - uf * vf);
  };
  const auto [e0, e1v] = eig2(element(psi0, psi0), element(psi0, e1), element(e1, e1));
  const auto spec = two_level_spectrum(SchedulePoint(s), SubsystemShape::from_counts(N, 1));
  CHECK(std::abs(spec.ground_energy - e0) < 1e-10);
  CHECK(std::abs(spec.excited_energy - e1v) < 1e-10);
}

TEST_CASE("degenerate shape keeps a unit gap") {
  const auto full = SubsystemShape::from_counts(32, 32);
  for (double s : {0.0, 0.3, 0.5, 1.0}) {
    const auto spec = two_level_spectrum(SchedulePoint(s), full);
    CHECK(spec.degenerate);
    CHECK(spec.ground_energy == 0.0);
    CHECK(spec.gap == doctest::Approx(1.0));
  }
}

TEST_CASE("spectrum invariants on random triples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double log2_n = 1.0 + 62.0 * unit(rng);
    const double log2_m = log2_n * unit(rng);
    const double s = unit(rng);
    const auto shape = SubsystemShape::from_log2(log2_n, log2_m);
    const SchedulePoint point(s);
    const auto spec = two_level_spectrum(point, shape);
    const double w = gap(point, shape);
    CHECK(std::abs((spec.excited_energy - spec.ground_energy) - w) <= 1e-12 * w);
    CHECK(std::hypot(spec.ground_state[0], spec.ground_state[1]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
    CHECK(gap(SchedulePoint(1.0 - s), shape) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("minimum gap is sqrt(M/N) at s = 1/2") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double log2_n = 2.0 + 40.0 * unit(rng);
    const auto shape = SubsystemShape::from_log2(log2_n, log2_n * unit(rng));
    double best = 2.0;
    double best_s = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double s = i / 1000.0;
      const double w = gap(SchedulePoint(s), shape);
      if (w < best) {
        best = w;
        best_s = s;
      }
    }
    CHECK(best_s == 0.5);
    CHECK(std::abs(best - std::sqrt(shape.ratio())) < 1e-9);
    CHECK(gap(SchedulePoint(0.0), shape) == 1.0);
    CHECK(gap(SchedulePoint(1.0), shape) == 1.0);
  }
}
