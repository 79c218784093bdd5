#include "nestsearch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nestsearch {

SubsystemShape SubsystemShape::from_counts(std::uint64_t dimension, std::uint64_t solutions) {
  if (solutions < 1 || solutions > dimension) {
    throw std::invalid_argument("SubsystemShape: need 1 <= M <= N, got M=" + std::to_string(solutions) +
                                " N=" + std::to_string(dimension));
  }
  const double ratio = static_cast<double>(solutions) / static_cast<double>(dimension);
  return SubsystemShape(std::log2(static_cast<double>(dimension)), std::log2(static_cast<double>(solutions)),
                        solutions == dimension ? 1.0 : ratio);
}

SubsystemShape SubsystemShape::from_qubits(unsigned qubits, std::uint64_t solutions) {
  if (qubits > 1023) {
    throw std::invalid_argument("SubsystemShape: qubit count too large");
  }
  const double log2_n = static_cast<double>(qubits);
  if (solutions < 1 || std::log2(static_cast<double>(solutions)) > log2_n) {
    throw std::invalid_argument("SubsystemShape: need 1 <= M <= 2^qubits");
  }
  return from_log2(log2_n, std::log2(static_cast<double>(solutions)));
}

SubsystemShape SubsystemShape::from_log2(double log2_dimension, double log2_solutions) {
  if (!std::isfinite(log2_dimension) || !std::isfinite(log2_solutions)) {
    throw std::invalid_argument("SubsystemShape: non-finite log2 count");
  }
  if (log2_solutions < 0.0 || log2_solutions > log2_dimension) {
    throw std::invalid_argument("SubsystemShape: need 0 <= log2 M <= log2 N, got log2 M=" +
                                std::to_string(log2_solutions) + " log2 N=" + std::to_string(log2_dimension));
  }
  const double ratio = log2_solutions == log2_dimension ? 1.0 : std::exp2(log2_solutions - log2_dimension);
  return SubsystemShape(log2_dimension, log2_solutions, ratio);
}

double SubsystemShape::dimension() const { return std::exp2(log2_dimension_); }

double SubsystemShape::solutions() const { return std::exp2(log2_solutions_); }

SchedulePoint::SchedulePoint(double s) : s_(s), f_(1.0 - s), g_(s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("SchedulePoint: s must lie in [0, 1], got " + std::to_string(s));
  }
}

double gap(const SchedulePoint& point, const SubsystemShape& shape) {
  const double diff = point.f() - point.g();
  return std::sqrt(diff * diff + 4.0 * shape.ratio() * point.f() * point.g());
}

double transition_strength(const SubsystemShape& shape) {
  if (shape.degenerate()) return 0.0;
  // r sqrt(1/r - 1) == sqrt(r) sqrt(1 - r), without forming 1/r.
  const double r = shape.ratio();
  return std::sqrt(r) * std::sqrt(1.0 - r);
}

std::array<double, 2> final_state(const SubsystemShape& shape) {
  const double r = shape.ratio();
  return {std::sqrt(r), std::sqrt(1.0 - r)};
}

Symmetric2x2 subspace_hamiltonian(const SchedulePoint& point, const SubsystemShape& shape) {
  // With M = N we get c = 1, d = 0: the formal second vector is orthogonal to
  // both projectors and sits at energy f + g = 1.
  const auto [c, d] = final_state(shape);
  const double f = point.f();
  const double g = point.g();
  return {g * d * d, -g * c * d, f + g * c * c};
}

TwoLevelSpectrum two_level_spectrum(const SchedulePoint& point, const SubsystemShape& shape) {
  TwoLevelSpectrum out;
  out.degenerate = shape.degenerate();
  const Symmetric2x2 h = subspace_hamiltonian(point, shape);

  // Trace is f + g = 1, so the eigenvalues are (1 -+ omega) / 2.
  const double mean = 0.5 * (h.a + h.c);
  const double half_split = 0.5 * std::hypot(h.a - h.c, 2.0 * h.b);
  out.gap = 2.0 * half_split;
  out.ground_energy = mean - half_split;
  out.excited_energy = mean + half_split;

  // Two candidate null vectors of (H - E0); keep the better conditioned one.
  std::array<double, 2> v1{h.b, out.ground_energy - h.a};
  std::array<double, 2> v2{out.ground_energy - h.c, h.b};
  const double n1 = std::hypot(v1[0], v1[1]);
  const double n2 = std::hypot(v2[0], v2[1]);
  std::array<double, 2> v = n1 >= n2 ? v1 : v2;
  double norm = std::max(n1, n2);
  if (norm == 0.0) {
    // H is a multiple of the identity; any vector will do.
    v = {1.0, 0.0};
    norm = 1.0;
  }
  v[0] /= norm;
  v[1] /= norm;
  if (v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0)) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  out.ground_state = v;
  return out;
}

}  // namespace nestsearch
