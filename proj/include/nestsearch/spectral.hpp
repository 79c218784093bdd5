#pragma once

#include <array>
#include <cstdint>

namespace nestsearch {

/// One Hilbert-space factor of the search: dimension N and marked-state count M.
///
/// Both are held as base-2 logarithms so that N = 2^64 (and fractional model
/// counts) are representable; the ratio M/N is derived once on construction.
class SubsystemShape {
public:
  /// Exact integer counts, 1 <= solutions <= dimension.
  static SubsystemShape from_counts(std::uint64_t dimension, std::uint64_t solutions);
  /// N = 2^qubits with an integer solution count.
  static SubsystemShape from_qubits(unsigned qubits, std::uint64_t solutions);
  /// Model quantities: log2 N and log2 M may be fractional, 0 <= log2 M <= log2 N.
  static SubsystemShape from_log2(double log2_dimension, double log2_solutions);

  double log2_dimension() const { return log2_dimension_; }
  double log2_solutions() const { return log2_solutions_; }
  double dimension() const;
  double solutions() const;
  /// M/N in (0, 1].
  double ratio() const { return ratio_; }
  bool degenerate() const { return ratio_ == 1.0; }

private:
  SubsystemShape(double log2_dimension, double log2_solutions, double ratio)
      : log2_dimension_(log2_dimension), log2_solutions_(log2_solutions), ratio_(ratio) {}

  double log2_dimension_;
  double log2_solutions_;
  double ratio_;
};

/// Position along the interpolation H(s) = f H_0 + g H_f with f = 1 - s, g = s.
class SchedulePoint {
public:
  explicit SchedulePoint(double s);

  double s() const { return s_; }
  double f() const { return f_; }
  double g() const { return g_; }

private:
  double s_;
  double f_;
  double g_;
};

struct TwoLevelSpectrum {
  double gap = 0.0;
  double ground_energy = 0.0;
  double excited_energy = 0.0;
  /// Ground-state amplitudes on {|Psi_0>, normalized (|Psi_f> - <Psi_0|Psi_f>|Psi_0>)}.
  std::array<double, 2> ground_state{1.0, 0.0};
  /// M = N: the span is one-dimensional and the second basis vector is formal.
  bool degenerate = false;
};

/// Real symmetric 2x2 matrix {{a, b}, {b, c}}.
struct Symmetric2x2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// omega(s) = sqrt((f - g)^2 + 4 (M/N) f g); strictly positive, minimum sqrt(M/N) at s = 1/2.
double gap(const SchedulePoint& point, const SubsystemShape& shape);

/// xi = (M/N) sqrt(N/M - 1); zero when M = N.
double transition_strength(const SubsystemShape& shape);

/// H(s) = f (1 - P_0) + g (1 - P_f) restricted to span{|Psi_0>, |Psi_f>}, in the
/// Gram-Schmidt basis used by TwoLevelSpectrum.
Symmetric2x2 subspace_hamiltonian(const SchedulePoint& point, const SubsystemShape& shape);

TwoLevelSpectrum two_level_spectrum(const SchedulePoint& point, const SubsystemShape& shape);

/// |Psi_f> in the same basis: (sqrt(M/N), sqrt(1 - M/N)).
std::array<double, 2> final_state(const SubsystemShape& shape);

}  // namespace nestsearch
