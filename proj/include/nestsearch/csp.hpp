#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nestsearch/spectral.hpp"

namespace nestsearch {

/// One no-good: the assignment `forbidden` to `variables` is disallowed.
/// Bit j of `forbidden` is the value of variables[j].
struct Constraint {
  std::vector<int> variables;
  std::uint64_t forbidden = 0;

  /// "0"/"1" string, character j is the value of variables[j].
  std::string pattern() const;
  static Constraint from_pattern(std::vector<int> variables, const std::string& pattern);

  bool operator==(const Constraint&) const = default;
};

struct CspInstance {
  int n = 0;
  int k = 0;
  double alpha = 0.0;
  double x = 0.5;
  std::uint64_t seed = 0;
  std::vector<int> partition_A;
  std::vector<Constraint> constraints;
  /// Generation produced zero constraints.
  bool unconstrained = false;

  std::vector<int> partition_B() const;
  /// Throws std::invalid_argument on a malformed instance.
  void validate() const;

  bool operator==(const CspInstance& other) const {
    return n == other.n && k == other.k && alpha == other.alpha && x == other.x && seed == other.seed &&
           partition_A == other.partition_A && constraints == other.constraints;
  }
};

/// Hand-built instance; k is taken from the first constraint, alpha is 0 and x = |A| / n.
CspInstance make_instance(int n, std::vector<int> partition_A, std::vector<Constraint> constraints);

/// round(n alpha / -log2(1 - 2^-k)): the no-good count whose independent survival
/// probability matches 2^(-n alpha).
int constraint_count(int n, int k, double alpha);

/// Random instance: seeded shuffle picks A as the first round(x n) variables,
/// then constraint_count() no-goods, each on k distinct uniform variables with a
/// uniform forbidden pattern. Draws come from mt19937_64 only, so the instance
/// is a pure function of the arguments on every platform.
CspInstance generate(int n, int k, double alpha, double x, std::uint64_t seed);

struct Classification {
  std::vector<std::size_t> within_A;
  std::vector<std::size_t> within_B;
  std::vector<std::size_t> cross;
};

Classification classify(const CspInstance& instance);

struct SolutionCensus {
  std::uint64_t M_A = 0;
  std::uint64_t M_B = 0;
  std::uint64_t M_AB = 0;
  std::uint64_t M_A_S = 0;
  std::uint64_t M_A_NS = 0;
  std::uint64_t M_B_S = 0;
  std::uint64_t M_B_NS = 0;
  /// M_A_S * M_B_S == M_AB.
  bool rectangular = false;
};

inline constexpr int kCensusMaxVariables = 30;
inline constexpr int kCensusMaxSubsetVariables = 25;

/// Exact brute-force counts. A-assignments form the outer loop; `workers` > 1
/// splits that loop, and the result does not depend on the worker count.
/// Throws ScaleRefused beyond the enumeration guards.
SolutionCensus census(const CspInstance& instance, int workers = 1);

struct CensusShapes {
  SubsystemShape A;
  SubsystemShape B;
  std::uint64_t M_AB;
};

/// Throws LocallyUnsatisfiable when M_A or M_B is zero.
CensusShapes shapes_from_census(const CspInstance& instance, const SolutionCensus& census);

inline constexpr int kInstanceFormatVersion = 1;

std::string instance_to_json(const CspInstance& instance);
CspInstance instance_from_json(const std::string& text);
void write_instance(const CspInstance& instance, const std::filesystem::path& path);
CspInstance read_instance(const std::filesystem::path& path);

}  // namespace nestsearch
