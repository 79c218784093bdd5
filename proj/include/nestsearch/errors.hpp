#pragma once

#include <stdexcept>
#include <string>

namespace nestsearch {

/// M_AB = 0: there is nothing for the global search to rotate towards.
class NoGlobalSolution : public std::runtime_error {
public:
  NoGlobalSolution() : std::runtime_error("no global solution") {}
};

/// One of the subsets has no local solution (M_A = 0 or M_B = 0).
class LocallyUnsatisfiable : public std::runtime_error {
public:
  explicit LocallyUnsatisfiable(const std::string& subset)
      : std::runtime_error("locally unsatisfiable: subset " + subset + " has no solution") {}
};

/// Request exceeds an enumeration or simulation guard.
class ScaleRefused : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IntegratorStepTooCoarse : public std::runtime_error {
public:
  IntegratorStepTooCoarse(const std::string& what, long long suggested_steps)
      : std::runtime_error(what), suggested_steps_(suggested_steps) {}
  long long suggested_steps() const { return suggested_steps_; }

private:
  long long suggested_steps_;
};

}  // namespace nestsearch
