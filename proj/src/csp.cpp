#include "nestsearch/csp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "nestsearch/errors.hpp"

namespace nestsearch {
namespace {

// Unbiased draw in [0, bound) by rejection; std::uniform_int_distribution is
// implementation-defined and would make instances platform-dependent.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t low_bits(int k) { return k >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1; }

// Maps a local assignment index (bit j -> variables[j]) onto the full variable mask.
class Scatter {
public:
  explicit Scatter(const std::vector<int>& variables) {
    const int width = static_cast<int>(variables.size());
    low_width_ = std::min(width, 13);
    const int high_width = width - low_width_;
    low_.assign(std::size_t{1} << low_width_, 0);
    high_.assign(std::size_t{1} << high_width, 0);
    for (std::size_t i = 0; i < low_.size(); ++i) {
      for (int j = 0; j < low_width_; ++j) {
        if ((i >> j) & 1U) low_[i] |= std::uint64_t{1} << variables[static_cast<std::size_t>(j)];
      }
    }
    for (std::size_t i = 0; i < high_.size(); ++i) {
      for (int j = 0; j < high_width; ++j) {
        if ((i >> j) & 1U) high_[i] |= std::uint64_t{1} << variables[static_cast<std::size_t>(low_width_ + j)];
      }
    }
  }

  std::uint64_t operator()(std::uint64_t local) const {
    return low_[local & ((std::uint64_t{1} << low_width_) - 1)] | high_[local >> low_width_];
  }

private:
  int low_width_ = 0;
  std::vector<std::uint64_t> low_;
  std::vector<std::uint64_t> high_;
};

struct NoGood {
  std::uint64_t mask;
  std::uint64_t value;
};

NoGood as_mask(const Constraint& c) {
  NoGood out{0, 0};
  for (std::size_t j = 0; j < c.variables.size(); ++j) {
    const std::uint64_t bit = std::uint64_t{1} << c.variables[j];
    out.mask |= bit;
    if ((c.forbidden >> j) & 1U) out.value |= bit;
  }
  return out;
}

bool satisfies(std::uint64_t assignment, const std::vector<NoGood>& nogoods) {
  return std::none_of(nogoods.begin(), nogoods.end(),
                      [assignment](const NoGood& g) { return (assignment & g.mask) == g.value; });
}

std::vector<std::uint64_t> local_solutions(const std::vector<int>& variables, const std::vector<NoGood>& nogoods) {
  const Scatter scatter(variables);
  const std::uint64_t count = std::uint64_t{1} << variables.size();
  std::vector<std::uint64_t> out;
  for (std::uint64_t local = 0; local < count; ++local) {
    const std::uint64_t full = scatter(local);
    if (satisfies(full, nogoods)) out.push_back(full);
  }
  return out;
}

}  // namespace

std::string Constraint::pattern() const {
  std::string out(variables.size(), '0');
  for (std::size_t j = 0; j < variables.size(); ++j) {
    if ((forbidden >> j) & 1U) out[j] = '1';
  }
  return out;
}

Constraint Constraint::from_pattern(std::vector<int> variables, const std::string& pattern) {
  if (pattern.size() != variables.size()) {
    throw std::invalid_argument("constraint pattern length " + std::to_string(pattern.size()) +
                                " does not match " + std::to_string(variables.size()) + " variables");
  }
  if (variables.size() > 64) throw std::invalid_argument("constraint arity above 64 is not supported");
  Constraint c;
  c.variables = std::move(variables);
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    if (pattern[j] == '1') {
      c.forbidden |= std::uint64_t{1} << j;
    } else if (pattern[j] != '0') {
      throw std::invalid_argument("constraint pattern must contain only 0 and 1: \"" + pattern + "\"");
    }
  }
  return c;
}

std::vector<int> CspInstance::partition_B() const {
  std::vector<int> out;
  std::size_t next = 0;
  for (int v = 0; v < n; ++v) {
    if (next < partition_A.size() && partition_A[next] == v) {
      ++next;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

void CspInstance::validate() const {
  if (n < 2) throw std::invalid_argument("instance needs n >= 2");
  if (partition_A.empty() || static_cast<int>(partition_A.size()) >= n) {
    throw std::invalid_argument("partition A must be a proper non-empty subset of the variables");
  }
  for (std::size_t i = 0; i < partition_A.size(); ++i) {
    if (partition_A[i] < 0 || partition_A[i] >= n || (i > 0 && partition_A[i] <= partition_A[i - 1])) {
      throw std::invalid_argument("partition A must be strictly increasing indices in [0, n)");
    }
  }
  for (const auto& c : constraints) {
    if (c.variables.empty() || c.variables.size() > 64) {
      throw std::invalid_argument("constraint must act on 1..64 variables");
    }
    for (std::size_t j = 0; j < c.variables.size(); ++j) {
      if (c.variables[j] < 0 || c.variables[j] >= n || (j > 0 && c.variables[j] <= c.variables[j - 1])) {
        throw std::invalid_argument("constraint variables must be strictly increasing indices in [0, n)");
      }
    }
    if (c.variables.size() < 64 && (c.forbidden >> c.variables.size()) != 0) {
      throw std::invalid_argument("constraint pattern has bits beyond its arity");
    }
  }
}

CspInstance make_instance(int n, std::vector<int> partition_A, std::vector<Constraint> constraints) {
  CspInstance out;
  out.n = n;
  out.k = constraints.empty() ? 0 : static_cast<int>(constraints.front().variables.size());
  out.x = n > 0 ? static_cast<double>(partition_A.size()) / n : 0.0;
  out.partition_A = std::move(partition_A);
  out.constraints = std::move(constraints);
  out.unconstrained = out.constraints.empty();
  out.validate();
  return out;
}

int constraint_count(int n, int k, double alpha) {
  if (k < 1 || k > 64) throw std::invalid_argument("k must lie in [1, 64]");
  const double per_nogood = -std::log2(1.0 - std::exp2(-k));
  return static_cast<int>(std::llround(n * alpha / per_nogood));
}

CspInstance generate(int n, int k, double alpha, double x, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("n must be at least 2, got " + std::to_string(n));
  if (k < 2 || k > n) throw std::invalid_argument("k must satisfy 2 <= k <= n, got " + std::to_string(k));
  if (k > 64) throw std::invalid_argument("k above 64 is not supported");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be a finite value >= 0");
  }
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("x must satisfy 0 < x < 1, got " + std::to_string(x));

  std::mt19937_64 rng(seed);
  CspInstance out;
  out.n = n;
  out.k = k;
  out.alpha = alpha;
  out.x = x;
  out.seed = seed;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[bounded(rng, i + 1)]);
  }
  const int size_a = std::clamp(static_cast<int>(std::lround(x * n)), 1, n - 1);
  out.partition_A.assign(order.begin(), order.begin() + size_a);
  std::sort(out.partition_A.begin(), out.partition_A.end());

  const int m = constraint_count(n, k, alpha);
  out.constraints.reserve(static_cast<std::size_t>(m));
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int c = 0; c < m; ++c) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int j = 0; j < k; ++j) {
      const auto pick = static_cast<std::size_t>(j) + bounded(rng, static_cast<std::uint64_t>(n - j));
      std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
    }
    Constraint constraint;
    constraint.variables.assign(pool.begin(), pool.begin() + k);
    std::sort(constraint.variables.begin(), constraint.variables.end());
    constraint.forbidden = rng() & low_bits(k);
    out.constraints.push_back(std::move(constraint));
  }
  out.unconstrained = m == 0;
  return out;
}

Classification classify(const CspInstance& instance) {
  std::vector<char> in_a(static_cast<std::size_t>(instance.n), 0);
  for (int v : instance.partition_A) in_a[static_cast<std::size_t>(v)] = 1;

  Classification out;
  for (std::size_t i = 0; i < instance.constraints.size(); ++i) {
    const auto& vars = instance.constraints[i].variables;
    const auto inside_a = [&](int v) { return in_a[static_cast<std::size_t>(v)] != 0; };
    if (std::all_of(vars.begin(), vars.end(), inside_a)) {
      out.within_A.push_back(i);
    } else if (std::none_of(vars.begin(), vars.end(), inside_a)) {
      out.within_B.push_back(i);
    } else {
      out.cross.push_back(i);
    }
  }
  return out;
}

SolutionCensus census(const CspInstance& instance, int workers) {
  instance.validate();
  const std::vector<int> vars_b = instance.partition_B();
  const int n_a = static_cast<int>(instance.partition_A.size());
  const int n_b = static_cast<int>(vars_b.size());
  if (instance.n > kCensusMaxVariables || n_a > kCensusMaxSubsetVariables || n_b > kCensusMaxSubsetVariables) {
    throw ScaleRefused("census refuses n=" + std::to_string(instance.n) + " (n_A=" + std::to_string(n_a) +
                       ", n_B=" + std::to_string(n_b) + "): exhaustive enumeration is limited to n <= " +
                       std::to_string(kCensusMaxVariables) + " and subsets of at most " +
                       std::to_string(kCensusMaxSubsetVariables) + " variables");
  }

  const Classification classes = classify(instance);
  const auto collect = [&](const std::vector<std::size_t>& indices) {
    std::vector<NoGood> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(as_mask(instance.constraints[i]));
    return out;
  };
  const std::vector<NoGood> nogoods_a = collect(classes.within_A);
  const std::vector<NoGood> nogoods_b = collect(classes.within_B);
  const std::vector<NoGood> nogoods_cross = collect(classes.cross);

  const std::vector<std::uint64_t> sols_a = local_solutions(instance.partition_A, nogoods_a);
  const std::vector<std::uint64_t> sols_b = local_solutions(vars_b, nogoods_b);

  SolutionCensus out;
  out.M_A = sols_a.size();
  out.M_B = sols_b.size();

  if (nogoods_cross.empty()) {
    out.M_AB = out.M_A * out.M_B;
    out.M_A_S = out.M_B > 0 ? out.M_A : 0;
    out.M_B_S = out.M_A > 0 ? out.M_B : 0;
  } else {
    struct Partial {
      std::uint64_t m_ab = 0;
      std::uint64_t m_a_s = 0;
      std::vector<char> b_extendable;
    };
    const auto scan = [&](std::size_t begin, std::size_t end, Partial& part) {
      part.b_extendable.assign(sols_b.size(), 0);
      for (std::size_t ia = begin; ia < end; ++ia) {
        bool extendable = false;
        for (std::size_t ib = 0; ib < sols_b.size(); ++ib) {
          if (satisfies(sols_a[ia] | sols_b[ib], nogoods_cross)) {
            ++part.m_ab;
            extendable = true;
            part.b_extendable[ib] = 1;
          }
        }
        if (extendable) ++part.m_a_s;
      }
    };

    const std::size_t threads =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(1, sols_a.size()));
    std::vector<Partial> parts(threads);
    if (threads == 1) {
      scan(0, sols_a.size(), parts[0]);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (sols_a.size() + threads - 1) / threads;
      for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(sols_a.size(), t * chunk);
        const std::size_t end = std::min(sols_a.size(), begin + chunk);
        pool.emplace_back(scan, begin, end, std::ref(parts[t]));
      }
      for (auto& th : pool) th.join();
    }

    std::vector<char> b_extendable(sols_b.size(), 0);
    for (const auto& part : parts) {
      out.M_AB += part.m_ab;
      out.M_A_S += part.m_a_s;
      for (std::size_t ib = 0; ib < sols_b.size(); ++ib) b_extendable[ib] |= part.b_extendable[ib];
    }
    out.M_B_S = static_cast<std::uint64_t>(std::count(b_extendable.begin(), b_extendable.end(), 1));
  }

  out.M_A_NS = out.M_A - out.M_A_S;
  out.M_B_NS = out.M_B - out.M_B_S;
  out.rectangular = out.M_A_S * out.M_B_S == out.M_AB;
  return out;
}

CensusShapes shapes_from_census(const CspInstance& instance, const SolutionCensus& census) {
  if (census.M_A == 0) throw LocallyUnsatisfiable("A");
  if (census.M_B == 0) throw LocallyUnsatisfiable("B");
  const auto n_a = static_cast<unsigned>(instance.partition_A.size());
  const auto n_b = static_cast<unsigned>(instance.n) - n_a;
  return {SubsystemShape::from_qubits(n_a, census.M_A), SubsystemShape::from_qubits(n_b, census.M_B), census.M_AB};
}

}  // namespace nestsearch
