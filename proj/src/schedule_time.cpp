#include "nestsearch/schedule_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nestsearch/errors.hpp"

namespace nestsearch {
namespace {

constexpr int kPeakGridPoints = 10001;
// Slack for ceil() on values that are integers up to rounding, e.g. 2^(16/2).
constexpr double kCeilSlack = 1e-12;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel integrate_panel(const F& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  double error = 0.0;
  const double value = Rule::integrate(f, a, b, 0, 0.0, &error);
  return {a, b, value, error};
}

void check_shapes(std::span<const SubsystemShape> shapes) {
  if (shapes.empty()) {
    throw std::invalid_argument("at least one subsystem shape is required");
  }
}

std::uint64_t checked_ceil(double v) {
  const double c = std::ceil(v * (1.0 - kCeilSlack));
  if (!(c < 9.2e18)) {
    throw std::overflow_error("stage-II iteration count exceeds 64-bit range");
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(c));
}

}  // namespace

AccuracyTarget::AccuracyTarget(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
  }
}

double stage1_integrand(std::span<const SubsystemShape> shapes, double s) {
  const SchedulePoint point(std::clamp(s, 0.0, 1.0));
  double sum = 0.0;
  for (const auto& shape : shapes) {
    const double xi = transition_strength(shape);
    if (xi == 0.0) continue;
    const double w = gap(point, shape);
    const double w3 = w * w * w;
    sum += (xi / w3) * (xi / w3);
  }
  return std::sqrt(sum);
}

std::vector<double> integrand_profile(std::span<const SubsystemShape> shapes, int points) {
  if (points < 2) throw std::invalid_argument("integrand_profile needs at least two points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = stage1_integrand(shapes, static_cast<double>(i) / (points - 1));
  }
  return out;
}

TimeBudget stage1_time(std::span<const SubsystemShape> shapes, const AccuracyTarget& target,
                       const QuadratureOptions& options) {
  check_shapes(shapes);
  TimeBudget out;
  out.degenerate = std::all_of(shapes.begin(), shapes.end(), [](const auto& s) { return s.degenerate(); });
  if (out.degenerate) {
    out.stage1_time = 0.0;
    out.log2_stage1_time = -std::numeric_limits<double>::infinity();
    out.total_time = 0.0;
    out.log2_total_time = out.log2_stage1_time;
    return out;
  }

  const auto f = [shapes](double s) { return stage1_integrand(shapes, s); };

  // The integrand peaks at s = 1/2 with width ~ sqrt(M/N); never let a panel straddle it.
  std::priority_queue<Panel> panels;
  panels.push(integrate_panel(f, 0.0, 0.5));
  panels.push(integrate_panel(f, 0.5, 1.0));
  double value = 0.0;
  double error = 0.0;
  const auto refresh = [&] {
    // Re-summing from a copy keeps the totals free of cancellation drift.
    auto copy = panels;
    value = 0.0;
    error = 0.0;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
  };
  refresh();
  while (error > options.relative_tolerance * std::abs(value) &&
         static_cast<int>(panels.size()) < options.max_panels) {
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = integrate_panel(f, worst.a, mid);
    const Panel right = integrate_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    if (panels.size() % 64 == 0) refresh();
  }
  refresh();

  const double inv_eps = 1.0 / target.epsilon();
  out.stage1_time = value * inv_eps;
  out.log2_stage1_time = std::log2(out.stage1_time);
  out.quadrature_error_estimate = error * inv_eps;
  out.quadrature_panels = static_cast<int>(panels.size());
  out.total_time = out.stage1_time;
  out.log2_total_time = out.log2_stage1_time;

  double peak = -1.0;
  for (int i = 0; i < kPeakGridPoints; ++i) {
    const double s = static_cast<double>(i) / (kPeakGridPoints - 1);
    const double v = f(s);
    if (v > peak) {
      peak = v;
      out.integrand_peak_s = s;
    }
  }
  return out;
}

std::uint64_t stage2_iterations(std::uint64_t m_a, std::uint64_t m_b, std::uint64_t m_ab,
                                const Stage2Policy& policy) {
  if (m_a < 1 || m_b < 1) {
    throw std::invalid_argument("stage2_iterations: M_A and M_B must be at least 1");
  }
  if (m_ab == 0) throw NoGlobalSolution();
  __extension__ typedef unsigned __int128 u128;
  const u128 product = static_cast<u128>(m_a) * m_b;
  if (static_cast<u128>(m_ab) > product) {
    throw std::invalid_argument("stage2_iterations: M_AB exceeds M_A * M_B");
  }
  if (policy.constant != 1.0) {
    return stage2_iterations_log2(std::log2(static_cast<double>(m_a)) + std::log2(static_cast<double>(m_b)) -
                                      std::log2(static_cast<double>(m_ab)),
                                  policy);
  }
  // Smallest q with q^2 >= ceil(M_A M_B / M_AB).
  const u128 target = (product + m_ab - 1) / m_ab;
  auto q = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(target)));
  const auto square = [](std::uint64_t v) { return static_cast<u128>(v) * v; };
  while (q > 0 && square(q) >= target) --q;
  while (square(q) < target) ++q;
  return std::max<std::uint64_t>(q, 1);
}

std::uint64_t stage2_iterations_log2(double log2_ratio, const Stage2Policy& policy) {
  if (!(policy.constant > 0.0)) {
    throw std::invalid_argument("stage-II constant must be positive");
  }
  if (std::isnan(log2_ratio) || log2_ratio < -1e-9) {
    throw std::invalid_argument("stage2_iterations: M_AB exceeds the product of subset counts");
  }
  return checked_ceil(policy.constant * std::exp2(0.5 * std::max(0.0, log2_ratio)));
}

TimeBudget total_time_log2(std::span<const SubsystemShape> shapes, double log2_m_ab, const AccuracyTarget& target,
                           const Stage2Policy& policy, const QuadratureOptions& options) {
  check_shapes(shapes);
  if (std::isinf(log2_m_ab) && log2_m_ab < 0) throw NoGlobalSolution();
  const double log2_product = std::accumulate(shapes.begin(), shapes.end(), 0.0,
                                              [](double acc, const auto& s) { return acc + s.log2_solutions(); });
  TimeBudget out = stage1_time(shapes, target, options);
  out.iterations = stage2_iterations_log2(log2_product - log2_m_ab, policy);
  out.total_time = out.stage1_time * static_cast<double>(out.iterations);
  out.log2_total_time = out.log2_stage1_time + std::log2(static_cast<double>(out.iterations));
  return out;
}

TimeBudget total_time(std::span<const SubsystemShape> shapes, double m_ab, const AccuracyTarget& target,
                      const Stage2Policy& policy, const QuadratureOptions& options) {
  if (m_ab == 0.0) throw NoGlobalSolution();
  if (!(m_ab > 0.0)) throw std::invalid_argument("M_AB must be positive");
  return total_time_log2(shapes, std::log2(m_ab), target, policy, options);
}

double log2_approx_stage1_time(std::span<const SubsystemShape> shapes) {
  check_shapes(shapes);
  double worst = 0.0;
  for (const auto& s : shapes) worst = std::max(worst, s.log2_dimension() - s.log2_solutions());
  return 0.5 * worst;
}

double approx_stage1_time(std::span<const SubsystemShape> shapes) {
  return std::exp2(log2_approx_stage1_time(shapes));
}

double log2_approx_total_time(std::span<const SubsystemShape> shapes, double log2_m_ab) {
  check_shapes(shapes);
  const double log2_product = std::accumulate(shapes.begin(), shapes.end(), 0.0,
                                              [](double acc, const auto& s) { return acc + s.log2_solutions(); });
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : shapes) {
    worst = std::max(worst, s.log2_dimension() + (log2_product - s.log2_solutions()) - log2_m_ab);
  }
  return 0.5 * worst;
}

double approx_total_time(std::span<const SubsystemShape> shapes, double m_ab) {
  if (!(m_ab > 0.0)) throw std::invalid_argument("M_AB must be positive");
  return std::exp2(log2_approx_total_time(shapes, std::log2(m_ab)));
}

}  // namespace nestsearch
