#include "nestsearch/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestsearch {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

bool nearly_equal(double a, double b) {
  if (a == b) return true;  // covers matching infinities
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void PartitionModel::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2, got " + std::to_string(n));
  if (k < 2) throw std::invalid_argument("k must be at least 2, got " + std::to_string(k));
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("alpha must be a finite value >= 0, got " + std::to_string(alpha));
  }
  if (!(x > 0.0 && x < 1.0)) {
    throw std::invalid_argument("x must satisfy 0 < x < 1, got " + std::to_string(x));
  }
}

ModelEstimates estimate(const PartitionModel& model) {
  model.validate();
  const double n = model.n;
  const double na = n * model.x;
  const double nb = n * (1.0 - model.x);

  ModelEstimates e;
  e.log2_N_A = na;
  e.log2_N_B = nb;
  e.raw_log2_M_A = na - n * model.alpha * std::pow(model.x, model.k);
  e.raw_log2_M_B = nb - n * model.alpha * std::pow(1.0 - model.x, model.k);
  e.raw_log2_M_AB = n - n * model.alpha;

  e.log2_M_A = std::max(0.0, e.raw_log2_M_A);
  e.log2_M_B = std::max(0.0, e.raw_log2_M_B);
  e.log2_M_AB = std::max(0.0, e.raw_log2_M_AB);
  e.clamped = e.raw_log2_M_A < 0.0 || e.raw_log2_M_B < 0.0 || e.raw_log2_M_AB < 0.0;
  return e;
}

std::array<SubsystemShape, 2> model_shapes(const ModelEstimates& e) {
  return {SubsystemShape::from_log2(e.log2_N_A, e.log2_M_A), SubsystemShape::from_log2(e.log2_N_B, e.log2_M_B)};
}

TimeBudget model_time(const PartitionModel& model, const AccuracyTarget& target, const Stage2Policy& policy,
                      const QuadratureOptions& options) {
  const ModelEstimates e = estimate(model);
  const auto shapes = model_shapes(e);
  TimeBudget out = total_time_log2(shapes, e.raw_log2_M_AB, target, policy, options);
  out.clamped_estimate = e.clamped;
  return out;
}

double approx_model_time_log2(const PartitionModel& model) {
  model.validate();
  const double a = model.alpha;
  const double worst = std::max(a - a * std::pow(1.0 - model.x, model.k), a - a * std::pow(model.x, model.k));
  return 0.5 * model.n * worst;
}

double scaling_exponent(int k, double alpha) {
  if (k < 2) throw std::invalid_argument("k must be at least 2");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  return alpha / 2.0 - alpha / std::exp2(k + 1);
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b, double tolerance) {
  if (!(a < b)) throw std::invalid_argument("golden_section_minimize: need a < b");
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

OptimizeResult optimize_x(int n, int k, double alpha, const AccuracyTarget& target, const OptimizeConfig& config) {
  PartitionModel model{n, k, alpha, 0.5};
  model.validate();
  if (!(config.x_lo > 0.0 && config.x_hi < 1.0 && config.x_lo < config.x_hi)) {
    throw std::invalid_argument("optimize_x: need 0 < x_lo < x_hi < 1");
  }
  if (config.grid_points < 3) throw std::invalid_argument("optimize_x: need at least 3 grid points");

  OptimizeResult result;
  const auto objective = [&](double x) {
    ++result.evaluations;
    PartitionModel m = model;
    m.x = x;
    return model_time(m, target).log2_total_time;
  };

  const int count = config.grid_points;
  std::vector<double> xs(static_cast<std::size_t>(count));
  std::vector<double> values(xs.size());
  for (int i = 0; i < count; ++i) {
    xs[static_cast<std::size_t>(i)] = config.x_lo + (config.x_hi - config.x_lo) * i / (count - 1);
    values[static_cast<std::size_t>(i)] = objective(xs[static_cast<std::size_t>(i)]);
  }

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  if (nearly_equal(*lo_it, *hi_it)) {
    result.x_opt = 0.5;
    result.log2_time = objective(0.5);
    return result;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const bool tie = nearly_equal(values[i], values[best]);
    if ((!tie && values[i] < values[best]) || (tie && std::abs(xs[i] - 0.5) < std::abs(xs[best] - 0.5))) {
      best = i;
    }
  }

  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[std::min(best + 1, xs.size() - 1)];
  const double refined = golden_section_minimize(objective, a, b, config.x_tolerance);
  const double refined_value = objective(refined);

  if (refined_value < values[best] && !nearly_equal(refined_value, values[best])) {
    result.x_opt = refined;
    result.log2_time = refined_value;
  } else {
    result.x_opt = xs[best];
    result.log2_time = values[best];
  }
  // Symmetric objectives: prefer the centre when it is as good as the optimum found.
  if (a <= 0.5 && 0.5 <= b) {
    const double centre = objective(0.5);
    if (centre <= result.log2_time || nearly_equal(centre, result.log2_time)) {
      result.x_opt = 0.5;
      result.log2_time = centre;
    }
  }
  return result;
}

}  // namespace nestsearch
