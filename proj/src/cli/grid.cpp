#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nestsearch/cli.hpp"

namespace nestsearch::cli {
namespace {

double parse_number(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size() || !std::isfinite(value)) {
    throw std::invalid_argument("grid: cannot parse number \"" + token + "\"");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, sep)) out.push_back(token);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("grid: empty specification");
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("grid: range form is lo:hi:count, got \"" + text + "\"");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const double count_value = parse_number(parts[2]);
    if (count_value < 1 || count_value != std::floor(count_value)) {
      throw std::invalid_argument("grid: count must be a positive integer");
    }
    const auto count = static_cast<long>(count_value);
    if (count == 1) {
      grid.push_back(lo);
    } else {
      for (long i = 0; i < count; ++i) {
        grid.push_back(i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
      }
    }
  } else {
    for (const auto& token : split(text, ',')) grid.push_back(parse_number(token));
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("grid: values must be strictly increasing");
  }
  return grid;
}

Varying parse_varying(const std::string& name) {
  if (name == "x") return Varying::x;
  if (name == "alpha") return Varying::alpha;
  if (name == "n") return Varying::n;
  if (name == "N") return Varying::N;
  if (name == "k") return Varying::k;
  throw std::invalid_argument("unknown sweep variable \"" + name + "\" (expected x, alpha, n, N or k)");
}

std::string to_string(Varying v) {
  switch (v) {
    case Varying::x: return "x";
    case Varying::alpha: return "alpha";
    case Varying::n: return "n";
    case Varying::N: return "N";
    case Varying::k: return "k";
  }
  return "?";
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_line: need two or more points");
  const double count = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / count);
  return fit;
}

}  // namespace nestsearch::cli
