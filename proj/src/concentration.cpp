#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mflab/graphs.hpp"

namespace mflab::graphs {

double kl_bernoulli(double x, double y) {
  if (!(x > 0.0 && x < 1.0) || !(y > 0.0 && y < 1.0)) {
    throw std::invalid_argument("kl_bernoulli: arguments must lie strictly inside (0, 1)");
  }
  const double value = x * std::log(x / y) + (1.0 - x) * std::log1p(-x) - (1.0 - x) * std::log1p(-y);
  return std::max(0.0, value);
}

namespace {

double log_binomial_term(std::size_t n, std::size_t k, double log_q, double log_1mq) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) + kk * log_q +
         (nn - kk) * log_1mq;
}

// Sum of binomial pmf over k in [lo, hi], accumulated in log space.
double binomial_mass(std::size_t n, double q, std::size_t lo, std::size_t hi) {
  if (lo > hi) return 0.0;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  std::vector<double> logs;
  logs.reserve(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) logs.push_back(log_binomial_term(n, k, log_q, log_1mq));
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return std::exp(peak + std::log(sum));
}

}  // namespace

TailBound binomial_tail(std::size_t n, double q, double eps) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("binomial_tail: q must lie in (0, 1)");
  const double shifted = q + eps;
  if (!(shifted > 0.0 && shifted < 1.0)) {
    throw std::invalid_argument("binomial_tail: q + eps must lie in (0, 1)");
  }
  TailBound result;
  result.upper = eps >= 0.0;
  result.chernoff_bound = std::exp(-static_cast<double>(n) * kl_bernoulli(shifted, q));
  if (n > kExactTailLimit) return result;

  // Snap the threshold (q+eps) n to an integer when it is one up to rounding,
  // so that e.g. (0.3 + 0.2) * 20 counts as exactly 10.
  double threshold = shifted * static_cast<double>(n);
  const double nearest = std::round(threshold);
  if (std::abs(threshold - nearest) <= 1e-9 * std::max(1.0, threshold)) threshold = nearest;

  if (result.upper) {
    const auto first = static_cast<std::size_t>(std::floor(threshold)) + 1;  // k > threshold
    result.exact_tail = first > n ? 0.0 : binomial_mass(n, q, first, n);
  } else {
    const double below = std::ceil(threshold) - 1.0;  // k < threshold
    result.exact_tail = below < 0.0 ? 0.0 : binomial_mass(n, q, 0, static_cast<std::size_t>(below));
  }
  return result;
}

}  // namespace mflab::graphs
