#include "mflab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mflab::stats {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

namespace {

std::pair<double, double> ecdf_deviations(std::vector<double>& u) {
  if (u.empty()) throw std::invalid_argument("uniformity test needs samples");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d_plus = 0.0;
  double d_minus = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = std::clamp(u[i], 0.0, 1.0);
    d_plus = std::max(d_plus, static_cast<double>(i + 1) / n - x);
    d_minus = std::max(d_minus, x - static_cast<double>(i) / n);
  }
  return {d_plus, d_minus};
}

}  // namespace

UniformityTest kuiper_uniform(std::vector<double> unit_samples) {
  const auto [dp, dm] = ecdf_deviations(unit_samples);
  const double rn = std::sqrt(static_cast<double>(unit_samples.size()));
  return {(dp + dm) * (rn + 0.155 + 0.24 / rn), 1.747};
}

UniformityTest ks_uniform(std::vector<double> unit_samples) {
  const auto [dp, dm] = ecdf_deviations(unit_samples);
  const double rn = std::sqrt(static_cast<double>(unit_samples.size()));
  return {std::max(dp, dm) * (rn + 0.12 + 0.11 / rn), 1.358};
}

std::vector<double> circular_histogram(std::span<const double> theta, std::size_t bins) {
  if (bins == 0 || theta.empty()) throw std::invalid_argument("circular_histogram: empty input");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<double> h(bins, 0.0);
  for (double t : theta) {
    double w = std::fmod(t, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    auto b = static_cast<std::size_t>(w / kTwoPi * static_cast<double>(bins));
    h[std::min(b, bins - 1)] += 1.0;
  }
  const double norm = static_cast<double>(theta.size()) * kTwoPi / static_cast<double>(bins);
  for (double& x : h) x /= norm;
  return h;
}

std::vector<double> smooth_circular(std::span<const double> histogram, double width) {
  const auto bins = static_cast<std::ptrdiff_t>(histogram.size());
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(4.0 * width));
  std::vector<double> kernel;
  for (std::ptrdiff_t d = -reach; d <= reach; ++d) {
    kernel.push_back(std::exp(-0.5 * static_cast<double>(d * d) / (width * width)));
  }
  const double total = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  std::vector<double> out(histogram.size(), 0.0);
  for (std::ptrdiff_t b = 0; b < bins; ++b) {
    double acc = 0.0;
    for (std::ptrdiff_t d = -reach; d <= reach; ++d) {
      const std::ptrdiff_t idx = ((b + d) % bins + bins) % bins;
      acc += kernel[static_cast<std::size_t>(d + reach)] * histogram[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(b)] = acc / total;
  }
  return out;
}

std::size_t count_modes(std::span<const double> profile, double floor_fraction) {
  const std::size_t n = profile.size();
  if (n == 0) return 0;
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (peak <= 0.0) return 0;
  const double floor = floor_fraction * peak;
  // Start the scan just after a strict drop so plateaus are not split.
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (profile[i] < profile[(i + n - 1) % n]) {
      start = i;
      break;
    }
  }
  std::size_t modes = 0;
  bool rising = false;
  double level = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = (start + step) % n;
    const std::size_t prev = (i + n - 1) % n;
    if (profile[i] > profile[prev]) {
      rising = true;
    } else if (profile[i] < profile[prev] && rising) {
      rising = false;
      level = profile[prev];
      if (level >= floor) ++modes;
    }
  }
  if (rising && profile[start] < profile[(start + n - 1) % n] && profile[(start + n - 1) % n] >= floor) {
    ++modes;
  }
  return modes == 0 ? 1 : modes;
}

std::size_t phase_modality(std::span<const double> theta) {
  const auto h = circular_histogram(theta, 64);
  return count_modes(smooth_circular(h, 3.0));
}

}  // namespace mflab::stats
