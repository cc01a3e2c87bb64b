#include "mflab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace mflab::metrics {

OrderParameter order_parameter(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("order_parameter: empty particle set");
  double c = 0.0;
  double s = 0.0;
  for (double t : theta) {
    c += std::cos(t);
    s += std::sin(t);
  }
  const double n = static_cast<double>(theta.size());
  c /= n;
  s /= n;
  double psi = std::atan2(s, c);
  if (psi <= -std::numbers::pi) psi = std::numbers::pi;
  return {std::min(1.0, std::hypot(c, s)), psi};
}

OrderParameter order_parameter(const sde::EnsembleState& state, std::optional<graphs::Block> subset) {
  if (!subset) return order_parameter(std::span<const double>(state.theta));
  if (subset->begin >= subset->end || subset->end > state.size()) {
    throw std::invalid_argument("order_parameter: empty or out-of-range subset");
  }
  return order_parameter(std::span<const double>(state.theta).subspan(subset->begin, subset->size()));
}

EmpiricalMeasure empirical_measure(std::span<const double> theta,
                                   std::span<const std::uint32_t> atom, std::size_t atom_count) {
  if (theta.size() != atom.size()) throw std::invalid_argument("empirical_measure: size mismatch");
  EmpiricalMeasure emp;
  emp.atom_count = atom_count;
  emp.theta.reserve(theta.size());
  for (double t : theta) {
    double wrapped = std::fmod(t, 2.0 * std::numbers::pi);
    if (wrapped < 0.0) wrapped += 2.0 * std::numbers::pi;
    emp.theta.push_back(wrapped);
  }
  emp.atom.assign(atom.begin(), atom.end());
  for (auto a : emp.atom) {
    if (a >= atom_count) throw std::invalid_argument("empirical_measure: atom index out of range");
  }
  return emp;
}

EmpiricalMeasure empirical_measure(const sde::EnsembleState& state, std::size_t atom_count) {
  return empirical_measure(state.theta, state.atom, atom_count);
}

namespace {

// (1/n) sum_{i in atom b} e^{i k theta_i} for every atom b, k = 1..k_max.
std::vector<std::vector<fp::Mode>> atom_sums(const EmpiricalMeasure& emp, std::size_t k_max) {
  std::vector<std::vector<fp::Mode>> sums(emp.atom_count, std::vector<fp::Mode>(k_max));
  const double inv_n = 1.0 / static_cast<double>(emp.theta.size());
  for (std::size_t i = 0; i < emp.theta.size(); ++i) {
    const fp::Mode base = std::polar(1.0, emp.theta[i]);
    fp::Mode power = base;
    for (std::size_t k = 1; k <= k_max; ++k) {
      sums[emp.atom[i]][k - 1] += inv_n * power;
      power *= base;
    }
  }
  return sums;
}

double test_gap(fp::Mode diff, std::size_t k) {
  return std::max(std::abs(diff.real()), std::abs(diff.imag())) / (2.0 * static_cast<double>(k));
}

}  // namespace

fp::FourierDensity empirical_modes(const EmpiricalMeasure& emp, std::size_t k_max) {
  if (emp.theta.empty()) throw std::invalid_argument("empirical_modes: empty measure");
  std::vector<double> counts(emp.atom_count, 0.0);
  for (auto a : emp.atom) counts[a] += 1.0;
  const double n = static_cast<double>(emp.theta.size());
  std::vector<double> weights;
  for (double c : counts) weights.push_back(c / n);
  fp::FourierDensity q = fp::FourierDensity::uniform(k_max, weights);
  const auto sums = atom_sums(emp, k_max);
  for (std::size_t b = 0; b < emp.atom_count; ++b) {
    if (weights[b] == 0.0) continue;
    for (std::size_t k = 0; k < k_max; ++k) q.modes[b][k] = sums[b][k] / weights[b];
  }
  return q;
}

double bl_distance_estimate(const EmpiricalMeasure& emp, const fp::FourierDensity& density,
                            const models::DisorderLaw* disorder) {
  if (emp.theta.empty()) throw std::invalid_argument("bl_distance_estimate: empty measure");
  if (density.atoms() != emp.atom_count) {
    throw std::invalid_argument("bl_distance_estimate: atom counts differ");
  }
  if (disorder && disorder->size() != emp.atom_count) {
    throw std::invalid_argument("bl_distance_estimate: disorder law does not match the measure");
  }
  const auto sums = atom_sums(emp, kTestHarmonics);
  double best = 0.0;
  for (std::size_t k = 1; k <= kTestHarmonics; ++k) {
    fp::Mode emp_mix{};
    for (std::size_t b = 0; b < emp.atom_count; ++b) emp_mix += sums[b][k - 1];
    best = std::max(best, test_gap(emp_mix - density.mixture_mode(k), k));
    if (disorder && emp.atom_count > 1) {
      for (std::size_t b = 0; b < emp.atom_count; ++b) {
        const double lambda = std::min(1.0, disorder->separation(b));
        const fp::Mode diff = sums[b][k - 1] - density.weights[b] * density.mode(b, k);
        best = std::max(best, lambda * test_gap(diff, k));
      }
    }
  }
  return std::clamp(best, 0.0, 1.0);
}

UCurve coupling_error(std::span<const sde::CoupledTrajectory> runs) {
  if (runs.empty()) throw std::invalid_argument("coupling_error: no runs");
  const auto& ref = runs.front();
  for (const auto& run : runs) {
    if (run.times != ref.times || run.running_sup.size() != ref.running_sup.size() ||
        run.atom.size() != ref.atom.size()) {
      throw std::invalid_argument("coupling_error: runs differ in size or recorded times");
    }
  }
  UCurve curve;
  curve.times = ref.times;
  const std::size_t n = ref.atom.size();
  const double inv_runs = 1.0 / static_cast<double>(runs.size());
  for (std::size_t r = 0; r < ref.times.size(); ++r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mean = 0.0;
      for (const auto& run : runs) mean += run.running_sup[r][i];
      worst = std::max(worst, mean * inv_runs);
    }
    curve.u.push_back(worst);
  }
  return curve;
}

double BoundCurve::operator()(double t) const { return prefactor * std::expm1(C * t); }

BoundCurve bound_curve(const graphs::DegreeReport& stats, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("bound_curve: C must be positive");
  if (stats.n == 0) throw std::invalid_argument("bound_curve: empty degree report");
  return {stats.alpha / static_cast<double>(stats.n) + stats.b_n * stats.b_n, C};
}

}  // namespace mflab::metrics
