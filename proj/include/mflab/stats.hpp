#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mflab::stats {

double median(std::vector<double> values);
double mean(std::span<const double> values);

struct UniformityTest {
  double statistic = 0.0;  // scaled statistic compared against the critical value
  double critical = 0.0;   // 5% level
  bool passes() const { return statistic < critical; }
};

/// Kuiper's V for circular data mapped to [0, 1), Stephens' finite-n scaling.
UniformityTest kuiper_uniform(std::vector<double> unit_samples);

/// Kolmogorov-Smirnov D for samples on [0, 1), Stephens' finite-n scaling.
UniformityTest ks_uniform(std::vector<double> unit_samples);

/// Histogram of phases (any real values, wrapped) on `bins` equal arcs,
/// normalized to a probability density on [0, 2 pi).
std::vector<double> circular_histogram(std::span<const double> theta, std::size_t bins = 64);

/// Circular Gaussian smoothing with standard deviation `width` bins.
std::vector<double> smooth_circular(std::span<const double> histogram, double width = 3.0);

/// Local maxima of a circular profile that reach `floor_fraction` of its peak.
/// Plateaus count once.
std::size_t count_modes(std::span<const double> profile, double floor_fraction = 0.2);

/// Smoothed 64-bin histogram modality; 1 means unimodal.
std::size_t phase_modality(std::span<const double> theta);

}  // namespace mflab::stats
