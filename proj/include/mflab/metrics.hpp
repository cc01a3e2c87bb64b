#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mflab/fokker_planck.hpp"
#include "mflab/graphs.hpp"
#include "mflab/models.hpp"
#include "mflab/sde.hpp"

namespace mflab::metrics {

struct OrderParameter {
  double r = 0.0;
  double psi = 0.0;  // in (-pi, pi]
};

/// Modulus and argument of (1/n) sum_j e^{i theta_j}.
OrderParameter order_parameter(std::span<const double> theta);
OrderParameter order_parameter(const sde::EnsembleState& state,
                               std::optional<graphs::Block> subset = std::nullopt);

/// Uniform-weight point measure on (theta mod 2 pi, atom).
struct EmpiricalMeasure {
  std::vector<double> theta;
  std::vector<std::uint32_t> atom;
  std::size_t atom_count = 1;
};

EmpiricalMeasure empirical_measure(std::span<const double> theta,
                                   std::span<const std::uint32_t> atom, std::size_t atom_count);
EmpiricalMeasure empirical_measure(const sde::EnsembleState& state, std::size_t atom_count);

/// Per-atom empirical Fourier modes, weights = atom frequencies.
fp::FourierDensity empirical_modes(const EmpiricalMeasure& emp, std::size_t k_max);

inline constexpr std::size_t kTestHarmonics = 16;

/// Lower bound on the bounded-Lipschitz distance from a finite family of
/// [0,1]-valued 1-Lipschitz test functions:
///   (1 +- cos(k t)/k)/2 and (1 +- sin(k t)/k)/2, k = 1..16,
/// and, when `disorder` has several atoms, the same functions multiplied by
/// lambda_b 1{w = b} with lambda_b = min(1, separation of atom b) so the
/// product stays 1-Lipschitz for the sum metric on (theta, w).
double bl_distance_estimate(const EmpiricalMeasure& emp, const fp::FourierDensity& density,
                            const models::DisorderLaw* disorder = nullptr);

struct UCurve {
  std::vector<double> times;
  std::vector<double> u;
};

/// For each recorded time: max over particles of the seed-average of the
/// running sup of the squared coupling gap.
UCurve coupling_error(std::span<const sde::CoupledTrajectory> runs);

/// (alpha_n / n + b_n^2) (e^{C t} - 1).
struct BoundCurve {
  double prefactor = 0.0;
  double C = 0.0;
  double operator()(double t) const;
};

BoundCurve bound_curve(const graphs::DegreeReport& stats, double C);

}  // namespace mflab::metrics
