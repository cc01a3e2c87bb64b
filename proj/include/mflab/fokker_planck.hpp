#pragma once

// Fourier-Galerkin solver for the mean-field Fokker-Planck equation on the
// circle, with one Fourier block per disorder atom.
//
// Coefficients are stored as m_k = c_k + i s_k = \int q(theta) e^{ik theta}.
// The zero mode m_0 = 1 is implicit. For the single-harmonic kernel family
// the interaction integral only needs the weighted first modes
//     Z = sum_b w_b A_b m_1^b e^{-i alpha_b},
// and each mode obeys
//     dm_k/dt = (-sigma^2 k^2 / 2 + i k eta) m_k + i k (G m_{k+1} + conj(G) m_{k-1}),
//     G = i a / 2 + (i p K A / 2) e^{-i(alpha + delta)} conj(Z),
// truncated with m_{k_max + 1} = 0.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mflab/models.hpp"

namespace mflab::fp {

using Mode = std::complex<double>;

struct FourierDensity {
  std::size_t k_max = 0;
  std::vector<double> weights;          // per atom
  std::vector<std::vector<Mode>> modes;  // modes[atom][k - 1], k = 1..k_max

  static FourierDensity uniform(std::size_t k_max, std::vector<double> weights);

  std::size_t atoms() const { return weights.size(); }
  /// m_k for k >= 0 (m_0 = 1, zero beyond k_max).
  Mode mode(std::size_t atom, std::size_t k) const;
  double c(std::size_t atom, std::size_t k) const { return mode(atom, k).real(); }
  double s(std::size_t atom, std::size_t k) const { return mode(atom, k).imag(); }
  /// sum_b w_b m_k^b, the k-th mode of the phase marginal.
  Mode mixture_mode(std::size_t k) const;
  /// Truncated Fourier series of the phase density of one atom.
  double density(std::size_t atom, double theta) const;
};

/// Fourier modes of nu_0 truncated at k_max.
FourierDensity initial_density(const models::InitialLaw& law, std::size_t k_max);

/// Z = sum_b w_b A_b m_1^b e^{-i alpha_b}.
Mode interaction_order(const models::ModelSpec& model, const FourierDensity& q);

/// Drift of the nonlinear diffusion for one particle:
/// F(theta, w) + p \int Gamma(theta, w, .) d nu, given Z of nu.
double mean_field_drift(const models::ModelSpec& model, double p, Mode z, double theta,
                        const models::Disorder& w);

/// dm_k/dt for every atom and mode (same shape as q).
FourierDensity rate_of_change(const models::ModelSpec& model, const FourierDensity& q, double p);

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<FourierDensity> states;
  /// Set when |m_{k_max}| exceeded 1e-8 for some atom at some time.
  bool tail_warning = false;

  /// First modes of every atom at time t, linearly interpolated.
  std::vector<Mode> first_modes_at(double t) const;
};

/// Integrating-factor RK4: the diagonal part (diffusion and constant
/// frequency) is integrated exactly, the coupling terms with classical RK4.
/// Steps are subdivided internally when the coupling bound demands it.
DensityTrajectory evolve_density(const models::ModelSpec& model, const FourierDensity& q0, double p,
                                 double dt, double t_final, std::size_t record_every = 1);

// Stationary family of the non-disordered equation with interaction
// J = -(K/2) sin and noise sigma: q(theta) = exp(kappa cos(theta - psi)) / Z,
// kappa = K r / sigma^2.

struct StationaryProfile {
  double r = 0.0;
  double psi = 0.0;
  double K = 0.0;
  double sigma = 1.0;
  double Z = 0.0;

  double kappa() const { return K * r / (sigma * sigma); }
  double density(double theta) const;
  FourierDensity modes(std::size_t k_max) const;
};

inline constexpr std::size_t kQuadraturePoints = 4096;

StationaryProfile stationary_profile(double K, double sigma, double r, double psi);

/// Psi_K(r) = \int cos(t) e^{kappa cos t} dt / \int e^{kappa cos t} dt.
double self_consistency_map(double K, double r, double sigma = 1.0);

/// Roots of Psi_K(r) = r in [0, 1): always 0, plus the positive root when
/// K > 2 sigma^2. Grid search at 1e-3 followed by bisection.
std::vector<double> solve_r_fixed_point(double K, double sigma = 1.0);

/// lambda_1 = (K - 2 sigma^2) / 4, lambda_k = -sigma^2 k^2 / 2 (k >= 2);
/// entry k - 1 holds lambda_k.
std::vector<double> linear_rates(double K, double sigma, std::size_t k_max);

struct LinearizedConfig {
  std::size_t N = 1000;
  double K = 4.0;
  double t_final = 6.0;
  double dt = 0.05;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;    // multiplies the 1/sqrt(2N) noise
  double initial_scale = 1.0;  // multiplies the N(0, 1/(2N)) initial spread
};

struct LinearizedPath {
  std::vector<double> times;
  std::vector<double> x_cos;
  std::vector<double> x_sin;
  std::vector<double> r;
};

/// Two independent copies of dx = lambda_1 x dt + dB / sqrt(2N), sampled
/// with exact Gaussian transitions.
LinearizedPath simulate_linearized(const LinearizedConfig& cfg);

/// (1/N) e^{2 l t} (1 + (1 - e^{-2 l t}) / (2 l)), l = (K - 2) / 4.
double predicted_r_squared(std::size_t N, double K, double t);

}  // namespace mflab::fp
