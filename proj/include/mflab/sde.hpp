#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mflab/fokker_planck.hpp"
#include "mflab/graphs.hpp"
#include "mflab/models.hpp"

namespace mflab::sde {

/// Unwrapped phases on the real line, the disorder atom of each particle,
/// and the clock.
struct EnsembleState {
  std::vector<double> theta;
  std::vector<std::uint32_t> atom;
  double t = 0.0;

  std::size_t size() const { return theta.size(); }
  friend bool operator==(const EnsembleState&, const EnsembleState&) = default;
};

struct SimConfig {
  double dt = 1e-2;
  double t_final = 1.0;
  std::uint64_t seed = 0;
  std::size_t record_every = 1;
  int workers = 0;  // 0: OpenMP default
};

/// Number of Euler steps, round(t_final / dt). Validates the config.
std::size_t step_count(const SimConfig& cfg);

/// IID draws from nu_0, deterministic in the seed.
EnsembleState sample_initial(const models::InitialLaw& law, std::size_t n, std::uint64_t seed);

struct Trajectory {
  std::vector<EnsembleState> snapshots;
};

/// Called with the step index and the state after that step (step 0 is the
/// initial state).
using Observer = std::function<void(std::size_t, const EnsembleState&)>;

/// Euler-Maruyama:
///   theta_i += [F(theta_i, w_i) + alpha_n/n sum_j xi_ij Gamma(...)] dt
///              + sigma sqrt(dt) N_i,s
/// with N_i,s keyed by (seed, step s, particle i). Advances `state` in place.
void integrate(const graphs::Graph& graph, const models::ModelSpec& model, EnsembleState& state,
               const SimConfig& cfg, const Observer& observer);

/// Snapshots at step 0, every record_every steps, and the final step.
Trajectory simulate(const graphs::Graph& graph, const models::ModelSpec& model,
                    const EnsembleState& init, const SimConfig& cfg);

/// Particle system and its nonlinear-diffusion copies driven by the same
/// Gaussian increments from the same initial condition.
struct CoupledTrajectory {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> theta_bar;
  /// running_sup[r][i] = sup_{s <= times[r]} |theta_i(s) - theta_bar_i(s)|^2
  std::vector<std::vector<double>> running_sup;
  std::vector<std::uint32_t> atom;

  /// max_i running_sup[r][i] per recorded time.
  std::vector<double> max_running_sup() const;
};

/// The nonlinear copies use p \int Gamma d nu_t with nu_t taken from
/// `limit` (first modes, linearly interpolated in time).
CoupledTrajectory simulate_coupled(const graphs::Graph& graph, const models::ModelSpec& model,
                                   const EnsembleState& init, const SimConfig& cfg,
                                   const fp::DensityTrajectory& limit, double p = 1.0);

}  // namespace mflab::sde
