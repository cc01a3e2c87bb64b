#include "mflab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "mflab/kernels.hpp"
#include "mflab/rng.hpp"
#include "parallel.hpp"

namespace mflab::sde {
namespace {

inline double increment(const rng::CounterRng& rng, std::size_t step, std::size_t i) {
  const auto [a, b] = rng.normal_pair(rng::Stream::noise, step, static_cast<std::uint32_t>(i / 2));
  return (i % 2 == 0) ? a : b;
}

void check_state(const graphs::Graph& graph, const models::ModelSpec& model, const EnsembleState& s) {
  if (s.theta.size() != graph.size() || s.atom.size() != graph.size()) {
    throw std::invalid_argument("simulate: initial state size does not match the graph");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.theta[i])) throw std::invalid_argument("simulate: non-finite phase");
    if (s.atom[i] >= model.disorder.size()) {
      throw std::invalid_argument("simulate: particle refers to a missing disorder atom");
    }
  }
}

}  // namespace

std::size_t step_count(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (!(cfg.t_final >= 0.0)) throw std::invalid_argument("simulate: t_final must be >= 0");
  if (cfg.record_every == 0) throw std::invalid_argument("simulate: record_every must be >= 1");
  return static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
}

EnsembleState sample_initial(const models::InitialLaw& law, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_initial: n must be >= 1");
  const rng::CounterRng rng(seed);
  EnsembleState state;
  state.theta.resize(n);
  state.atom.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    state.theta[i] = std::visit(
        [&](const auto& phase) -> double {
          using T = std::decay_t<decltype(phase)>;
          if constexpr (std::is_same_v<T, models::UniformPhase>) {
            return 2.0 * std::numbers::pi * rng.uniform(rng::Stream::initial_phase, i, 0);
          } else if constexpr (std::is_same_v<T, models::PointMass>) {
            return phase.at;
          } else {
            return phase.mean + phase.spread * rng.normal(rng::Stream::initial_phase, i, 1);
          }
        },
        law.phase);
    state.atom[i] = static_cast<std::uint32_t>(
        law.disorder.sample(rng.uniform(rng::Stream::initial_disorder, i, 0)));
  }
  return state;
}

void integrate(const graphs::Graph& graph, const models::ModelSpec& model, EnsembleState& state,
               const SimConfig& cfg, const Observer& observer) {
  const std::size_t steps = step_count(cfg);
  check_state(graph, model, state);
  const int threads = detail::thread_count(cfg.workers);
  const rng::CounterRng rng(cfg.seed);
  const double scale = graph.alpha() / static_cast<double>(graph.size());
  const double noise = model.sigma * std::sqrt(cfg.dt);
  const auto n = static_cast<std::int64_t>(state.size());
  const double t0 = state.t;
  std::vector<double> sums(state.size());

  if (observer) observer(0, state);
  for (std::size_t s = 0; s < steps; ++s) {
    kernels::interaction_sums(graph, model, state.theta, state.atom, sums, cfg.workers);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      const double th = state.theta[i];
      const double drift = model.drift(th, model.disorder[state.atom[i]]) + scale * sums[i];
      state.theta[i] = th + drift * cfg.dt + noise * increment(rng, s, static_cast<std::size_t>(i));
    }
    state.t = t0 + static_cast<double>(s + 1) * cfg.dt;
    if (observer) observer(s + 1, state);
  }
}

Trajectory simulate(const graphs::Graph& graph, const models::ModelSpec& model,
                    const EnsembleState& init, const SimConfig& cfg) {
  const std::size_t steps = step_count(cfg);
  Trajectory traj;
  EnsembleState state = init;
  integrate(graph, model, state, cfg, [&](std::size_t step, const EnsembleState& s) {
    if (step % cfg.record_every == 0 || step == steps) traj.snapshots.push_back(s);
  });
  return traj;
}

std::vector<double> CoupledTrajectory::max_running_sup() const {
  std::vector<double> out;
  out.reserve(running_sup.size());
  for (const auto& row : running_sup) {
    out.push_back(row.empty() ? 0.0 : *std::max_element(row.begin(), row.end()));
  }
  return out;
}

CoupledTrajectory simulate_coupled(const graphs::Graph& graph, const models::ModelSpec& model,
                                   const EnsembleState& init, const SimConfig& cfg,
                                   const fp::DensityTrajectory& limit, double p) {
  const std::size_t steps = step_count(cfg);
  check_state(graph, model, init);
  if (!model.trigonometric()) {
    throw std::invalid_argument("simulate_coupled: kernel outside the trigonometric family");
  }
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("simulate_coupled: p must lie in (0, 1]");
  if (limit.times.empty()) throw std::invalid_argument("simulate_coupled: empty limit trajectory");
  const double horizon = static_cast<double>(steps) * cfg.dt;
  if (limit.times.back() < init.t + horizon - 1e-9 * std::max(1.0, horizon)) {
    throw std::invalid_argument("simulate_coupled: limit trajectory too short");
  }
  for (std::size_t k = 1; k < limit.times.size(); ++k) {
    if (limit.times[k] - limit.times[k - 1] > cfg.dt * (1.0 + 1e-9)) {
      throw std::invalid_argument("simulate_coupled: limit trajectory is coarser than dt");
    }
  }
  if (!limit.states.empty() && limit.states.front().atoms() != model.disorder.size()) {
    throw std::invalid_argument("simulate_coupled: limit atoms do not match the disorder law");
  }

  const int threads = detail::thread_count(cfg.workers);
  const rng::CounterRng rng(cfg.seed);
  const double scale = graph.alpha() / static_cast<double>(graph.size());
  const double noise = model.sigma * std::sqrt(cfg.dt);
  const auto n = static_cast<std::int64_t>(init.size());

  CoupledTrajectory out;
  out.seed = cfg.seed;
  out.atom = init.atom;
  std::vector<double> theta = init.theta;
  std::vector<double> bar = init.theta;
  std::vector<double> sup(init.size(), 0.0);
  std::vector<double> sums(init.size());

  auto record = [&](double t) {
    out.times.push_back(t);
    out.theta.push_back(theta);
    out.theta_bar.push_back(bar);
    out.running_sup.push_back(sup);
  };
  record(init.t);

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = init.t + static_cast<double>(s) * cfg.dt;
    const auto first = limit.first_modes_at(t);
    fp::Mode z{};
    for (std::size_t b = 0; b < first.size(); ++b) {
      const auto& w = model.disorder[b];
      z += model.disorder.weight(b) * w.amplitude * first[b] * std::polar(1.0, -w.phase);
    }
    kernels::interaction_sums(graph, model, theta, init.atom, sums, cfg.workers);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& w = model.disorder[init.atom[i]];
      const double db = noise * increment(rng, s, static_cast<std::size_t>(i));
      const double th = theta[i];
      const double tb = bar[i];
      theta[i] = th + (model.drift(th, w) + scale * sums[i]) * cfg.dt + db;
      bar[i] = tb + fp::mean_field_drift(model, p, z, tb, w) * cfg.dt + db;
      const double gap = theta[i] - bar[i];
      sup[i] = std::max(sup[i], gap * gap);
    }
    if ((s + 1) % cfg.record_every == 0 || s + 1 == steps) {
      record(init.t + static_cast<double>(s + 1) * cfg.dt);
    }
  }
  return out;
}

}  // namespace mflab::sde
