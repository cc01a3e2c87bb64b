#include "mflab/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "mflab/rng.hpp"

namespace mflab::fp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Mode kI{0.0, 1.0};

void check_supported(const models::ModelSpec& model) {
  if (!model.trigonometric()) {
    throw std::invalid_argument("density solver: kernel outside the trigonometric family");
  }
}

// Trapezoid rule on a uniform periodic grid: spectrally accurate here.
template <class F>
double periodic_integral(F&& f) {
  const double h = kTwoPi / static_cast<double>(kQuadraturePoints);
  double sum = 0.0;
  for (std::size_t j = 0; j < kQuadraturePoints; ++j) sum += f(h * static_cast<double>(j));
  return sum * h;
}

// Coupling part of dm/dt (everything except the diagonal -sigma^2 k^2/2 + i k eta).
void coupling_terms(const models::ModelSpec& model, double p,
                    const std::vector<std::vector<Mode>>& m, const std::vector<double>& weights,
                    std::vector<std::vector<Mode>>& out) {
  Mode z{0.0, 0.0};
  for (std::size_t b = 0; b < m.size(); ++b) {
    const auto& w = model.disorder[b];
    z += weights[b] * w.amplitude * m[b][0] * std::polar(1.0, -w.phase);
  }
  const double K = model.kernel.coupling;
  for (std::size_t b = 0; b < m.size(); ++b) {
    const auto& w = model.disorder[b];
    const Mode g = kI * (model.drift_sine / 2.0) +
                   kI * (p * K * w.amplitude / 2.0) * std::polar(1.0, -(w.phase + model.kernel.delta)) *
                       std::conj(z);
    const auto& mb = m[b];
    const std::size_t k_max = mb.size();
    for (std::size_t k = 1; k <= k_max; ++k) {
      const Mode up = k < k_max ? mb[k] : Mode{};
      const Mode down = k == 1 ? Mode{1.0, 0.0} : mb[k - 2];
      out[b][k - 1] = kI * static_cast<double>(k) * (g * up + std::conj(g) * down);
    }
  }
}

Mode diagonal_rate(const models::ModelSpec& model, std::size_t atom, std::size_t k) {
  const double kk = static_cast<double>(k);
  return {-0.5 * model.sigma * model.sigma * kk * kk, kk * model.disorder[atom].eta};
}

}  // namespace

FourierDensity FourierDensity::uniform(std::size_t k_max, std::vector<double> weights) {
  FourierDensity q;
  q.k_max = k_max;
  q.modes.assign(weights.size(), std::vector<Mode>(k_max, Mode{}));
  q.weights = std::move(weights);
  return q;
}

Mode FourierDensity::mode(std::size_t atom, std::size_t k) const {
  if (k == 0) return {1.0, 0.0};
  if (k > k_max) return {};
  return modes[atom][k - 1];
}

Mode FourierDensity::mixture_mode(std::size_t k) const {
  Mode sum{};
  for (std::size_t b = 0; b < atoms(); ++b) sum += weights[b] * mode(b, k);
  return sum;
}

double FourierDensity::density(std::size_t atom, double theta) const {
  double sum = 1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    sum += 2.0 * (modes[atom][k - 1] * std::polar(1.0, -static_cast<double>(k) * theta)).real();
  }
  return sum / kTwoPi;
}

FourierDensity initial_density(const models::InitialLaw& law, std::size_t k_max) {
  std::vector<double> weights;
  for (const auto& atom : law.disorder.atoms()) weights.push_back(atom.weight);
  FourierDensity q = FourierDensity::uniform(k_max, std::move(weights));
  std::vector<Mode> phase_modes(k_max);
  std::visit(
      [&](const auto& phase) {
        using T = std::decay_t<decltype(phase)>;
        for (std::size_t k = 1; k <= k_max; ++k) {
          const double kk = static_cast<double>(k);
          if constexpr (std::is_same_v<T, models::UniformPhase>) {
            phase_modes[k - 1] = {};
          } else if constexpr (std::is_same_v<T, models::PointMass>) {
            phase_modes[k - 1] = std::polar(1.0, kk * phase.at);
          } else {
            phase_modes[k - 1] =
                std::polar(std::exp(-0.5 * kk * kk * phase.spread * phase.spread), kk * phase.mean);
          }
        }
      },
      law.phase);
  for (auto& block : q.modes) block = phase_modes;
  return q;
}

Mode interaction_order(const models::ModelSpec& model, const FourierDensity& q) {
  if (q.atoms() != model.disorder.size()) {
    throw std::invalid_argument("density: atom count does not match the disorder law");
  }
  Mode z{};
  for (std::size_t b = 0; b < q.atoms(); ++b) {
    const auto& w = model.disorder[b];
    z += q.weights[b] * w.amplitude * q.mode(b, 1) * std::polar(1.0, -w.phase);
  }
  return z;
}

double mean_field_drift(const models::ModelSpec& model, double p, Mode z, double theta,
                        const models::Disorder& w) {
  const double x = theta - w.phase - model.kernel.delta;
  return model.drift(theta, w) -
         p * w.amplitude * model.kernel.coupling * (std::sin(x) * z.real() - std::cos(x) * z.imag());
}

FourierDensity rate_of_change(const models::ModelSpec& model, const FourierDensity& q, double p) {
  check_supported(model);
  if (q.atoms() != model.disorder.size()) {
    throw std::invalid_argument("density: atom count does not match the disorder law");
  }
  FourierDensity out = FourierDensity::uniform(q.k_max, q.weights);
  coupling_terms(model, p, q.modes, q.weights, out.modes);
  for (std::size_t b = 0; b < q.atoms(); ++b) {
    for (std::size_t k = 1; k <= q.k_max; ++k) {
      out.modes[b][k - 1] += diagonal_rate(model, b, k) * q.modes[b][k - 1];
    }
  }
  return out;
}

std::vector<Mode> DensityTrajectory::first_modes_at(double t) const {
  if (times.empty()) throw std::invalid_argument("density trajectory is empty");
  const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw std::out_of_range("density trajectory does not cover the requested time");
  }
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (hi >= times.size()) hi = times.size() - 1;
  const std::size_t lo = hi == 0 ? 0 : hi - 1;
  const double span = times[hi] - times[lo];
  const double frac = span > 0.0 ? std::clamp((t - times[lo]) / span, 0.0, 1.0) : 0.0;
  std::vector<Mode> out(states[lo].atoms());
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = (1.0 - frac) * states[lo].mode(b, 1) + frac * states[hi].mode(b, 1);
  }
  return out;
}

DensityTrajectory evolve_density(const models::ModelSpec& model, const FourierDensity& q0, double p,
                                 double dt, double t_final, std::size_t record_every) {
  check_supported(model);
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_density: dt must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("evolve_density: t_final must be >= 0");
  if (q0.k_max < 4) throw std::invalid_argument("evolve_density: k_max must be >= 4");
  if (q0.atoms() != model.disorder.size()) {
    throw std::invalid_argument("evolve_density: atom count does not match the disorder law");
  }
  if (record_every == 0) throw std::invalid_argument("evolve_density: record_every must be >= 1");

  const std::size_t atoms = q0.atoms();
  const std::size_t k_max = q0.k_max;
  const auto steps = static_cast<std::size_t>(std::llround(t_final / dt));

  const double bound = std::abs(model.drift_sine) +
                       p * model.kernel.coupling * std::pow(model.disorder.max_amplitude(), 2);
  const auto substeps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(dt * static_cast<double>(k_max) * bound / 2.0)));
  const double h = dt / static_cast<double>(substeps);

  std::vector<std::vector<Mode>> half(atoms, std::vector<Mode>(k_max));
  std::vector<std::vector<Mode>> full(atoms, std::vector<Mode>(k_max));
  for (std::size_t b = 0; b < atoms; ++b) {
    for (std::size_t k = 1; k <= k_max; ++k) {
      const Mode l = diagonal_rate(model, b, k);
      half[b][k - 1] = std::exp(l * (h / 2.0));
      full[b][k - 1] = std::exp(l * h);
    }
  }

  DensityTrajectory traj;
  auto record = [&](double t, const std::vector<std::vector<Mode>>& m) {
    FourierDensity q = FourierDensity::uniform(k_max, q0.weights);
    q.modes = m;
    traj.times.push_back(t);
    traj.states.push_back(std::move(q));
  };

  std::vector<std::vector<Mode>> u = q0.modes;
  auto zeros = [&] { return std::vector<std::vector<Mode>>(atoms, std::vector<Mode>(k_max)); };
  auto k1 = zeros(), k2 = zeros(), k3 = zeros(), k4 = zeros(), stage = zeros();
  record(0.0, u);

  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t sub = 0; sub < substeps; ++sub) {
      coupling_terms(model, p, u, q0.weights, k1);
      for (std::size_t b = 0; b < atoms; ++b)
        for (std::size_t k = 0; k < k_max; ++k)
          stage[b][k] = half[b][k] * (u[b][k] + (h / 2.0) * k1[b][k]);
      coupling_terms(model, p, stage, q0.weights, k2);
      for (std::size_t b = 0; b < atoms; ++b)
        for (std::size_t k = 0; k < k_max; ++k)
          stage[b][k] = half[b][k] * u[b][k] + (h / 2.0) * k2[b][k];
      coupling_terms(model, p, stage, q0.weights, k3);
      for (std::size_t b = 0; b < atoms; ++b)
        for (std::size_t k = 0; k < k_max; ++k)
          stage[b][k] = full[b][k] * u[b][k] + h * half[b][k] * k3[b][k];
      coupling_terms(model, p, stage, q0.weights, k4);
      for (std::size_t b = 0; b < atoms; ++b) {
        for (std::size_t k = 0; k < k_max; ++k) {
          u[b][k] = full[b][k] * u[b][k] +
                    (h / 6.0) * (full[b][k] * k1[b][k] + 2.0 * half[b][k] * (k2[b][k] + k3[b][k]) +
                                 k4[b][k]);
        }
      }
    }
    for (std::size_t b = 0; b < atoms; ++b) {
      if (std::abs(u[b][k_max - 1]) > 1e-8) traj.tail_warning = true;
    }
    if (step % record_every == 0 || step == steps) record(static_cast<double>(step) * dt, u);
  }
  return traj;
}

double StationaryProfile::density(double theta) const {
  return std::exp(kappa() * std::cos(theta - psi)) / Z;
}

FourierDensity StationaryProfile::modes(std::size_t k_max) const {
  FourierDensity q = FourierDensity::uniform(k_max, {1.0});
  const double kap = kappa();
  const double scaled_z = periodic_integral([&](double t) { return std::exp(kap * (std::cos(t) - 1.0)); });
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double moment = periodic_integral(
        [&](double t) { return std::cos(kk * t) * std::exp(kap * (std::cos(t) - 1.0)); });
    q.modes[0][k - 1] = std::polar(moment / scaled_z, kk * psi);
  }
  return q;
}

StationaryProfile stationary_profile(double K, double sigma, double r, double psi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("stationary_profile: sigma must be positive");
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("stationary_profile: r must lie in [0, 1)");
  if (!(K >= 0.0)) throw std::invalid_argument("stationary_profile: K must be >= 0");
  StationaryProfile profile{r, psi, K, sigma, 0.0};
  const double kap = profile.kappa();
  profile.Z = periodic_integral([&](double t) { return std::exp(kap * std::cos(t)); });
  return profile;
}

double self_consistency_map(double K, double r, double sigma) {
  const double kap = K * r / (sigma * sigma);
  const double num = periodic_integral([&](double t) { return std::cos(t) * std::exp(kap * (std::cos(t) - 1.0)); });
  const double den = periodic_integral([&](double t) { return std::exp(kap * (std::cos(t) - 1.0)); });
  return num / den;
}

std::vector<double> solve_r_fixed_point(double K, double sigma) {
  if (!(K >= 0.0)) throw std::invalid_argument("solve_r_fixed_point: K must be >= 0");
  if (!(sigma > 0.0)) throw std::invalid_argument("solve_r_fixed_point: sigma must be positive");
  std::vector<double> roots{0.0};
  auto gap = [&](double r) { return self_consistency_map(K, r, sigma) - r; };
  constexpr int kGrid = 1000;
  double prev_r = 1.0 / kGrid;
  double prev_g = gap(prev_r);
  for (int j = 2; j < kGrid; ++j) {
    const double r = static_cast<double>(j) / kGrid;
    const double g = gap(r);
    if (prev_g == 0.0) {
      roots.push_back(prev_r);
    } else if ((prev_g > 0.0) != (g > 0.0) && g != 0.0) {
      double lo = prev_r;
      double hi = r;
      double g_lo = prev_g;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = gap(mid);
        if (g_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
          lo = mid;
          g_lo = g_mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_r = r;
    prev_g = g;
  }
  return roots;
}

std::vector<double> linear_rates(double K, double sigma, std::size_t k_max) {
  std::vector<double> rates(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    rates[k - 1] = k == 1 ? (K - 2.0 * sigma * sigma) / 4.0 : -0.5 * sigma * sigma * kk * kk;
  }
  return rates;
}

LinearizedPath simulate_linearized(const LinearizedConfig& cfg) {
  if (cfg.N == 0) throw std::invalid_argument("simulate_linearized: N must be >= 1");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate_linearized: dt must be positive");
  const double lambda = (cfg.K - 2.0) / 4.0;
  const double base_var = 1.0 / (2.0 * static_cast<double>(cfg.N));
  const auto steps = static_cast<std::size_t>(std::llround(cfg.t_final / cfg.dt));
  const double decay = std::exp(lambda * cfg.dt);
  const double growth_var = std::abs(lambda) > 1e-14
                                ? std::expm1(2.0 * lambda * cfg.dt) / (2.0 * lambda)
                                : cfg.dt;
  const double step_sd = cfg.noise_scale * std::sqrt(base_var * growth_var);

  const rng::CounterRng rng(cfg.seed);
  LinearizedPath path;
  path.times.reserve(steps + 1);
  auto [z0c, z0s] = rng.normal_pair(rng::Stream::linearized, 0, 0);
  double xc = cfg.initial_scale * std::sqrt(base_var) * z0c;
  double xs = cfg.initial_scale * std::sqrt(base_var) * z0s;
  auto push = [&](double t) {
    path.times.push_back(t);
    path.x_cos.push_back(xc);
    path.x_sin.push_back(xs);
    path.r.push_back(std::hypot(xc, xs));
  };
  push(0.0);
  for (std::size_t s = 1; s <= steps; ++s) {
    auto [zc, zs] = rng.normal_pair(rng::Stream::linearized, s, 0);
    xc = decay * xc + step_sd * zc;
    xs = decay * xs + step_sd * zs;
    push(static_cast<double>(s) * cfg.dt);
  }
  return path;
}

double predicted_r_squared(std::size_t N, double K, double t) {
  const double lambda = (K - 2.0) / 4.0;
  if (std::abs(lambda) < 1e-14) throw std::invalid_argument("predicted_r_squared: K = 2 is excluded");
  if (N == 0) throw std::invalid_argument("predicted_r_squared: N must be >= 1");
  return std::exp(2.0 * lambda * t) / static_cast<double>(N) *
         (1.0 + (1.0 - std::exp(-2.0 * lambda * t)) / (2.0 * lambda));
}

}  // namespace mflab::fp
