#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mflab/metrics.hpp"
#include "mflab/sde.hpp"

using namespace mflab;

namespace {

constexpr double kPi = std::numbers::pi;

sde::EnsembleState pair_state(double a, double b) {
  sde::EnsembleState s;
  s.theta = {a, b};
  s.atom = {0, 0};
  return s;
}

fp::DensityTrajectory limit_for(const models::ModelSpec& model, const models::InitialLaw& law, double dt,
                                double t_final) {
  return fp::evolve_density(model, fp::initial_density(law, 16), 1.0, dt, t_final);
}

}  // namespace

TEST_CASE("step count and config validation") {
  CHECK(sde::step_count({0.01, 1.0}) == 100);
  CHECK(sde::step_count({0.1, 0.0}) == 0);
  CHECK_THROWS_AS(sde::step_count({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sde::step_count({0.1, -1.0}), std::invalid_argument);
  sde::SimConfig bad{0.1, 1.0};
  bad.record_every = 0;
  CHECK_THROWS_AS(sde::step_count(bad), std::invalid_argument);
}

TEST_CASE("initial sampling") {
  const auto point = sde::sample_initial({models::PointMass{1.25}, {}}, 50, 3);
  for (double t : point.theta) CHECK(t == 1.25);
  for (auto a : point.atom) CHECK(a == 0);
  const auto u = sde::sample_initial({}, 20000, 4);
  for (double t : u.theta) {
    CHECK(t >= 0.0);
    CHECK(t < 2.0 * kPi);
  }
  CHECK(metrics::order_parameter(u.theta).r < 5.0 / std::sqrt(20000.0));
  CHECK(sde::sample_initial({}, 100, 4) == sde::sample_initial({}, 100, 4));
  CHECK(!(sde::sample_initial({}, 100, 4) == sde::sample_initial({}, 100, 5)));

  const models::DisorderLaw law({{{-1.0, 1.0, 0.0}, 0.25}, {{1.0, 1.0, 0.0}, 0.75}});
  const auto mixed = sde::sample_initial({models::WrappedGaussian{0.5, 0.2}, law}, 40000, 6);
  double ones = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    ones += mixed.atom[i];
    mean += mixed.theta[i];
  }
  CHECK(std::abs(ones / 40000.0 - 0.75) < 5.0 * std::sqrt(0.75 * 0.25 / 40000.0));
  CHECK(std::abs(mean / 40000.0 - 0.5) < 5.0 * 0.2 / std::sqrt(40000.0));
  CHECK_THROWS_AS(sde::sample_initial({}, 0, 1), std::invalid_argument);
}

TEST_CASE("constant drift is integrated exactly") {
  const models::DisorderLaw law({{{0.7, 1.0, 0.0}, 1.0}});
  const auto model = models::make_kuramoto(0.0, law, 0.0);
  auto state = sde::sample_initial({models::PointMass{0.3}, law}, 5, 1);
  sde::SimConfig cfg{0.01, 2.0};
  sde::integrate(graphs::complete(5), model, state, cfg, {});
  for (double t : state.theta) CHECK(t == doctest::Approx(0.3 + 0.7 * 2.0).epsilon(1e-12));
  CHECK(state.t == doctest::Approx(2.0));
}

TEST_CASE("pure noise has variance sigma^2 t") {
  const auto model = models::make_kuramoto(0.0, models::DisorderLaw{}, 0.8);
  const std::size_t n = 20000;
  auto state = sde::sample_initial({models::PointMass{0.0}, {}}, n, 1);
  sde::integrate(graphs::complete(n), model, state, {0.05, 3.0, 11}, {});
  double m1 = 0.0, m2 = 0.0;
  for (double t : state.theta) {
    m1 += t;
    m2 += t * t;
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  const double var = 0.64 * 3.0;
  CHECK(std::abs(m1) < 5.0 * std::sqrt(var / n));
  CHECK(std::abs(m2 - var) < 5.0 * var * std::sqrt(2.0 / n));
}

TEST_CASE("two oscillators follow the phase-difference ODE") {
  // delta' = -K sin(delta) for the complete graph on 2 vertices, so
  // tan(delta / 2) = tan(delta_0 / 2) e^{-K t}.
  const double K = 1.0, d0 = 2.0, T = 5.0;
  const auto model = models::make_kuramoto(K, models::DisorderLaw{}, 0.0);
  const auto g = graphs::complete(2);
  auto run = [&](double dt) {
    auto s = pair_state(d0, 0.0);
    sde::integrate(g, model, s, {dt, T}, {});
    return s.theta[0] - s.theta[1];
  };
  const double exact = 2.0 * std::atan(std::tan(d0 / 2.0) * std::exp(-K * T));

  // Same scheme written out by hand.
  double a = d0, b = 0.0;
  for (int s = 0; s < 5000; ++s) {
    const double fa = -0.5 * K * std::sin(a - b);
    a += fa * 1e-3;
    b -= fa * 1e-3;
  }
  CHECK(run(1e-3) == doctest::Approx(a - b).epsilon(1e-12));

  const double e1 = std::abs(run(1e-3) - exact);
  const double e2 = std::abs(run(5e-4) - exact);
  CHECK(e1 < 1e-3);
  CHECK(e2 / e1 == doctest::Approx(0.5).epsilon(0.05));
  CHECK(std::abs(run(1e-4) - exact) < 1e-4);
}

TEST_CASE("Euler error halves with the step") {
  const auto model = models::make_active_rotator(0.6, 2.0, 0.0);
  const auto g = graphs::erdos_renyi(80, 0.5, false, 3);
  const auto init = sde::sample_initial({}, 80, 2);
  auto run = [&](double dt) {
    auto s = init;
    sde::integrate(g, model, s, {dt, 1.0}, {});
    return s.theta;
  };
  const auto fine = run(1e-5);
  auto err = [&](double dt) {
    const auto th = run(dt);
    double m = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) m = std::max(m, std::abs(th[i] - fine[i]));
    return m;
  };
  const double r = err(2e-3) / err(1e-3);
  CHECK(r > 1.8);
  CHECK(r < 2.2);
}

TEST_CASE("results do not depend on the thread count") {
  const auto model = models::make_kuramoto(2.0, models::DisorderLaw{});
  const auto init = sde::sample_initial({}, 400, 8);
  for (const auto& g : {graphs::complete(400), graphs::erdos_renyi(400, 0.3, true, 4)}) {
    sde::SimConfig cfg{0.01, 0.5, 21, 10, 1};
    const auto ref = sde::simulate(g, model, init, cfg);
    CHECK(ref.snapshots.size() == 6);
    for (int w : {2, 4, 7}) {
      cfg.workers = w;
      CHECK(sde::simulate(g, model, init, cfg).snapshots == ref.snapshots);
    }
  }
}

TEST_CASE("snapshots include the final step") {
  const auto model = models::make_kuramoto(1.0, models::DisorderLaw{});
  const auto init = sde::sample_initial({}, 10, 1);
  sde::SimConfig cfg{0.1, 1.05, 1, 3};
  const auto traj = sde::simulate(graphs::complete(10), model, init, cfg);
  // 11 steps: records at 0, 3, 6, 9 and 11.
  REQUIRE(traj.snapshots.size() == 5);
  CHECK(traj.snapshots.back().t == doctest::Approx(1.1));
}

TEST_CASE("strong coupling keeps a synchronized start together") {
  const auto model = models::make_kuramoto(4.0, models::DisorderLaw{});
  const auto g = graphs::complete(500);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto state = sde::sample_initial({models::PointMass{0.0}, {}}, 500, seed);
    double lowest = 1.0;
    sde::integrate(g, model, state, {0.01, 10.0, seed}, [&](std::size_t, const sde::EnsembleState& s) {
      lowest = std::min(lowest, metrics::order_parameter(s.theta).r);
    });
    CHECK(lowest > 0.8);
  }
}

TEST_CASE("state validation") {
  const auto model = models::make_kuramoto(1.0, models::DisorderLaw{});
  auto s = sde::sample_initial({}, 5, 1);
  CHECK_THROWS_AS(sde::integrate(graphs::complete(6), model, s, {}, {}), std::invalid_argument);
  s.theta[2] = NAN;
  CHECK_THROWS_AS(sde::integrate(graphs::complete(5), model, s, {}, {}), std::invalid_argument);
  s = sde::sample_initial({}, 5, 1);
  s.atom[0] = 3;
  CHECK_THROWS_AS(sde::integrate(graphs::complete(5), model, s, {}, {}), std::invalid_argument);
}

TEST_CASE("coupled construction") {
  const auto model = models::make_kuramoto(1.5, models::DisorderLaw{});
  const auto g = graphs::complete(100);
  const models::InitialLaw law{};
  const auto init = sde::sample_initial(law, 100, 2);
  const sde::SimConfig cfg{0.01, 1.0, 5, 10};
  const auto limit = limit_for(model, law, 0.01, 1.0);
  const auto run = sde::simulate_coupled(g, model, init, cfg, limit);
  REQUIRE(run.times.size() == 11);
  CHECK(run.max_running_sup()[0] == 0.0);
  CHECK(run.theta[0] == run.theta_bar[0]);
  for (std::size_t r = 1; r < run.times.size(); ++r) {
    for (std::size_t i = 0; i < 100; ++i) CHECK(run.running_sup[r][i] >= run.running_sup[r - 1][i]);
  }
  CHECK(run.max_running_sup().back() > 0.0);
  CHECK(run.max_running_sup().back() < 1.0);

  // The particle half is the plain Euler scheme with the same seed.
  auto plain = init;
  sde::integrate(g, model, plain, cfg, {});
  CHECK(run.theta.back() == plain.theta);

  const auto zero = models::make_kuramoto(0.0, models::DisorderLaw{});
  const auto none = sde::simulate_coupled(g, zero, init, cfg, limit_for(zero, law, 0.01, 1.0));
  CHECK(none.max_running_sup().back() < 1e-20);

  CHECK_THROWS_AS(sde::simulate_coupled(g, model, init, {0.01, 2.0}, limit), std::invalid_argument);
  CHECK_THROWS_AS(sde::simulate_coupled(g, model, init, {0.001, 1.0}, limit), std::invalid_argument);
  CHECK_THROWS_AS(sde::simulate_coupled(g, model, init, cfg, limit, 0.0), std::invalid_argument);
  const auto custom = models::make_custom(
      [](double t, const models::Disorder&, double s, const models::Disorder&) { return std::sin(s - t); }, 1.0,
      1.0, 0.0, models::DisorderLaw{});
  CHECK_THROWS_AS(sde::simulate_coupled(g, custom, init, cfg, limit), std::invalid_argument);
}
