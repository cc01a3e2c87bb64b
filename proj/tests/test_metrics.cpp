#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mflab/metrics.hpp"
#include "mflab/stats.hpp"

using namespace mflab;

namespace {

constexpr double kPi = std::numbers::pi;

sde::CoupledTrajectory fake_run(std::vector<std::vector<double>> sup) {
  sde::CoupledTrajectory run;
  for (std::size_t r = 0; r < sup.size(); ++r) run.times.push_back(static_cast<double>(r));
  run.atom.assign(sup.front().size(), 0);
  run.running_sup = std::move(sup);
  return run;
}

}  // namespace

TEST_CASE("order parameter") {
  const std::vector<double> same(7, 1.3);
  auto op = metrics::order_parameter(same);
  CHECK(op.r == doctest::Approx(1.0));
  CHECK(op.psi == doctest::Approx(1.3));
  const std::vector<double> opposite{0.0, kPi};
  CHECK(metrics::order_parameter(opposite).r < 1e-15);
  std::vector<double> spread;
  for (int j = 0; j < 12; ++j) spread.push_back(2.0 * kPi * j / 12.0 + 0.4);
  CHECK(metrics::order_parameter(spread).r < 1e-14);
  const std::vector<double> wrapped{kPi, -kPi, 3.0 * kPi};
  CHECK(metrics::order_parameter(wrapped).psi == doctest::Approx(kPi));
  // Two equal halves at +-a: r = cos a.
  const std::vector<double> pair{0.6, -0.6};
  CHECK(metrics::order_parameter(pair).r == doctest::Approx(std::cos(0.6)).epsilon(1e-14));

  sde::EnsembleState s;
  s.theta = {0.0, 0.0, 1.0, 3.0};
  s.atom.assign(4, 0);
  CHECK(metrics::order_parameter(s, graphs::Block{0, 2}).r == doctest::Approx(1.0));
  CHECK(metrics::order_parameter(s, graphs::Block{2, 4}).r == doctest::Approx(std::cos(1.0)));
  CHECK_THROWS_AS(metrics::order_parameter(s, graphs::Block{3, 5}), std::invalid_argument);
  CHECK_THROWS_AS(metrics::order_parameter(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("empirical measure and modes") {
  const std::vector<double> theta{-0.5, 7.0, 2.0, 1.0};
  const std::vector<std::uint32_t> atom{0, 1, 1, 1};
  const auto emp = metrics::empirical_measure(theta, atom, 2);
  CHECK(emp.theta[0] == doctest::Approx(2.0 * kPi - 0.5));
  CHECK(emp.theta[1] == doctest::Approx(7.0 - 2.0 * kPi));
  const auto q = metrics::empirical_modes(emp, 3);
  CHECK(q.weights == std::vector<double>{0.25, 0.75});
  CHECK(std::abs(q.mode(0, 2) - std::polar(1.0, -1.0)) < 1e-14);
  CHECK(std::abs(q.mixture_mode(1) - (std::polar(1.0, -0.5) + std::polar(1.0, 7.0) + std::polar(1.0, 2.0) +
                                      std::polar(1.0, 1.0)) /
                                         4.0) < 1e-14);
  const std::vector<std::uint32_t> bad{0, 2, 1, 1};
  CHECK_THROWS_AS(metrics::empirical_measure(theta, bad, 2), std::invalid_argument);
}

TEST_CASE("bounded Lipschitz estimate") {
  const std::size_t n = 10000;
  const auto u = sde::sample_initial({}, n, 1);
  const auto flat = fp::initial_density({}, 32);
  CHECK(metrics::bl_distance_estimate(metrics::empirical_measure(u, 1), flat) < 0.05);

  // Point masses at 0 and 0.1: the k = 1 sine test gives sin(0.1) / 2.
  const std::vector<double> zero{0.0};
  const std::vector<std::uint32_t> one{0};
  const auto at = fp::initial_density({models::PointMass{0.1}, {}}, 32);
  const double d = metrics::bl_distance_estimate(metrics::empirical_measure(zero, one, 1), at);
  CHECK(d >= 0.045);
  CHECK(d <= 0.1);
  CHECK(d == doctest::Approx(std::sin(0.1) / 2.0).epsilon(1e-12));

  const auto self = fp::initial_density({models::PointMass{0.0}, {}}, 32);
  CHECK(metrics::bl_distance_estimate(metrics::empirical_measure(zero, one, 1), self) < 1e-15);

  // Far-apart point masses stay inside [0, 1].
  const auto far = fp::initial_density({models::PointMass{kPi}, {}}, 32);
  const double f = metrics::bl_distance_estimate(metrics::empirical_measure(zero, one, 1), far);
  CHECK(f > 0.0);
  CHECK(f <= 1.0);
}

TEST_CASE("disorder-aware estimate sees misplaced atoms") {
  const models::DisorderLaw law({{{-1.0, 1.0, 0.0}, 0.5}, {{1.0, 1.0, 0.0}, 0.5}});
  // Phases 0 for atom 0 and pi for atom 1 vs the reverse: same phase marginal.
  const std::vector<double> theta{0.0, kPi};
  const std::vector<std::uint32_t> atom{0, 1};
  const auto emp = metrics::empirical_measure(theta, atom, 2);
  auto density = fp::FourierDensity::uniform(16, {0.5, 0.5});
  for (std::size_t k = 1; k <= 16; ++k) {
    density.modes[0][k - 1] = std::polar(1.0, kPi * static_cast<double>(k));
    density.modes[1][k - 1] = 1.0;
  }
  CHECK(metrics::bl_distance_estimate(emp, density) < 1e-12);
  CHECK(metrics::bl_distance_estimate(emp, density, &law) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(metrics::bl_distance_estimate(emp, fp::initial_density({}, 16)), std::invalid_argument);
}

TEST_CASE("coupling error curve") {
  const std::vector<sde::CoupledTrajectory> runs{fake_run({{0, 0, 0}, {1, 2, 0}, {1, 4, 3}}),
                                                 fake_run({{0, 0, 0}, {3, 0, 0}, {5, 0, 3}})};
  const auto u = metrics::coupling_error(runs);
  CHECK(u.times == std::vector<double>{0, 1, 2});
  CHECK(u.u == std::vector<double>{0.0, 2.0, 3.0});
  CHECK_THROWS_AS(metrics::coupling_error({}), std::invalid_argument);
  const std::vector<sde::CoupledTrajectory> mismatched{fake_run({{0}}), fake_run({{0}, {1}})};
  CHECK_THROWS_AS(metrics::coupling_error(mismatched), std::invalid_argument);
}

TEST_CASE("bound curve") {
  const auto complete = graphs::degree_stats(graphs::complete(100), 1.0);
  const auto b = metrics::bound_curve(complete, 12.0);
  CHECK(b.prefactor == doctest::Approx(0.01));
  CHECK(b(0.0) == 0.0);
  CHECK(b(1.0) == doctest::Approx(0.01 * (std::exp(12.0) - 1.0)));

  graphs::DegreeReport r;
  r.n = 50;
  r.alpha = 2.0;
  r.b_n = 0.1;
  CHECK(metrics::bound_curve(r, 1.0).prefactor == doctest::Approx(2.0 / 50.0 + 0.01));
  CHECK_THROWS_AS(metrics::bound_curve(r, 0.0), std::invalid_argument);
}

TEST_CASE("uniformity tests") {
  std::vector<double> even;
  for (int j = 0; j < 200; ++j) even.push_back((j + 0.5) / 200.0);
  CHECK(stats::kuiper_uniform(even).passes());
  CHECK(stats::ks_uniform(even).passes());
  CHECK(stats::ks_uniform(even).statistic == doctest::Approx(0.0025 * (std::sqrt(200.0) + 0.12 + 0.11 / std::sqrt(200.0))));
  std::vector<double> bunched;
  for (int j = 0; j < 200; ++j) bunched.push_back(0.3 + 0.2 * j / 200.0);
  CHECK(!stats::kuiper_uniform(bunched).passes());
  CHECK(!stats::ks_uniform(bunched).passes());
  const auto draws = sde::sample_initial({}, 500, 9);
  std::vector<double> scaled;
  for (double t : draws.theta) scaled.push_back(t / (2.0 * kPi));
  CHECK(stats::kuiper_uniform(scaled).passes());
  CHECK(stats::ks_uniform(scaled).passes());
  CHECK(stats::median({3.0, 1.0, 2.0, 10.0}) == 2.5);
}

TEST_CASE("phase modality") {
  const auto flat = sde::sample_initial({}, 5000, 2);
  const auto one = sde::sample_initial({models::WrappedGaussian{1.0, 0.4}, {}}, 5000, 2);
  auto two = one;
  for (std::size_t i = 0; i < two.size(); i += 2) two.theta[i] += kPi;
  CHECK(stats::phase_modality(one.theta) == 1);
  CHECK(stats::phase_modality(two.theta) == 2);
  CHECK(stats::phase_modality(flat.theta) > 1);
}
