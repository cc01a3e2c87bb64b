#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mflab/models.hpp"

using namespace mflab::models;

namespace {

constexpr double kPi = std::numbers::pi;

DisorderLaw two_atoms() { return DisorderLaw({{{-1.0, 1.0, 0.0}, 0.5}, {{1.0, 1.0, 0.0}, 0.5}}); }

DisorderLaw amplitude_atoms() {
  return DisorderLaw({{{0.2, 0.5, 0.3}, 0.25}, {{-0.4, 1.5, -1.1}, 0.75}});
}

// Randomized checks of the declared bounds on a model.
void check_declared_constants(const ModelSpec& m, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> angle(-4.0 * kPi, 4.0 * kPi);
  std::uniform_int_distribution<std::size_t> pick(0, m.disorder.size() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto& w = m.disorder[pick(gen)];
    const auto& v = m.disorder[pick(gen)];
    const double t1 = angle(gen), t2 = angle(gen), s = angle(gen);
    const double g1 = m.interaction(t1, w, s, v);
    CHECK(std::abs(g1) <= m.sup_kernel + 1e-12);
    CHECK(std::abs(g1 - m.interaction(t2, w, s, v)) <= m.lip_kernel * std::abs(t1 - t2) + 1e-12);
    CHECK(std::abs(m.interaction(s, v, t1, w) - m.interaction(s, v, t2, w)) <=
          m.lip_kernel * std::abs(t1 - t2) + 1e-12);
    CHECK(std::abs(m.drift(t1, w) - m.drift(t2, w)) <= m.lip_drift * std::abs(t1 - t2) + 1e-12);
    // 2 pi periodicity in both phase arguments.
    CHECK(m.interaction(t1 + 2.0 * kPi, w, s, v) == doctest::Approx(g1).epsilon(1e-12));
    CHECK(m.interaction(t1, w, s - 2.0 * kPi, v) == doctest::Approx(g1).epsilon(1e-12));
    CHECK(m.drift(t1 + 2.0 * kPi, w) == doctest::Approx(m.drift(t1, w)).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("disorder law validation") {
  CHECK_THROWS_AS(DisorderLaw(std::vector<Atom>{}), std::invalid_argument);
  CHECK_THROWS_AS(DisorderLaw({{{0.0, 1.0, 0.0}, 0.6}, {{1.0, 1.0, 0.0}, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(DisorderLaw({{{0.0, 1.0, 0.0}, 1.2}, {{1.0, 1.0, 0.0}, -0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(DisorderLaw({{{INFINITY, 1.0, 0.0}, 1.0}}), std::invalid_argument);
  const auto law = two_atoms();
  CHECK(law.sample(0.0) == 0);
  CHECK(law.sample(0.49) == 0);
  CHECK(law.sample(0.51) == 1);
  CHECK(law.sample(0.999999) == 1);
  CHECK(law.separation(0) == doctest::Approx(2.0));
  CHECK(std::isinf(DisorderLaw{}.separation(0)));
}

TEST_CASE("Kuramoto model") {
  const auto zero = make_kuramoto(0.0, DisorderLaw{});
  for (double t : {0.0, 1.0, -2.5}) CHECK(zero.interaction(t, {}, 0.3, {}) == 0.0);
  const auto k4 = make_kuramoto(4.0, DisorderLaw{});
  CHECK(k4.sup_kernel == 4.0);
  CHECK(k4.lip_kernel == 4.0);
  CHECK(k4.lip_drift == 0.0);
  const auto k1 = make_kuramoto(1.0, two_atoms());
  for (double t : {0.0, 0.7, 3.0, -9.0}) CHECK(k1.drift(t, k1.disorder[0]) == -1.0);
  CHECK(k1.interaction(0.5, {}, 0.2, {}) == doctest::Approx(-std::sin(0.3)));
  CHECK_THROWS_AS(make_kuramoto(-1.0, DisorderLaw{}), std::invalid_argument);
  CHECK_THROWS_AS(make_kuramoto(1.0, amplitude_atoms()), std::invalid_argument);
  check_declared_constants(k1, 1);
}

TEST_CASE("active rotator") {
  const auto a0 = make_active_rotator(0.0, 1.0);
  for (double t : {0.0, 1.0, 2.0}) CHECK(a0.drift(t, a0.disorder[0]) == 1.0);
  const auto a1 = make_active_rotator(1.0, 2.0);
  CHECK(a1.lip_drift == 1.0);
  CHECK(a1.lip_kernel == 2.0);
  for (double a : {-2.0, 0.5, 1.0}) {
    const auto m = make_active_rotator(a, 1.0);
    CHECK(m.drift(kPi / 2.0, m.disorder[0]) == doctest::Approx(1.0 - a));
    CHECK(m.sup_drift == 1.0 + std::abs(a));
    check_declared_constants(m, 2);
  }
  CHECK_THROWS_AS(make_active_rotator(1.0, -0.5), std::invalid_argument);
}

TEST_CASE("generalized Kuramoto") {
  const auto law = two_atoms();
  const auto gen = make_generalized_kuramoto(2.5, 0.0, law);
  const auto kur = make_kuramoto(2.5, law);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = angle(rng), b = angle(rng);
    const auto& w = law[static_cast<std::size_t>(i % 2)];
    const auto& v = law[static_cast<std::size_t>((i / 2) % 2)];
    CHECK(gen.interaction(a, w, b, v) == kur.interaction(a, w, b, v));
    CHECK(gen.drift(a, w) == kur.drift(a, w));
  }
  const auto shifted = make_generalized_kuramoto(3.0, kPi / 2.0, DisorderLaw{});
  CHECK(shifted.interaction(0.4, {}, 0.4, {}) == doctest::Approx(3.0));
  const auto amp = make_generalized_kuramoto(2.0, 0.3, amplitude_atoms());
  CHECK(amp.sup_kernel == doctest::Approx(2.25 * 2.0));
  CHECK(amp.lip_kernel == doctest::Approx(2.25 * 2.0));
  check_declared_constants(amp, 4);
  CHECK_THROWS_AS(make_generalized_kuramoto(1.0, NAN, DisorderLaw{}), std::invalid_argument);
}

TEST_CASE("proof constants") {
  auto c = model_constants(make_kuramoto(4.0, DisorderLaw{}));
  CHECK(c.c == 64.0);
  CHECK(c.C == 192.0);
  c = model_constants(make_kuramoto(0.0, DisorderLaw{}));
  CHECK(c.c == 1.0);
  CHECK(c.C == 3.0);
  c = model_constants(make_active_rotator(1.0, 1.0));
  CHECK(c.c == 4.0);
  CHECK(c.C == 12.0);
  CHECK(model_constants(make_kuramoto(1.0, DisorderLaw{})).C == 12.0);
}

TEST_CASE("custom kernel escape hatch") {
  const auto m = make_custom([](double t, const Disorder&, double s, const Disorder&) { return std::cos(t - s); },
                             1.0, 1.0, 0.0, DisorderLaw{});
  CHECK(!m.trigonometric());
  CHECK(m.interaction(0.0, {}, 0.0, {}) == 1.0);
  check_declared_constants(m, 5);
  CHECK_THROWS_AS(make_custom(nullptr, 1.0, 1.0, 0.0, DisorderLaw{}), std::invalid_argument);
}
