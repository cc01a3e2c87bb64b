#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "mflab/graphs.hpp"

using namespace mflab::graphs;

namespace {

// P(X > t) or P(X < t) for X ~ Bin(n, q) by the pmf recurrence.
long double binomial_oracle(std::size_t n, double q, double threshold, bool upper) {
  long double pmf = std::pow(1.0L - q, static_cast<long double>(n));
  long double total = 0.0L;
  for (std::size_t k = 0; k <= n; ++k) {
    const auto kk = static_cast<double>(k);
    if (upper ? kk > threshold + 1e-9 : kk < threshold - 1e-9) total += pmf;
    pmf *= static_cast<long double>(n - k) / static_cast<long double>(k + 1) * q / (1.0L - q);
  }
  return total;
}

void check_rows_consistent(const Graph& g) {
  const auto stats = degree_stats(g, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t recount = 0;
    for (auto j : g.neighbors(i)) {
      REQUIRE(j < g.size());
      ++recount;
    }
    CHECK(stats.degrees[i] == recount);
  }
}

bool symmetric(const Graph& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (auto j : g.neighbors(i)) {
      const auto back = g.neighbors(j);
      if (!std::binary_search(back.begin(), back.end(), static_cast<Vertex>(i))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("complete graph") {
  const auto g3 = complete(3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(g3.degree(i) == 3);
  const auto s = degree_stats(complete(10), 1.0);
  CHECK(s.b_n == 0.0);
  CHECK(s.a_n == 1.0);
  const auto g1 = complete(1);
  CHECK(g1.size() == 1);
  CHECK(g1.degree(0) == 1);
  CHECK(g1.neighbors(0)[0] == 0);
  CHECK_THROWS_AS(complete(0), std::invalid_argument);
  CHECK(complete(7).clique_blocks() == std::vector<Block>{{0, 7}});
}

TEST_CASE("two-clique graph") {
  const auto g = two_clique(2);
  CHECK(g.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.degree(i) == 2);
  const auto s = degree_stats(two_clique(5), 0.5);
  CHECK(s.b_n == 0.0);
  CHECK(s.a_n == 0.5);
  const auto g1 = two_clique(1);
  CHECK(g1.size() == 2);
  CHECK(g1.degree(0) == 1);
  CHECK(g1.neighbors(1)[0] == 1);
  CHECK_THROWS_AS(two_clique(0), std::invalid_argument);
  CHECK(two_clique(4).clique_blocks() == std::vector<Block>{{0, 4}, {4, 8}});
  CHECK(two_clique(4).alpha() == 1.0);
}

TEST_CASE("Erdos-Renyi degenerate and concentrated cases") {
  const auto full = erdos_renyi(30, 1.0, false, 1);
  for (std::size_t i = 0; i < 30; ++i) CHECK(full.degree(i) == 29);
  const auto empty = erdos_renyi(30, 0.0, true, 1);
  CHECK(empty.edge_count() == 0);
  CHECK_THROWS_AS(erdos_renyi(10, 1.5, false, 1), std::invalid_argument);
  CHECK_THROWS_AS(erdos_renyi(10, -0.1, false, 1), std::invalid_argument);

  const auto g = erdos_renyi(1000, 0.5, false, 2024);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double frac = static_cast<double>(g.degree(i)) / 1000.0;
    CHECK(frac >= 0.4);
    CHECK(frac <= 0.6);
  }
  // Per-vertex failure probability behind that example, confirmed by the oracle.
  const auto tail = binomial_tail(1000, 0.5, 0.1);
  CHECK(*tail.exact_tail <= tail.chernoff_bound);
  CHECK(tail.chernoff_bound ==
        doctest::Approx(std::exp(-1000.0 * (0.6 * std::log(1.2) + 0.4 * std::log(0.8)))).epsilon(1e-12));
  CHECK(1000.0 * 2.0 * tail.chernoff_bound < 1e-5);

  const auto big = erdos_renyi(10000, 0.3, true, 77);
  CHECK(degree_stats(big, 0.3).b_n < 0.05);
  CHECK(symmetric(big));
}

TEST_CASE("Erdos-Renyi determinism and structure") {
  for (bool sym : {false, true}) {
    const auto ref = erdos_renyi(300, 0.2, sym, 99, 1);
    for (int workers : {2, 3, 8}) CHECK(erdos_renyi(300, 0.2, sym, 99, workers) == ref);
    CHECK(erdos_renyi(300, 0.2, sym, 99, 1) == ref);
    CHECK(!(erdos_renyi(300, 0.2, sym, 100, 1) == ref));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      for (auto j : ref.neighbors(i)) CHECK(j != i);
    }
    check_rows_consistent(ref);
  }
  CHECK(symmetric(erdos_renyi(200, 0.3, true, 5)));
  CHECK(!symmetric(erdos_renyi(200, 0.3, false, 5)));
}

TEST_CASE("random regular graphs") {
  const auto g = random_regular(6, 3, 1);
  for (std::size_t i = 0; i < 6; ++i) CHECK(g.degree(i) == 3);
  CHECK_THROWS_AS(random_regular(5, 3, 1), DegreeParityError);
  CHECK_THROWS_AS(random_regular(10, 2, 1), InvalidDegreeError);
  CHECK_THROWS_AS(random_regular(10, 10, 1), InvalidDegreeError);
  auto h = random_regular(8, 4, 3);
  h.set_alpha(2.0);
  CHECK(degree_stats(h, 1.0).b_n == 0.0);
  CHECK(random_regular(8, 4, 3).alpha() == 2.0);
  CHECK(random_regular(30, 7, 12) == random_regular(30, 7, 12));

  for (std::size_t n = 6; n <= 50; ++n) {
    for (std::size_t d = 3; d < n; ++d) {
      if ((n * d) % 2 != 0) continue;
      const auto r = random_regular(n, d, n * 131 + d);
      bool ok = r.size() == n && symmetric(r);
      for (std::size_t i = 0; i < n; ++i) {
        ok = ok && r.degree(i) == d;
        for (auto j : r.neighbors(i)) ok = ok && j != i;  // rows are strictly sorted: no repeats
      }
      CHECK_MESSAGE(ok, "n = " << n << ", d = " << d);
    }
  }
}

TEST_CASE("degree statistics") {
  const auto g = erdos_renyi(200, 0.4, false, 8);
  const auto s = degree_stats(g, 0.4);
  CHECK(s.a_n <= s.b_n + 0.4 + 1e-15);
  CHECK_THROWS_AS(degree_stats(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(degree_stats(g, 1.5), std::invalid_argument);
  check_rows_consistent(g);
  check_rows_consistent(two_clique(6));
  check_rows_consistent(random_regular(20, 5, 2));
  CHECK_THROWS_AS(complete(3).set_alpha(0.5), std::invalid_argument);
}

TEST_CASE("Bernoulli relative entropy") {
  for (double q : {0.01, 0.3, 0.5, 0.97}) CHECK(kl_bernoulli(q, q) == 0.0);
  // High-precision evaluation of 0.5 ln 2 + 0.5 ln(2/3).
  CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.143841036225890463719609502997).epsilon(1e-14));
  CHECK(kl_bernoulli(0.75, 0.25) == doctest::Approx(kl_bernoulli(0.25, 0.75)).epsilon(1e-14));
  CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("binomial tails") {
  CHECK(binomial_tail(100, 0.4, 0.0).chernoff_bound == 1.0);

  const auto t20 = binomial_tail(20, 0.3, 0.2);
  const double oracle = static_cast<double>(binomial_oracle(20, 0.3, 10.0, true));
  CHECK(*t20.exact_tail == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(t20.chernoff_bound == doctest::Approx(std::exp(-20.0 * kl_bernoulli(0.5, 0.3))).epsilon(1e-14));
  CHECK(*t20.exact_tail <= t20.chernoff_bound);

  const auto t50 = binomial_tail(50, 0.5, 0.3);
  CHECK(*t50.exact_tail <= t50.chernoff_bound);
  CHECK(t50.chernoff_bound < 1e-3);
  CHECK(*t50.exact_tail < 1e-3);

  CHECK_THROWS_AS(binomial_tail(10, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_tail(10, 0.5, -0.5), std::invalid_argument);
  CHECK(!binomial_tail(kExactTailLimit + 1, 0.5, 0.1).exact_tail);

  // Both directions, against the oracle and the Chernoff bound.
  for (std::size_t n = 1; n <= 100; n += (n < 30 ? 1 : 7)) {
    for (double q : {0.05, 0.2, 0.5, 0.8}) {
      for (double e : {-0.04, -0.15, -0.3, 0.03, 0.1, 0.25, 0.6}) {
        if (!(q + e > 0.0 && q + e < 1.0)) continue;
        const auto t = binomial_tail(n, q, e);
        const double thr = (q + e) * static_cast<double>(n);
        const double exact = static_cast<double>(binomial_oracle(n, q, thr, e >= 0.0));
        CHECK(*t.exact_tail == doctest::Approx(exact).epsilon(1e-10).scale(1e-300));
        CHECK(*t.exact_tail <= t.chernoff_bound * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("relative entropy lower bound q eps^2 / 4") {
  for (int qi = 1; qi <= 50; ++qi) {
    for (int ei = -99; ei <= 99; ++ei) {
      const double q = qi / 100.0;
      const double e = ei / 100.0;
      const double x = (1.0 + e) * q;
      if (!(x > 0.0 && x < 1.0)) continue;
      CHECK(kl_bernoulli(x, q) >= q * e * e / 4.0);
    }
  }
}

TEST_CASE("graph file round trip") {
  auto er = erdos_renyi(40, 0.3, false, 4);
  er.set_alpha(1.0 / 0.3);
  for (const Graph& g : {er, complete(5), two_clique(3), random_regular(12, 3, 1), complete(1)}) {
    std::stringstream s;
    save(g, s);
    CHECK(load(s) == g);
  }
  std::stringstream text("3 1.5\n2 3\n\n1\n");
  const auto g = load(text);
  CHECK(g.size() == 3);
  CHECK(g.alpha() == 1.5);
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(1) == 0);
  CHECK(g.neighbors(2)[0] == 0);
  std::stringstream header_only("2 1\n1\n");
  CHECK_THROWS_AS(load(header_only), std::invalid_argument);
  std::stringstream out_of_range("2 1\n3\n\n");
  CHECK_THROWS_AS(load(out_of_range), std::invalid_argument);
  std::stringstream junk("2 1\n1 x\n\n");
  CHECK_THROWS_AS(load(junk), std::invalid_argument);
  std::stringstream small_alpha("1 0.5\n\n");
  CHECK_THROWS_AS(load(small_alpha), std::invalid_argument);
}
