// Interaction-sum kernels: serial reference vs OpenMP edge loop vs clique
// block sums, plus one full Euler step.

#include <benchmark/benchmark.h>

#include <vector>

#include "mflab/graphs.hpp"
#include "mflab/kernels.hpp"
#include "mflab/models.hpp"
#include "mflab/sde.hpp"

namespace {

using namespace mflab;

struct Setup {
  graphs::Graph graph;
  models::ModelSpec model;
  sde::EnsembleState state;
  std::vector<double> out;

  Setup(graphs::Graph g, std::size_t n)
      : graph(std::move(g)),
        model(models::make_kuramoto(2.0, models::DisorderLaw{})),
        state(sde::sample_initial({}, n, 7)),
        out(n) {}
};

Setup complete_setup(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  return Setup(graphs::complete(n), n);
}

Setup er_setup(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  return Setup(graphs::erdos_renyi(n, 0.1, true, 3), n);
}

void BM_reference_complete(benchmark::State& st) {
  auto s = complete_setup(st);
  for (auto _ : st) {
    kernels::interaction_sums_reference(s.graph, s.model, s.state.theta, s.state.atom, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.graph.edge_count()));
}

void BM_edges_complete(benchmark::State& st) {
  auto s = complete_setup(st);
  const int workers = static_cast<int>(st.range(1));
  for (auto _ : st) {
    kernels::interaction_sums_edges(s.graph, s.model, s.state.theta, s.state.atom, s.out, workers);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.graph.edge_count()));
}

void BM_blocks_complete(benchmark::State& st) {
  auto s = complete_setup(st);
  const int workers = static_cast<int>(st.range(1));
  for (auto _ : st) {
    kernels::interaction_sums_blocks(s.graph, s.model, s.state.theta, s.state.atom, s.out, workers);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.graph.size()));
}

void BM_reference_er(benchmark::State& st) {
  auto s = er_setup(st);
  for (auto _ : st) {
    kernels::interaction_sums_reference(s.graph, s.model, s.state.theta, s.state.atom, s.out);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.graph.edge_count()));
}

void BM_edges_er(benchmark::State& st) {
  auto s = er_setup(st);
  const int workers = static_cast<int>(st.range(1));
  for (auto _ : st) {
    kernels::interaction_sums_edges(s.graph, s.model, s.state.theta, s.state.atom, s.out, workers);
    benchmark::DoNotOptimize(s.out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(s.graph.edge_count()));
}

void BM_euler_step_er(benchmark::State& st) {
  auto s = er_setup(st);
  const sde::SimConfig cfg{0.01, 0.01, 1, 1, static_cast<int>(st.range(1))};
  for (auto _ : st) {
    sde::integrate(s.graph, s.model, s.state, cfg, nullptr);
    benchmark::DoNotOptimize(s.state.theta.data());
  }
}

}  // namespace

BENCHMARK(BM_reference_complete)->Arg(500)->Arg(2000);
BENCHMARK(BM_edges_complete)->Args({500, 1})->Args({2000, 1})->Args({2000, 0});
BENCHMARK(BM_blocks_complete)->Args({500, 1})->Args({2000, 1})->Args({20000, 0});
BENCHMARK(BM_reference_er)->Arg(2000)->Arg(8000);
BENCHMARK(BM_edges_er)->Args({2000, 1})->Args({8000, 1})->Args({8000, 0});
BENCHMARK(BM_euler_step_er)->Args({2000, 1})->Args({2000, 0});

BENCHMARK_MAIN();
