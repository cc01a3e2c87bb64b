#include "mflab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "parallel.hpp"

namespace mflab::kernels {
namespace {

constexpr std::size_t kChunk = 256;

void check_sizes(const graphs::Graph& graph, std::span<const double> theta,
                 std::span<const std::uint32_t> atom, std::span<double> out) {
  if (theta.size() != graph.size() || atom.size() != graph.size() || out.size() != graph.size()) {
    throw std::invalid_argument("interaction sums: state size does not match the graph");
  }
}

struct Phasors {
  std::vector<double> re;
  std::vector<double> im;
};

Phasors phasors(const models::ModelSpec& model, std::span<const double> theta,
                std::span<const std::uint32_t> atom, int threads) {
  const auto n = static_cast<std::int64_t>(theta.size());
  Phasors p{std::vector<double>(theta.size()), std::vector<double>(theta.size())};
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto& w = model.disorder[atom[j]];
    const double y = theta[j] - w.phase;
    p.re[j] = w.amplitude * std::cos(y);
    p.im[j] = w.amplitude * std::sin(y);
  }
  return p;
}

// -A_i K Im(e^{i X_i} conj(S)) with X_i = theta_i - alpha_i - delta.
inline double contract(const models::ModelSpec& model, const models::Disorder& w, double theta,
                       double sum_re, double sum_im) {
  const double x = theta - w.phase - model.kernel.delta;
  return -w.amplitude * model.kernel.coupling * (std::sin(x) * sum_re - std::cos(x) * sum_im);
}

}  // namespace

bool fast_path_applies(const graphs::Graph& graph, const models::ModelSpec& model) {
  return model.trigonometric() && !graph.clique_blocks().empty();
}

void interaction_sums_reference(const graphs::Graph& graph, const models::ModelSpec& model,
                                std::span<const double> theta, std::span<const std::uint32_t> atom,
                                std::span<double> out) {
  check_sizes(graph, theta, atom, out);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto& wi = model.disorder[atom[i]];
    double sum = 0.0;
    for (graphs::Vertex j : graph.neighbors(i)) {
      sum += model.interaction(theta[i], wi, theta[j], model.disorder[atom[j]]);
    }
    out[i] = sum;
  }
}

void interaction_sums_edges(const graphs::Graph& graph, const models::ModelSpec& model,
                            std::span<const double> theta, std::span<const std::uint32_t> atom,
                            std::span<double> out, int workers) {
  check_sizes(graph, theta, atom, out);
  const int threads = detail::thread_count(workers);
  const auto n = static_cast<std::int64_t>(graph.size());

  if (!model.trigonometric()) {
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& wi = model.disorder[atom[i]];
      double sum = 0.0;
      for (graphs::Vertex j : graph.neighbors(i)) {
        sum += model.custom_kernel(theta[i], wi, theta[j], model.disorder[atom[j]]);
      }
      out[i] = sum;
    }
    return;
  }

  const Phasors p = phasors(model, theta, atom, threads);
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    double re = 0.0;
    double im = 0.0;
    for (graphs::Vertex j : graph.neighbors(i)) {
      re += p.re[j];
      im += p.im[j];
    }
    out[i] = contract(model, model.disorder[atom[i]], theta[i], re, im);
  }
}

void interaction_sums_blocks(const graphs::Graph& graph, const models::ModelSpec& model,
                             std::span<const double> theta, std::span<const std::uint32_t> atom,
                             std::span<double> out, int workers) {
  check_sizes(graph, theta, atom, out);
  if (!fast_path_applies(graph, model)) {
    throw std::invalid_argument("block fast path needs clique blocks and a trigonometric kernel");
  }
  const int threads = detail::thread_count(workers);
  const auto& blocks = graph.clique_blocks();
  const Phasors p = phasors(model, theta, atom, threads);

  // Fixed chunking independent of the thread count; chunks never straddle blocks.
  std::vector<graphs::Block> chunk;
  std::vector<std::size_t> first_chunk(blocks.size() + 1, 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    first_chunk[b] = chunk.size();
    for (std::size_t s = blocks[b].begin; s < blocks[b].end; s += kChunk) {
      chunk.push_back({s, std::min(s + kChunk, blocks[b].end)});
    }
  }
  first_chunk[blocks.size()] = chunk.size();

  std::vector<double> part_re(chunk.size());
  std::vector<double> part_im(chunk.size());
  const auto chunks = static_cast<std::int64_t>(chunk.size());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t c = 0; c < chunks; ++c) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = chunk[c].begin; j < chunk[c].end; ++j) {
      re += p.re[j];
      im += p.im[j];
    }
    part_re[c] = re;
    part_im[c] = im;
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t c = first_chunk[b]; c < first_chunk[b + 1]; ++c) {
      re += part_re[c];
      im += part_im[c];
    }
    const auto lo = static_cast<std::int64_t>(blocks[b].begin);
    const auto hi = static_cast<std::int64_t>(blocks[b].end);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t i = lo; i < hi; ++i) {
      out[i] = contract(model, model.disorder[atom[i]], theta[i], re, im);
    }
  }
}

void interaction_sums(const graphs::Graph& graph, const models::ModelSpec& model,
                      std::span<const double> theta, std::span<const std::uint32_t> atom,
                      std::span<double> out, int workers) {
  if (fast_path_applies(graph, model)) {
    interaction_sums_blocks(graph, model, theta, atom, out, workers);
  } else {
    interaction_sums_edges(graph, model, theta, atom, out, workers);
  }
}

}  // namespace mflab::kernels
