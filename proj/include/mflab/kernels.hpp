#pragma once

// Interaction sums  out[i] = sum_j xi(i,j) Gamma(theta_i, w_i, theta_j, w_j),
// without the alpha_n / n prefactor.
//
// Three implementations with identical semantics:
//  - reference: serial, evaluates Gamma on every edge. Kept as the test
//    oracle and the benchmark baseline.
//  - edges: OpenMP over rows; for trigonometric kernels each edge is a
//    multiply-add on precomputed phasors A_j e^{i(theta_j - alpha_j)}.
//  - blocks: clique-block fast path, O(n) per call via per-block phasor sums.
//
// All paths are deterministic for any thread count: each row is summed in
// a fixed order, and block sums use fixed-size chunks reduced serially.

#include <cstdint>
#include <span>

#include "mflab/graphs.hpp"
#include "mflab/models.hpp"

namespace mflab::kernels {

void interaction_sums_reference(const graphs::Graph& graph, const models::ModelSpec& model,
                                std::span<const double> theta, std::span<const std::uint32_t> atom,
                                std::span<double> out);

void interaction_sums_edges(const graphs::Graph& graph, const models::ModelSpec& model,
                            std::span<const double> theta, std::span<const std::uint32_t> atom,
                            std::span<double> out, int workers = 0);

/// Requires a non-empty graph.clique_blocks() and a trigonometric kernel.
void interaction_sums_blocks(const graphs::Graph& graph, const models::ModelSpec& model,
                             std::span<const double> theta, std::span<const std::uint32_t> atom,
                             std::span<double> out, int workers = 0);

/// Picks the block fast path when it applies, otherwise edge iteration.
void interaction_sums(const graphs::Graph& graph, const models::ModelSpec& model,
                      std::span<const double> theta, std::span<const std::uint32_t> atom,
                      std::span<double> out, int workers = 0);

bool fast_path_applies(const graphs::Graph& graph, const models::ModelSpec& model);

}  // namespace mflab::kernels
