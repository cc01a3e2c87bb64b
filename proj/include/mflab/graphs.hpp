#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace mflab::graphs {

using Vertex = std::uint32_t;

/// Half-open vertex range [begin, end).
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const Block&, const Block&) = default;
};

class InvalidDegreeError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class DegreeParityError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Directed adjacency in compressed-row form: row i lists the out-neighbours
/// j with xi(i, j) = 1, which is what the drift sum of particle i iterates.
/// Vertices are 0-based internally; the text format is 1-based.
class Graph {
 public:
  Graph() = default;

  /// Validates: targets in range, rows sorted without duplicates, no diagonal
  /// entries unless `self_loops_allowed`, alpha >= 1.
  Graph(std::vector<std::size_t> offsets, std::vector<Vertex> targets, double alpha,
        bool self_loops_allowed);

  /// Sorts each row; rejects duplicates.
  static Graph from_rows(std::vector<std::vector<Vertex>> rows, double alpha,
                         bool self_loops_allowed);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  double alpha() const { return alpha_; }
  void set_alpha(double alpha);
  bool self_loops_allowed() const { return self_loops_allowed_; }

  std::span<const Vertex> neighbors(std::size_t i) const {
    return {targets_.data() + offsets_[i], targets_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t edge_count() const { return targets_.size(); }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const Vertex> targets() const { return targets_; }

  /// Non-empty when the graph is a disjoint union of complete blocks of
  /// consecutive vertices (diagonal included), e.g. the complete and
  /// two-clique graphs. Drift sums over such graphs reduce to block sums.
  const std::vector<Block>& clique_blocks() const { return clique_blocks_; }

  /// Compares adjacency and alpha; the self-loop policy flag is not part of
  /// the value.
  friend bool operator==(const Graph& a, const Graph& b);

 private:
  void detect_clique_blocks();

  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
  double alpha_ = 1.0;
  bool self_loops_allowed_ = false;
  std::vector<Block> clique_blocks_;
};

/// All n^2 ordered pairs including the diagonal, so d_i = n. alpha = 1.
Graph complete(std::size_t n);

/// Two disjoint complete graphs on {0..N-1} and {N..2N-1}, diagonal included.
Graph two_clique(std::size_t clique_size);

/// Each off-diagonal entry is Bernoulli(q), independently per ordered pair
/// (symmetric: drawn for i < j and mirrored). No self-loops. Draws are keyed
/// by (seed, row), so the result does not depend on `workers`. The Bernoulli
/// threshold has 2^-32 resolution.
Graph erdos_renyi(std::size_t n, double q, bool symmetric, std::uint64_t seed, int workers = 0);

/// Simple undirected d-regular graph by pairing with rejection of loops and
/// repeated pairs (restart when stuck). For d > (n-1)/2 the complement of a
/// (n-1-d)-regular graph is returned. alpha defaults to n/d.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed);

struct DegreeReport {
  std::vector<std::size_t> degrees;
  std::size_t n = 0;
  double alpha = 1.0;
  double p = 1.0;
  double b_n = 0.0;  // max_i |alpha d_i / n - p|
  double a_n = 0.0;  // max_i alpha d_i / n
};

DegreeReport degree_stats(const Graph& graph, double p);

void save(const Graph& graph, std::ostream& out);
Graph load(std::istream& in);
void save(const Graph& graph, const std::filesystem::path& path);
Graph load(const std::filesystem::path& path);

// Binomial concentration.

/// Relative entropy of Bernoulli(x) with respect to Bernoulli(y), x, y in (0,1).
double kl_bernoulli(double x, double y);

inline constexpr std::size_t kExactTailLimit = 10000;

struct TailBound {
  double chernoff_bound = 1.0;
  /// For eps >= 0: P(X > (q+eps) n). For eps < 0 the inequality is reversed:
  /// P(X < (q+eps) n). Present only for n <= kExactTailLimit.
  std::optional<double> exact_tail;
  bool upper = true;
};

/// X ~ Bin(n, q). chernoff_bound = exp(-n D(q+eps || q)).
TailBound binomial_tail(std::size_t n, double q, double eps);

}  // namespace mflab::graphs
