#include "mflab/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "mflab/rng.hpp"
#include "parallel.hpp"

namespace mflab::graphs {

Graph::Graph(std::vector<std::size_t> offsets, std::vector<Vertex> targets, double alpha,
             bool self_loops_allowed)
    : offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      alpha_(alpha),
      self_loops_allowed_(self_loops_allowed) {
  if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size()) {
    throw std::invalid_argument("graph: malformed row offsets");
  }
  set_alpha(alpha);
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (offsets_[i + 1] < offsets_[i]) throw std::invalid_argument("graph: decreasing row offsets");
    const auto row = neighbors(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] >= n) throw std::invalid_argument("graph: neighbour index out of range");
      if (k > 0 && row[k] <= row[k - 1]) {
        throw std::invalid_argument("graph: neighbour lists must be sorted without duplicates");
      }
      if (!self_loops_allowed_ && row[k] == i) {
        throw std::invalid_argument("graph: self-loop in a graph that forbids them");
      }
    }
  }
  detect_clique_blocks();
}

Graph Graph::from_rows(std::vector<std::vector<Vertex>> rows, double alpha,
                       bool self_loops_allowed) {
  std::vector<std::size_t> offsets(rows.size() + 1, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) offsets[i + 1] = offsets[i] + rows[i].size();
  std::vector<Vertex> targets;
  targets.reserve(offsets.back());
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    targets.insert(targets.end(), row.begin(), row.end());
    row.clear();
    row.shrink_to_fit();
  }
  return Graph(std::move(offsets), std::move(targets), alpha, self_loops_allowed);
}

void Graph::set_alpha(double alpha) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("graph: alpha_n must be finite and >= 1");
  }
  alpha_ = alpha;
}

void Graph::detect_clique_blocks() {
  clique_blocks_.clear();
  const std::size_t n = size();
  std::vector<Block> blocks;
  std::size_t i = 0;
  while (i < n) {
    const auto row = neighbors(i);
    if (row.empty() || row.front() != i) return;
    const Block block{row.front(), std::size_t{row.back()} + 1};
    if (row.size() != block.size()) return;
    for (std::size_t j = block.begin; j < block.end; ++j) {
      const auto other = neighbors(j);
      if (other.size() != block.size() || other.front() != block.begin) return;
    }
    blocks.push_back(block);
    i = block.end;
  }
  clique_blocks_ = std::move(blocks);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.alpha_ == b.alpha_ && a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
}

Graph complete(std::size_t n) {
  if (n == 0) throw std::invalid_argument("complete: n must be >= 1");
  std::vector<std::size_t> offsets(n + 1);
  std::vector<Vertex> targets(n * n);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i * n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) targets[i * n + j] = static_cast<Vertex>(j);
  }
  return Graph(std::move(offsets), std::move(targets), 1.0, true);
}

Graph two_clique(std::size_t clique_size) {
  if (clique_size == 0) throw std::invalid_argument("two_clique: N must be >= 1");
  const std::size_t n = 2 * clique_size;
  std::vector<std::size_t> offsets(n + 1);
  std::vector<Vertex> targets(n * clique_size);
  for (std::size_t i = 0; i <= n; ++i) offsets[i] = i * clique_size;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = i < clique_size ? 0 : clique_size;
    for (std::size_t j = 0; j < clique_size; ++j) {
      targets[i * clique_size + j] = static_cast<Vertex>(first + j);
    }
  }
  return Graph(std::move(offsets), std::move(targets), 1.0, true);
}

Graph erdos_renyi(std::size_t n, double q, bool symmetric, std::uint64_t seed, int workers) {
  if (n == 0) throw std::invalid_argument("erdos_renyi: n must be >= 1");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("erdos_renyi: q must lie in [0, 1]");

  // Bernoulli(q) as u32 < threshold; q = 1 gives 2^32 and accepts every word.
  const auto threshold = static_cast<std::uint64_t>(std::ldexp(q, 32));
  const rng::CounterRng rng(seed);
  std::vector<std::vector<Vertex>> rows(n);
  const auto rows_count = static_cast<std::int64_t>(n);
  const int threads = detail::thread_count(workers);

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::int64_t ii = 0; ii < rows_count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto& row = rows[i];
    row.reserve(static_cast<std::size_t>(q * static_cast<double>(n) * 1.1) + 8);
    const std::size_t first = symmetric ? i + 1 : 0;
    rng::Counter words{};
    std::size_t cached = SIZE_MAX;
    for (std::size_t j = first; j < n; ++j) {
      if (j == i) continue;
      if (j / 4 != cached) {
        cached = j / 4;
        words = rng.block(rng::Stream::graph_edges, i, static_cast<std::uint32_t>(cached));
      }
      if (words[j % 4] < threshold) row.push_back(static_cast<Vertex>(j));
    }
  }

  if (symmetric) {
    std::vector<std::size_t> lower(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (Vertex j : rows[i]) ++lower[j];
    }
    std::vector<std::vector<Vertex>> full(n);
    for (std::size_t i = 0; i < n; ++i) full[i].reserve(lower[i] + rows[i].size());
    for (std::size_t i = 0; i < n; ++i) {
      for (Vertex j : rows[i]) full[j].push_back(static_cast<Vertex>(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
      full[i].insert(full[i].end(), rows[i].begin(), rows[i].end());
      rows[i] = {};
    }
    rows = std::move(full);
  }
  return Graph::from_rows(std::move(rows), 1.0, false);
}

namespace {

bool adjacent(const std::vector<std::vector<Vertex>>& adj, Vertex u, Vertex v) {
  const auto& row = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
  const Vertex other = adj[u].size() <= adj[v].size() ? v : u;
  return std::find(row.begin(), row.end(), other) != row.end();
}

// One attempt of the pairing process: repeatedly join two random unpaired
// points whose vertices are distinct and not yet adjacent. Fails when no
// admissible pair remains.
std::optional<std::vector<std::vector<Vertex>>> try_pairing(std::size_t n, std::size_t d,
                                                            rng::CounterStream& draws) {
  std::vector<Vertex> points;
  points.reserve(n * d);
  for (std::size_t v = 0; v < n; ++v) points.insert(points.end(), d, static_cast<Vertex>(v));
  std::vector<std::vector<Vertex>> adj(n);
  for (auto& row : adj) row.reserve(d);

  std::size_t m = points.size();
  while (m > 0) {
    std::size_t a = 0;
    std::size_t b = 0;
    bool found = false;
    for (int attempt = 0; attempt < 256 && !found; ++attempt) {
      a = draws.next_below(static_cast<std::uint32_t>(m));
      b = draws.next_below(static_cast<std::uint32_t>(m - 1));
      if (b >= a) ++b;
      found = points[a] != points[b] && !adjacent(adj, points[a], points[b]);
    }
    if (!found) {
      bool any = false;
      for (std::size_t x = 0; x < m && !any; ++x) {
        for (std::size_t y = x + 1; y < m && !any; ++y) {
          any = points[x] != points[y] && !adjacent(adj, points[x], points[y]);
        }
      }
      if (!any) return std::nullopt;
      continue;
    }
    const Vertex u = points[a];
    const Vertex v = points[b];
    adj[u].push_back(v);
    adj[v].push_back(u);
    if (a < b) std::swap(a, b);
    points[a] = points[m - 1];
    points[b] = points[m - 2];
    m -= 2;
  }
  return adj;
}

}  // namespace

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d < 3 || d >= n) {
    throw InvalidDegreeError("random_regular: degree must satisfy 3 <= d < n");
  }
  if ((n * d) % 2 != 0) {
    throw DegreeParityError("random_regular: d * n must be even");
  }
  const bool complement = d > (n - 1) / 2;
  const std::size_t base_degree = complement ? n - 1 - d : d;

  constexpr int kMaxRestarts = 1000;
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    rng::CounterStream draws(seed, rng::Stream::regular_pairing, static_cast<std::uint64_t>(restart));
    auto adj = try_pairing(n, base_degree, draws);
    if (!adj) continue;
    if (complement) {
      std::vector<std::vector<Vertex>> comp(n);
      for (std::size_t u = 0; u < n; ++u) {
        std::vector<char> mark(n, 0);
        mark[u] = 1;
        for (Vertex v : (*adj)[u]) mark[v] = 1;
        comp[u].reserve(d);
        for (std::size_t v = 0; v < n; ++v) {
          if (!mark[v]) comp[u].push_back(static_cast<Vertex>(v));
        }
      }
      *adj = std::move(comp);
    }
    return Graph::from_rows(std::move(*adj), static_cast<double>(n) / static_cast<double>(d), false);
  }
  throw std::runtime_error("random_regular: pairing did not succeed within the restart cap");
}

DegreeReport degree_stats(const Graph& graph, double p) {
  if (graph.size() == 0) throw std::invalid_argument("degree_stats: empty graph");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("degree_stats: p must lie in (0, 1]");
  DegreeReport report;
  report.n = graph.size();
  report.alpha = graph.alpha();
  report.p = p;
  report.degrees.resize(report.n);
  const double scale = graph.alpha() / static_cast<double>(report.n);
  for (std::size_t i = 0; i < report.n; ++i) {
    report.degrees[i] = graph.degree(i);
    const double normalized = scale * static_cast<double>(report.degrees[i]);
    report.b_n = std::max(report.b_n, std::abs(normalized - p));
    report.a_n = std::max(report.a_n, normalized);
  }
  return report;
}

void save(const Graph& graph, std::ostream& out) {
  out << graph.size() << ' ' << std::setprecision(17) << graph.alpha() << '\n';
  for (std::size_t i = 0; i < graph.size(); ++i) {
    bool first = true;
    for (Vertex j : graph.neighbors(i)) {
      if (!first) out << ' ';
      out << (j + 1);
      first = false;
    }
    out << '\n';
  }
}

Graph load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("graph file: missing header");
  std::istringstream header(line);
  std::size_t n = 0;
  double alpha = 0.0;
  if (!(header >> n >> alpha)) throw std::invalid_argument("graph file: header must be 'n alpha_n'");
  std::vector<std::vector<Vertex>> rows(n);
  bool loops = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("graph file: fewer rows than n");
    std::istringstream fields(line);
    long long j = 0;
    while (fields >> j) {
      if (j < 1 || static_cast<std::size_t>(j) > n) {
        throw std::invalid_argument("graph file: neighbour index out of [1, n]");
      }
      rows[i].push_back(static_cast<Vertex>(j - 1));
      loops = loops || static_cast<std::size_t>(j - 1) == i;
    }
    if (!fields.eof()) throw std::invalid_argument("graph file: non-integer token in row");
  }
  return Graph::from_rows(std::move(rows), alpha, loops);
}

void save(const Graph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save(graph, out);
}

Graph load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load(in);
}

}  // namespace mflab::graphs
