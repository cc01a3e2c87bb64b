#pragma once
// Config-driven scenario runners. Each returns a typed report with
// pass/fail verdicts and, when experiment.out is set, writes CSV tables and
// a report.json carrying the config hash and module versions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mflab/config.hpp"
#include "mflab/graphs.hpp"
#include "mflab/models.hpp"
#include "mflab/stats.hpp"

namespace mflab::experiments {

inline constexpr const char* kVersion = "1.0.0";

/// Module name and version pairs embedded in every report.
const std::vector<std::pair<std::string, std::string>>& module_versions();

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::string config_hash;
  std::vector<Verdict> verdicts;
  bool passed() const;
};

// Shared builders.
struct GraphChoice {
  graphs::Graph graph;
  double p = 1.0;
  std::string family;
};
/// graph.family in {complete, two_clique, er_dense, er_vanishing, regular, file}.
GraphChoice build_graph(const config::Config& cfg, std::size_t n);
models::ModelSpec build_model(const config::Config& cfg, double default_coupling);
models::InitialLaw build_initial(const config::Config& cfg, const models::DisorderLaw& disorder);

struct EscapeReport : Report {
  std::size_t N = 0;
  double K = 0.0;
  double r_star = 0.0;
  double predicted_crossing = 0.0;  // log N / (2 lambda_1)
  std::vector<std::uint64_t> seeds;
  std::vector<double> crossing;  // NaN when r never reached the level
  std::vector<double> final_r;
  std::vector<double> center;
  std::vector<std::size_t> modes;
  std::vector<double> dbl;
  double median_crossing = 0.0;
  std::optional<stats::UniformityTest> center_test;  // with >= 20 seeds
};
EscapeReport run_escape(const config::Config& cfg);

struct TwoCliqueReport : Report {
  std::size_t clique_size = 0;
  double K = 0.0;
  double r_star = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> r_first;
  std::vector<double> r_second;
  std::vector<double> r_global;
  std::vector<double> gap;  // in [0, pi]
  std::vector<std::size_t> modes;
  double success_fraction = 0.0;
  double global_below_fraction = 0.0;
  stats::UniformityTest gap_test;
};
TwoCliqueReport run_two_clique(const config::Config& cfg);

struct ProximityRow {
  std::size_t n = 0;
  double alpha = 1.0;
  double p = 1.0;
  double b_n = 0.0;
  double prefactor = 0.0;
  std::vector<double> times;
  std::vector<double> u;
  std::vector<double> bound;
  std::vector<double> dbl;  // seed-mean estimate per recorded time
  double sup_dbl = 0.0;
  /// u at time t (nearest recorded time).
  double u_at(double t) const;
};

struct ProximityReport : Report {
  std::string family;
  double C = 0.0;
  std::vector<double> checkpoints;
  std::vector<ProximityRow> rows;
};
ProximityReport run_proximity_sweep(const config::Config& cfg);

struct DegreeTailRow {
  std::size_t n = 0;
  double q = 0.0;
  bool sparse = false;  // n q < log n; not sampled
  std::string note;
  std::vector<double> b_samples;
  double b_mean = 0.0;
  double b_max = 0.0;
  double scale = 0.0;  // sqrt(log n / (n q))
  double epsilon = 0.0;
  graphs::TailBound upper;
  graphs::TailBound lower;
  double union_bound = 0.0;  // n (P_upper + P_lower), Chernoff
};

struct DegreeTailsReport : Report {
  std::vector<DegreeTailRow> rows;
  std::size_t grid_points = 0;
  std::size_t grid_violations = 0;
};
DegreeTailsReport run_degree_tails(const config::Config& cfg);

struct RateFit {
  std::size_t k = 0;
  double fitted = 0.0;
  double predicted = 0.0;
  double rel_error = 0.0;
};

struct FixedPointRow {
  double K = 0.0;
  std::vector<double> roots;
  double residual = 0.0;
};

struct FpRatesReport : Report {
  double K = 0.0;
  double sigma = 1.0;
  std::vector<RateFit> rates;
  std::vector<FixedPointRow> fixed_points;
  double r_star = 0.0;
  double relaxed_r = 0.0;  // |m_1| after relax_time from a small perturbation
  std::vector<double> lin_times;
  std::vector<double> lin_mean_r2;
  std::vector<double> lin_predicted;
  double lin_max_rel_error = 0.0;
};
FpRatesReport run_fp_rates(const config::Config& cfg);

Report run_simulate(const config::Config& cfg);
Report run_couple(const config::Config& cfg);
Report run_graph_stats(const config::Config& cfg);

}  // namespace mflab::experiments
