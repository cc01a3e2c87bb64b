#include "mflab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mflab/csv.hpp"
#include "mflab/fokker_planck.hpp"
#include "mflab/metrics.hpp"
#include "mflab/sde.hpp"
#include "parallel.hpp"

namespace mflab::experiments {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs job(i) for i < count, in parallel across jobs when workers allow.
// Jobs write into their own slot, so aggregation order is fixed.
template <class Job>
void for_each_job(std::size_t count, int workers, Job&& job) {
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic) num_threads(detail::thread_count(workers))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(mflab_job_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string fmt(double x) { return csv::format(x); }

std::optional<fs::path> output_dir(const config::Config& cfg) {
  const std::string out = cfg.text("experiment", "out", "");
  if (out.empty()) return std::nullopt;
  fs::create_directories(out);
  return fs::path(out);
}

int workers_of(const config::Config& cfg) {
  return static_cast<int>(cfg.integer("experiment", "workers", 0));
}

void check_kind(const config::Config& cfg, const std::string& kind) {
  const std::string given = cfg.text("experiment", "kind", kind);
  if (given != kind) {
    throw config::ConfigError("experiment.kind is '" + given + "' but the runner is '" + kind + "'");
  }
}

void add(Report& report, std::string name, bool passed, std::string detail) {
  report.verdicts.push_back({std::move(name), passed, std::move(detail)});
}

void write_report(const std::optional<fs::path>& dir, const config::Config& cfg, Report& report,
                  json summary) {
  report.config_hash = cfg.hash();
  if (!dir) return;
  json doc;
  doc["experiment"] = report.experiment;
  doc["config_hash"] = report.config_hash;
  doc["version"] = kVersion;
  for (const auto& [name, version] : module_versions()) doc["modules"][name] = version;
  doc["config"] = cfg.canonical();
  doc["passed"] = report.passed();
  doc["verdicts"] = json::array();
  for (const auto& v : report.verdicts) {
    doc["verdicts"].push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  }
  doc["summary"] = std::move(summary);
  std::ofstream out(*dir / "report.json");
  out << doc.dump(2) << '\n';
}

double positive_root(double K, double sigma) {
  const auto roots = fp::solve_r_fixed_point(K, sigma);
  if (roots.size() < 2) throw std::invalid_argument("coupling is below the synchronization threshold");
  return roots.back();
}

std::vector<double> wrapped_shift(std::span<const double> theta, double shift) {
  std::vector<double> out(theta.begin(), theta.end());
  for (double& t : out) t -= shift;
  return out;
}

// Angular distance folded into [0, pi].
double angular_gap(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return d > kPi ? 2.0 * kPi - d : d;
}

std::size_t nearest_index(std::span<const double> times, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  }
  return best;
}

void write_histogram(const fs::path& path, std::span<const double> theta) {
  const auto h = stats::circular_histogram(theta, 64);
  const auto smooth = stats::smooth_circular(h, 3.0);
  csv::Writer w(path, {"theta", "density", "smoothed"});
  for (std::size_t b = 0; b < h.size(); ++b) {
    w << (static_cast<double>(b) + 0.5) * 2.0 * kPi / 64.0 << h[b] << smooth[b];
    w.end_row();
  }
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& module_versions() {
  static const std::vector<std::pair<std::string, std::string>> versions = {
      {"graphs", "1.0.0"},        {"models", "1.0.0"},  {"sde_engine", "1.0.0"},
      {"fokker_planck", "1.0.0"}, {"metrics", "1.0.0"}, {"cli", "1.0.0"},
  };
  return versions;
}

bool Report::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

GraphChoice build_graph(const config::Config& cfg, std::size_t n) {
  GraphChoice choice;
  choice.family = cfg.text("graph", "family", "complete");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("graph", "seed", 1));
  const bool symmetric = cfg.flag("graph", "symmetric", true);
  if (choice.family == "complete") {
    choice.graph = graphs::complete(n);
  } else if (choice.family == "two_clique") {
    if (n % 2 != 0) throw config::ConfigError("graph.n must be even for two_clique");
    choice.graph = graphs::two_clique(n / 2);
    choice.p = 0.5;
  } else if (choice.family == "er_dense") {
    const double q = cfg.number("graph", "q", 0.3);
    choice.graph = graphs::erdos_renyi(n, q, symmetric, seed, workers_of(cfg));
    choice.p = q;
  } else if (choice.family == "er_vanishing") {
    const double x = cfg.number("graph", "q_exponent", 1.0 / 3.0);
    const double q = std::pow(static_cast<double>(n), -x);
    choice.graph = graphs::erdos_renyi(n, q, symmetric, seed, workers_of(cfg));
    choice.graph.set_alpha(1.0 / q);
  } else if (choice.family == "regular") {
    choice.graph = graphs::random_regular(n, cfg.count("graph", "degree", 10), seed);
  } else if (choice.family == "file") {
    choice.graph = graphs::load(fs::path(cfg.text("graph", "path", "")));
  } else {
    throw config::ConfigError("graph.family: unknown family '" + choice.family + "'");
  }
  if (cfg.has("graph", "alpha")) choice.graph.set_alpha(cfg.number("graph", "alpha", 1.0));
  choice.p = cfg.number("graph", "p", choice.p);
  return choice;
}

models::ModelSpec build_model(const config::Config& cfg, double default_coupling) {
  const std::string kind = cfg.text("model", "kind", "kuramoto");
  const double K = cfg.number("model", "coupling", default_coupling);
  const double sigma = cfg.number("model", "sigma", 1.0);
  const auto eta = cfg.numbers("model", "frequencies", "0");
  const auto amp = cfg.numbers("model", "amplitudes", "");
  const auto phase = cfg.numbers("model", "phases", "");
  auto weights = cfg.numbers("model", "weights", "");
  if (weights.empty()) weights.assign(eta.size(), 1.0 / static_cast<double>(eta.size()));
  if (weights.size() != eta.size() || (!amp.empty() && amp.size() != eta.size()) ||
      (!phase.empty() && phase.size() != eta.size())) {
    throw config::ConfigError("model: disorder lists must have equal length");
  }
  std::vector<models::Atom> atoms;
  for (std::size_t b = 0; b < eta.size(); ++b) {
    atoms.push_back({{eta[b], amp.empty() ? 1.0 : amp[b], phase.empty() ? 0.0 : phase[b]},
                     weights[b]});
  }
  if (kind == "kuramoto") return models::make_kuramoto(K, models::DisorderLaw(atoms), sigma);
  if (kind == "active_rotator") {
    return models::make_active_rotator(cfg.number("model", "drift_sine", 1.0), K, sigma);
  }
  if (kind == "generalized") {
    return models::make_generalized_kuramoto(K, cfg.number("model", "delta", 0.0),
                                             models::DisorderLaw(atoms), sigma);
  }
  throw config::ConfigError("model.kind: unknown model '" + kind + "'");
}

models::InitialLaw build_initial(const config::Config& cfg, const models::DisorderLaw& disorder) {
  models::InitialLaw law;
  law.disorder = disorder;
  const std::string phase = cfg.text("initial", "phase", "uniform");
  if (phase == "uniform") {
    law.phase = models::UniformPhase{};
  } else if (phase == "point") {
    law.phase = models::PointMass{cfg.number("initial", "at", 0.0)};
  } else if (phase == "gaussian") {
    law.phase = models::WrappedGaussian{cfg.number("initial", "mean", 0.0),
                                        cfg.number("initial", "spread", 1.0)};
  } else {
    throw config::ConfigError("initial.phase: unknown law '" + phase + "'");
  }
  return law;
}

// ---------------------------------------------------------------------------

EscapeReport run_escape(const config::Config& cfg) {
  check_kind(cfg, "escape");
  EscapeReport rep;
  rep.experiment = "escape";
  rep.N = cfg.count("graph", "n", 1000);
  rep.K = cfg.number("model", "coupling", 4.0);
  const double sigma = cfg.number("model", "sigma", 1.0);
  const double dt = cfg.number("sim", "dt", 0.01);
  const double t_final = cfg.number("sim", "t_final", 20.0);
  const std::size_t record_every = cfg.count("sim", "record_every", 10);
  const double level = cfg.number("thresholds", "crossing_level", 0.5);
  const double t_lo = cfg.number("thresholds", "crossing_min", 4.0);
  const double t_hi = cfg.number("thresholds", "crossing_max", 9.0);
  const double dbl_max = cfg.number("thresholds", "dbl_max", 0.1);
  rep.seeds = cfg.seeds("0..9").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);

  if (!(rep.K > 2.0 * sigma * sigma)) {
    throw config::ConfigError("escape: coupling must exceed 2 sigma^2");
  }
  rep.r_star = positive_root(rep.K, sigma);
  const double lambda1 = fp::linear_rates(rep.K, sigma, 1)[0];
  rep.predicted_crossing = std::log(static_cast<double>(rep.N)) / (2.0 * lambda1);

  // Complete graph with interaction -(K/2) sin: the p = 1/2 normalization
  // in which the stationary family and the rates above are written.
  const graphs::Graph graph = graphs::complete(rep.N);
  const models::ModelSpec model = models::make_kuramoto(rep.K / 2.0, models::DisorderLaw{}, sigma);
  const models::InitialLaw init{models::UniformPhase{}, models::DisorderLaw{}};
  const fp::FourierDensity reference =
      fp::stationary_profile(rep.K, sigma, rep.r_star, 0.0).modes(2 * metrics::kTestHarmonics);

  const std::size_t S = rep.seeds.size();
  rep.crossing.assign(S, kNaN);
  rep.final_r.assign(S, 0.0);
  rep.center.assign(S, 0.0);
  rep.modes.assign(S, 0);
  rep.dbl.assign(S, 0.0);
  for_each_job(S, workers, [&](std::size_t j) {
    const std::uint64_t seed = rep.seeds[j];
    sde::EnsembleState state = sde::sample_initial(init, rep.N, seed);
    sde::SimConfig sim{dt, t_final, seed, record_every, 1};
    std::vector<std::array<double, 3>> series;
    sde::integrate(graph, model, state, sim, [&](std::size_t step, const sde::EnsembleState& s) {
      const auto op = metrics::order_parameter(s.theta);
      if (std::isnan(rep.crossing[j]) && op.r >= level) rep.crossing[j] = s.t;
      if (step % record_every == 0) series.push_back({s.t, op.r, op.psi});
    });
    const auto op = metrics::order_parameter(state.theta);
    rep.final_r[j] = op.r;
    rep.center[j] = op.psi;
    rep.modes[j] = stats::phase_modality(state.theta);
    const auto centered = wrapped_shift(state.theta, op.psi);
    rep.dbl[j] = metrics::bl_distance_estimate(
        metrics::empirical_measure(centered, state.atom, 1), reference);
    if (dir) {
      csv::Writer w(*dir / ("order_seed" + std::to_string(seed) + ".csv"), {"t", "r", "psi"});
      for (const auto& row : series) w.row(row);
      write_histogram(*dir / ("histogram_seed" + std::to_string(seed) + ".csv"), state.theta);
    }
  });

  std::vector<double> crossed;
  for (double c : rep.crossing) crossed.push_back(std::isnan(c) ? t_final + dt : c);
  rep.median_crossing = stats::median(crossed);
  add(rep, "median_crossing_in_range", rep.median_crossing >= t_lo && rep.median_crossing <= t_hi,
      "median " + fmt(rep.median_crossing) + " in [" + fmt(t_lo) + ", " + fmt(t_hi) +
          "], reference " + fmt(rep.predicted_crossing));
  const bool unimodal = std::all_of(rep.modes.begin(), rep.modes.end(), [](auto m) { return m == 1; });
  add(rep, "final_unimodal", unimodal, "smoothed 64-bin histogram has one mode for every seed");
  const double worst = *std::max_element(rep.dbl.begin(), rep.dbl.end());
  add(rep, "final_close_to_stationary", worst <= dbl_max,
      "max d_bL estimate " + fmt(worst) + " <= " + fmt(dbl_max));
  if (S >= 20) {
    std::vector<double> u;
    for (double c : rep.center) u.push_back((c + kPi) / (2.0 * kPi));
    rep.center_test = stats::kuiper_uniform(u);
    add(rep, "centers_uniform", rep.center_test->passes(),
        "Kuiper " + fmt(rep.center_test->statistic) + " < " + fmt(rep.center_test->critical));
  }

  if (dir) {
    csv::Writer w(*dir / "escape.csv", {"seed", "crossing_time", "final_r", "psi", "modes", "dbl_estimate"});
    for (std::size_t j = 0; j < S; ++j) {
      w << rep.seeds[j] << rep.crossing[j] << rep.final_r[j] << rep.center[j] << rep.modes[j]
        << rep.dbl[j];
      w.end_row();
    }
    const auto profile = fp::stationary_profile(rep.K, sigma, rep.r_star, 0.0);
    csv::Writer pw(*dir / "profile.csv", {"theta", "q"});
    for (std::size_t i = 0; i < 512; ++i) {
      const double th = 2.0 * kPi * static_cast<double>(i) / 512.0;
      pw << th << profile.density(th);
      pw.end_row();
    }
  }
  write_report(dir, cfg, rep,
               {{"N", rep.N},
                {"K", rep.K},
                {"r_star", rep.r_star},
                {"median_crossing", rep.median_crossing},
                {"predicted_crossing", rep.predicted_crossing}});
  return rep;
}

// ---------------------------------------------------------------------------

TwoCliqueReport run_two_clique(const config::Config& cfg) {
  check_kind(cfg, "two_clique");
  TwoCliqueReport rep;
  rep.experiment = "two_clique";
  rep.clique_size = cfg.count("graph", "n", 500);
  rep.K = cfg.number("model", "coupling", 4.0);
  const double sigma = cfg.number("model", "sigma", 1.0);
  const double dt = cfg.number("sim", "dt", 0.01);
  const double t_final = cfg.number("sim", "t_final", 20.0);
  const std::size_t record_every = cfg.count("sim", "record_every", 10);
  const double fraction = cfg.number("thresholds", "clique_r_fraction", 0.9);
  const double need_success = cfg.number("thresholds", "clique_success", 0.95);
  const double need_below = cfg.number("thresholds", "global_below", 0.95);
  rep.seeds = cfg.seeds("0..49").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);

  if (!(rep.K > 2.0 * sigma * sigma)) {
    throw config::ConfigError("two_clique: coupling must exceed 2 sigma^2");
  }
  rep.r_star = positive_root(rep.K, sigma);

  // alpha = 1 over 2N vertices: each clique sees -(K/2) sin against its own
  // mean, the same within-clique dynamics as the complete-graph run.
  const graphs::Graph graph = graphs::two_clique(rep.clique_size);
  const models::ModelSpec model = models::make_kuramoto(rep.K, models::DisorderLaw{}, sigma);
  const models::InitialLaw init{models::UniformPhase{}, models::DisorderLaw{}};
  const graphs::Block first{0, rep.clique_size};
  const graphs::Block second{rep.clique_size, 2 * rep.clique_size};

  const std::size_t S = rep.seeds.size();
  rep.r_first.assign(S, 0.0);
  rep.r_second.assign(S, 0.0);
  rep.r_global.assign(S, 0.0);
  rep.gap.assign(S, 0.0);
  rep.modes.assign(S, 0);
  for_each_job(S, workers, [&](std::size_t j) {
    const std::uint64_t seed = rep.seeds[j];
    sde::EnsembleState state = sde::sample_initial(init, graph.size(), seed);
    sde::SimConfig sim{dt, t_final, seed, record_every, 1};
    std::vector<std::array<double, 6>> series;
    sde::integrate(graph, model, state, sim, [&](std::size_t step, const sde::EnsembleState& s) {
      if (!dir || step % record_every != 0) return;
      const auto a = metrics::order_parameter(s, first);
      const auto b = metrics::order_parameter(s, second);
      series.push_back({s.t, a.r, a.psi, b.r, b.psi, metrics::order_parameter(s).r});
    });
    const auto a = metrics::order_parameter(state, first);
    const auto b = metrics::order_parameter(state, second);
    rep.r_first[j] = a.r;
    rep.r_second[j] = b.r;
    rep.r_global[j] = metrics::order_parameter(state).r;
    rep.gap[j] = angular_gap(a.psi, b.psi);
    rep.modes[j] = stats::phase_modality(state.theta);
    if (dir) {
      csv::Writer w(*dir / ("cliques_seed" + std::to_string(seed) + ".csv"),
                    {"t", "r_1", "psi_1", "r_2", "psi_2", "r"});
      for (const auto& row : series) w.row(row);
    }
  });

  std::size_t success = 0;
  std::size_t below = 0;
  std::vector<double> unit_gap;
  for (std::size_t j = 0; j < S; ++j) {
    if (rep.r_first[j] >= fraction * rep.r_star && rep.r_second[j] >= fraction * rep.r_star) ++success;
    if (rep.r_global[j] < 0.5 * (rep.r_first[j] + rep.r_second[j])) ++below;
    unit_gap.push_back(rep.gap[j] / kPi);
  }
  rep.success_fraction = static_cast<double>(success) / static_cast<double>(S);
  rep.global_below_fraction = static_cast<double>(below) / static_cast<double>(S);
  rep.gap_test = stats::ks_uniform(unit_gap);
  add(rep, "cliques_synchronized", rep.success_fraction >= need_success,
      fmt(rep.success_fraction) + " of seeds have both clique r >= " + fmt(fraction) + " r* (r* = " +
          fmt(rep.r_star) + ")");
  add(rep, "center_gap_uniform", rep.gap_test.passes(),
      "KS on [0, pi] " + fmt(rep.gap_test.statistic) + " < " + fmt(rep.gap_test.critical));
  add(rep, "global_below_clique", rep.global_below_fraction >= need_below,
      fmt(rep.global_below_fraction) + " of seeds have global r below the clique mean r");

  if (dir) {
    csv::Writer w(*dir / "two_clique.csv", {"seed", "r_1", "r_2", "r", "gap", "modes"});
    for (std::size_t j = 0; j < S; ++j) {
      w << rep.seeds[j] << rep.r_first[j] << rep.r_second[j] << rep.r_global[j] << rep.gap[j]
        << rep.modes[j];
      w.end_row();
    }
  }
  write_report(dir, cfg, rep,
               {{"clique_size", rep.clique_size},
                {"K", rep.K},
                {"r_star", rep.r_star},
                {"success_fraction", rep.success_fraction},
                {"global_below_fraction", rep.global_below_fraction},
                {"gap_statistic", rep.gap_test.statistic}});
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct CoupledBatch {
  metrics::UCurve u;
  std::vector<double> dbl;
  std::vector<sde::CoupledTrajectory> runs;
};

// Coupled runs for every seed on one graph, with u_t and the seed-mean
// d_bL estimate per recorded time.
CoupledBatch coupled_batch(const graphs::Graph& graph, const models::ModelSpec& model,
                           const models::InitialLaw& init, double p, double dt, double t_final,
                           std::size_t record_every, std::size_t k_max,
                           const std::vector<std::uint64_t>& seeds, int workers, bool keep_runs) {
  const fp::DensityTrajectory limit =
      fp::evolve_density(model, fp::initial_density(init, k_max), p, dt, t_final, 1);
  const std::size_t S = seeds.size();
  std::vector<sde::CoupledTrajectory> runs(S);
  std::vector<std::vector<double>> dbl(S);
  for_each_job(S, workers, [&](std::size_t j) {
    const auto state = sde::sample_initial(init, graph.size(), seeds[j]);
    runs[j] = sde::simulate_coupled(graph, model, state, {dt, t_final, seeds[j], record_every, 1},
                                    limit, p);
    for (std::size_t r = 0; r < runs[j].times.size(); ++r) {
      const std::size_t at = nearest_index(limit.times, runs[j].times[r]);
      const auto emp = metrics::empirical_measure(runs[j].theta[r], runs[j].atom,
                                                  model.disorder.size());
      dbl[j].push_back(metrics::bl_distance_estimate(emp, limit.states[at], &model.disorder));
    }
    if (!keep_runs) {
      // Only the running sup is needed downstream.
      runs[j].theta.clear();
      runs[j].theta_bar.clear();
    }
  });
  CoupledBatch batch;
  batch.u = metrics::coupling_error(runs);
  batch.dbl.assign(batch.u.times.size(), 0.0);
  for (const auto& d : dbl) {
    for (std::size_t r = 0; r < d.size(); ++r) batch.dbl[r] += d[r] / static_cast<double>(S);
  }
  if (keep_runs) batch.runs = std::move(runs);
  return batch;
}

}  // namespace

double ProximityRow::u_at(double t) const { return u[nearest_index(times, t)]; }

ProximityReport run_proximity_sweep(const config::Config& cfg) {
  check_kind(cfg, "proximity_sweep");
  ProximityReport rep;
  rep.experiment = "proximity_sweep";
  rep.family = cfg.text("graph", "family", "complete");
  const auto sizes = cfg.numbers("graph", "sizes", "100,400,1600");
  const models::ModelSpec model = build_model(cfg, 1.0);
  const models::InitialLaw init = build_initial(cfg, model.disorder);
  const double dt = cfg.number("sim", "dt", 0.01);
  const double t_final = cfg.number("sim", "t_final", 2.0);
  const std::size_t record_every = cfg.count("sim", "record_every", 10);
  rep.checkpoints = cfg.numbers("sim", "checkpoints", "1,2");
  const std::size_t k_max = cfg.count("fokker_planck", "k_max", 64);
  const double low = cfg.number("thresholds", "ratio_low", 0.625);
  const double high = cfg.number("thresholds", "ratio_high", 1.5);
  const auto seeds = cfg.seeds("0..49").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);
  rep.C = cfg.number("model", "bound_rate", models::model_constants(model).C);
  if (!(rep.C > 0.0)) throw config::ConfigError("model.bound_rate must be positive");
  if (sizes.empty()) throw config::ConfigError("graph.sizes must list at least one size");

  for (double size : sizes) {
    if (!(size >= 2.0) || size != std::floor(size)) throw config::ConfigError("graph.sizes: bad size");
    const auto n = static_cast<std::size_t>(size);
    const GraphChoice choice = build_graph(cfg, n);
    const auto degrees = graphs::degree_stats(choice.graph, choice.p);
    const auto bound = metrics::bound_curve(degrees, rep.C);
    const auto batch = coupled_batch(choice.graph, model, init, choice.p, dt, t_final, record_every,
                                     k_max, seeds, workers, false);
    ProximityRow row;
    row.n = n;
    row.alpha = choice.graph.alpha();
    row.p = choice.p;
    row.b_n = degrees.b_n;
    row.prefactor = bound.prefactor;
    row.times = batch.u.times;
    row.u = batch.u.u;
    for (double t : row.times) row.bound.push_back(bound(t));
    row.dbl = batch.dbl;
    row.sup_dbl = *std::max_element(row.dbl.begin(), row.dbl.end());
    if (dir) {
      csv::Writer w(*dir / ("u_n" + std::to_string(n) + ".csv"), {"t", "u_t", "bound(t)"});
      for (std::size_t r = 0; r < row.times.size(); ++r) {
        w << row.times[r] << row.u[r] << row.bound[r];
        w.end_row();
      }
      csv::Writer d(*dir / ("dbl_n" + std::to_string(n) + ".csv"), {"t", "dbl_estimate"});
      for (std::size_t r = 0; r < row.times.size(); ++r) {
        d << row.times[r] << row.dbl[r];
        d.end_row();
      }
    }
    rep.rows.push_back(std::move(row));
  }

  bool below = true;
  std::string where = "all recorded times";
  for (const auto& row : rep.rows) {
    for (std::size_t r = 0; r < row.times.size(); ++r) {
      if (row.u[r] > row.bound[r]) {
        if (below) where = "n = " + std::to_string(row.n) + ", t = " + fmt(row.times[r]);
        below = false;
      }
    }
  }
  add(rep, "u_below_bound", below, below ? "u_t <= bound(t) at all recorded times" : "exceeded at " + where);

  const bool zero_coupling = model.kernel.coupling == 0.0;
  if (zero_coupling) {
    bool all_zero = true;
    for (const auto& row : rep.rows)
      for (double u : row.u) all_zero = all_zero && u == 0.0;
    add(rep, "zero_coupling_control", all_zero, "u_t identically 0 without interaction");
  } else if (rep.family == "complete" && rep.rows.size() >= 2) {
    for (double t : rep.checkpoints) {
      for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = rep.rows[i + 1];
        const double observed = a.u_at(t) / b.u_at(t);
        const double predicted = a.prefactor / b.prefactor;
        add(rep, "u_ratio_t" + fmt(t) + "_n" + std::to_string(a.n) + "_" + std::to_string(b.n),
            observed >= low * predicted && observed <= high * predicted,
            "ratio " + fmt(observed) + " in [" + fmt(low * predicted) + ", " + fmt(high * predicted) +
                "], predicted " + fmt(predicted));
      }
    }
  }
  if (rep.family == "er_dense" || rep.family == "er_vanishing") {
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      decreasing = decreasing && rep.rows[i + 1].b_n < rep.rows[i].b_n;
    }
    add(rep, "b_n_decreasing", decreasing, "b_n strictly decreasing in n");
  }

  if (dir) {
    std::vector<std::string> header{"n", "alpha", "p", "b_n", "prefactor"};
    for (double t : rep.checkpoints) header.push_back("u_t" + fmt(t));
    for (double t : rep.checkpoints) header.push_back("bound_t" + fmt(t));
    header.push_back("sup_dbl");
    csv::Writer w(*dir / "proximity.csv", header);
    for (const auto& row : rep.rows) {
      w << row.n << row.alpha << row.p << row.b_n << row.prefactor;
      for (double t : rep.checkpoints) w << row.u_at(t);
      for (double t : rep.checkpoints) w << row.bound[nearest_index(row.times, t)];
      w << row.sup_dbl;
      w.end_row();
    }
  }
  json summary{{"family", rep.family}, {"C", rep.C}};
  for (const auto& row : rep.rows) {
    summary["rows"].push_back({{"n", row.n}, {"b_n", row.b_n}, {"sup_dbl", row.sup_dbl}});
  }
  write_report(dir, cfg, rep, summary);
  return rep;
}

// ---------------------------------------------------------------------------

DegreeTailsReport run_degree_tails(const config::Config& cfg) {
  check_kind(cfg, "degree_tails");
  DegreeTailsReport rep;
  rep.experiment = "degree_tails";
  const auto flat = cfg.numbers("degree_tails", "rows", "100,0.3,1000,0.3,10000,0.3");
  const std::size_t draws = cfg.count("degree_tails", "draws", 20);
  const double eps = cfg.number("degree_tails", "epsilon", 0.05);
  const bool symmetric = cfg.flag("degree_tails", "symmetric", true);
  const auto base_seed = static_cast<std::uint64_t>(cfg.integer("graph", "seed", 1));
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);
  if (flat.size() % 2 != 0 || flat.empty()) {
    throw config::ConfigError("degree_tails.rows: expected pairs n,q");
  }
  if (draws == 0) throw config::ConfigError("degree_tails.draws must be >= 1");

  for (std::size_t i = 0; i < flat.size(); i += 2) {
    DegreeTailRow row;
    if (!(flat[i] >= 2.0) || flat[i] != std::floor(flat[i])) {
      throw config::ConfigError("degree_tails.rows: bad n");
    }
    row.n = static_cast<std::size_t>(flat[i]);
    row.q = flat[i + 1];
    if (!(row.q > 0.0 && row.q < 1.0)) throw config::ConfigError("degree_tails.rows: q must lie in (0, 1)");
    const double n = static_cast<double>(row.n);
    row.epsilon = eps;
    row.scale = std::sqrt(std::log(n) / (n * row.q));
    row.sparse = n * row.q < std::log(n);
    if (row.sparse) {
      row.note = "unsupported: expected degree n q = " + fmt(n * row.q) +
                 " is below log n; degrees do not concentrate in this regime";
      rep.rows.push_back(std::move(row));
      continue;
    }
    // Degrees count the n - 1 off-diagonal draws of a row.
    if (row.q + eps < 1.0) row.upper = graphs::binomial_tail(row.n - 1, row.q, eps);
    if (row.q - eps > 0.0) row.lower = graphs::binomial_tail(row.n - 1, row.q, -eps);
    row.union_bound = std::min(1.0, n * (row.upper.chernoff_bound + row.lower.chernoff_bound));
    row.b_samples.assign(draws, 0.0);
    for (std::size_t d = 0; d < draws; ++d) {
      const std::uint64_t seed = base_seed * 0x9E3779B97F4A7C15ULL + row.n * 1000003ULL + d;
      const auto g = graphs::erdos_renyi(row.n, row.q, symmetric, seed, workers);
      row.b_samples[d] = graphs::degree_stats(g, row.q).b_n;
    }
    row.b_mean = stats::mean(row.b_samples);
    row.b_max = *std::max_element(row.b_samples.begin(), row.b_samples.end());
    rep.rows.push_back(std::move(row));
  }

  // Exact tails never exceed the Chernoff bound on a small-n grid.
  for (std::size_t n = 1; n <= 30; ++n) {
    for (int qi = 1; qi <= 9; ++qi) {
      const double q = qi / 10.0;
      for (double e : {-0.3, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.3}) {
        if (!(q + e > 0.0 && q + e < 1.0)) continue;
        const auto tail = graphs::binomial_tail(n, q, e);
        ++rep.grid_points;
        if (*tail.exact_tail > tail.chernoff_bound * (1.0 + 1e-12)) ++rep.grid_violations;
      }
    }
  }
  add(rep, "exact_tail_below_chernoff", rep.grid_violations == 0,
      std::to_string(rep.grid_violations) + " violations on " + std::to_string(rep.grid_points) +
          " grid points with n <= 30");

  // b_n strictly decreasing in n within each q.
  std::vector<double> qs;
  for (const auto& row : rep.rows)
    if (!row.sparse && std::find(qs.begin(), qs.end(), row.q) == qs.end()) qs.push_back(row.q);
  for (double q : qs) {
    std::vector<const DegreeTailRow*> group;
    for (const auto& row : rep.rows)
      if (!row.sparse && row.q == q) group.push_back(&row);
    std::sort(group.begin(), group.end(), [](auto a, auto b) { return a->n < b->n; });
    if (group.size() < 2) continue;
    bool decreasing = true;
    std::string detail = "mean b_n:";
    for (std::size_t i = 0; i < group.size(); ++i) {
      detail += " " + fmt(group[i]->b_mean);
      if (i > 0) decreasing = decreasing && group[i]->b_mean < group[i - 1]->b_mean;
    }
    add(rep, "b_n_decreasing_q" + fmt(q), decreasing, detail);
  }

  if (dir) {
    csv::Writer w(*dir / "degree_tails.csv",
                  {"n", "q", "sparse", "b_mean", "b_max", "scale", "epsilon", "chernoff_upper",
                   "exact_upper", "chernoff_lower", "exact_lower", "union_bound"});
    for (const auto& row : rep.rows) {
      auto opt = [](const std::optional<double>& v) { return v ? *v : kNaN; };
      w << row.n << row.q << (row.sparse ? 1 : 0) << row.b_mean << row.b_max << row.scale
        << row.epsilon << row.upper.chernoff_bound << opt(row.upper.exact_tail)
        << row.lower.chernoff_bound << opt(row.lower.exact_tail) << row.union_bound;
      w.end_row();
    }
    csv::Writer s(*dir / "b_samples.csv", {"n", "q", "draw", "b_n"});
    for (const auto& row : rep.rows) {
      for (std::size_t d = 0; d < row.b_samples.size(); ++d) {
        s << row.n << row.q << d << row.b_samples[d];
        s.end_row();
      }
    }
  }
  json summary;
  for (const auto& row : rep.rows) {
    json r{{"n", row.n}, {"q", row.q}, {"sparse", row.sparse}, {"b_mean", row.b_mean}};
    if (row.sparse) r["note"] = row.note;
    summary["rows"].push_back(r);
  }
  write_report(dir, cfg, rep, summary);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Least-squares slope of log|m_k(t)| against t.
double log_slope(const fp::DensityTrajectory& traj, std::size_t k) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double y = std::log(std::abs(traj.states[i].mode(0, k)));
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    count += 1.0;
  }
  return (count * sty - st * sy) / (count * stt - st * st);
}

}  // namespace

FpRatesReport run_fp_rates(const config::Config& cfg) {
  check_kind(cfg, "fp_rates");
  FpRatesReport rep;
  rep.experiment = "fp_rates";
  rep.K = cfg.number("model", "coupling", 4.0);
  rep.sigma = cfg.number("model", "sigma", 1.0);
  const std::size_t k_max = cfg.count("fokker_planck", "k_max", 64);
  const double dt = cfg.number("fokker_planck", "dt", 0.01);
  const double t_fit = cfg.number("fokker_planck", "t_final", 4.0);
  const double eps = cfg.number("fokker_planck", "perturbation", 1e-4);
  const std::size_t fit_modes = cfg.count("fokker_planck", "fit_modes", 2);
  const auto couplings = cfg.numbers("fokker_planck", "couplings", "1.5,1.9,2.1,3,4");
  const std::size_t profile_points = cfg.count("fokker_planck", "profile_points", 512);
  const double relax_time = cfg.number("fokker_planck", "relax_time", 40.0);
  const auto paths = cfg.count("linearized", "paths", 10000);
  const auto lin_N = cfg.count("linearized", "N", 1000);
  const double lin_t = cfg.number("linearized", "t_final", 6.0);
  const double lin_dt = cfg.number("linearized", "dt", 0.05);
  const double rate_tol = cfg.number("thresholds", "rate_rel_tol", 0.05);
  const double lin_tol = cfg.number("thresholds", "linearized_rel_tol", 0.05);
  const double residual_max = cfg.number("thresholds", "residual_max", 1e-10);
  const auto seeds = cfg.seeds("0..0").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);
  if (fit_modes == 0 || fit_modes > k_max) throw config::ConfigError("fokker_planck.fit_modes out of range");

  // Interaction -(K/2) sin on the complete graph.
  const models::ModelSpec model = models::make_kuramoto(rep.K / 2.0, models::DisorderLaw{}, rep.sigma);
  const auto predicted = fp::linear_rates(rep.K, rep.sigma, fit_modes);
  fp::DensityTrajectory first_run;
  for (std::size_t k = 1; k <= fit_modes; ++k) {
    fp::FourierDensity q0 = fp::FourierDensity::uniform(k_max, {1.0});
    q0.modes[0][k - 1] = eps;
    auto traj = fp::evolve_density(model, q0, 1.0, dt, t_fit, 1);
    RateFit fit{k, log_slope(traj, k), predicted[k - 1], 0.0};
    fit.rel_error = std::abs(fit.fitted - fit.predicted) / std::abs(fit.predicted);
    rep.rates.push_back(fit);
    add(rep, "rate_k" + std::to_string(k), fit.rel_error < rate_tol,
        "fitted " + fmt(fit.fitted) + " vs " + fmt(fit.predicted) + ", relative error " +
            fmt(fit.rel_error));
    if (k == 1) first_run = std::move(traj);
  }

  for (double K : couplings) {
    FixedPointRow row{K, fp::solve_r_fixed_point(K, rep.sigma), 0.0};
    for (double r : row.roots) {
      row.residual = std::max(row.residual, std::abs(fp::self_consistency_map(K, r, rep.sigma) - r));
    }
    const bool super = K > 2.0 * rep.sigma * rep.sigma;
    const bool shape = super ? row.roots.size() == 2 && row.roots[1] > 0.0 : row.roots.size() == 1;
    add(rep, "fixed_points_K" + fmt(K), shape && row.residual < residual_max,
        std::to_string(row.roots.size()) + " roots, residual " + fmt(row.residual));
    rep.fixed_points.push_back(std::move(row));
  }

  if (rep.K > 2.0 * rep.sigma * rep.sigma) {
    rep.r_star = positive_root(rep.K, rep.sigma);
    fp::FourierDensity q0 = fp::FourierDensity::uniform(k_max, {1.0});
    q0.modes[0][0] = 1e-3;
    const auto relaxed = fp::evolve_density(model, q0, 1.0, dt, relax_time, 100);
    rep.relaxed_r = std::abs(relaxed.states.back().mode(0, 1));
  }

  // Linearized fluctuations of the first mode around the flat state.
  if (paths > 0 && rep.K != 2.0) {
    std::vector<fp::LinearizedPath> runs(paths);
    const std::uint64_t base = seeds.front();
    for_each_job(paths, workers, [&](std::size_t i) {
      fp::LinearizedConfig lc;
      lc.N = lin_N;
      lc.K = rep.K;
      lc.t_final = lin_t;
      lc.dt = lin_dt;
      lc.seed = base * 1000003ULL + i;
      runs[i] = fp::simulate_linearized(lc);
    });
    rep.lin_times = runs.front().times;
    rep.lin_mean_r2.assign(rep.lin_times.size(), 0.0);
    for (const auto& path : runs)
      for (std::size_t s = 0; s < path.r.size(); ++s) rep.lin_mean_r2[s] += path.r[s] * path.r[s];
    for (std::size_t s = 0; s < rep.lin_times.size(); ++s) {
      rep.lin_mean_r2[s] /= static_cast<double>(paths);
      rep.lin_predicted.push_back(fp::predicted_r_squared(lin_N, rep.K, rep.lin_times[s]));
      rep.lin_max_rel_error = std::max(
          rep.lin_max_rel_error, std::abs(rep.lin_mean_r2[s] / rep.lin_predicted[s] - 1.0));
    }
    add(rep, "linearized_r_squared", rep.lin_max_rel_error < lin_tol,
        "max relative error " + fmt(rep.lin_max_rel_error) + " over t in [0, " + fmt(lin_t) + "]");
  }

  if (dir) {
    csv::Writer w(*dir / "rates.csv", {"k", "fitted", "predicted", "rel_error"});
    for (const auto& f : rep.rates) {
      w << f.k << f.fitted << f.predicted << f.rel_error;
      w.end_row();
    }
    csv::Writer d(*dir / "density.csv", {"t", "atom", "k", "c_k", "s_k"});
    for (std::size_t i = 0; i < first_run.times.size(); i += 10) {
      const auto& q = first_run.states[i];
      for (std::size_t k = 1; k <= q.k_max; ++k) {
        d << first_run.times[i] << 0 << k << q.c(0, k) << q.s(0, k);
        d.end_row();
      }
    }
    csv::Writer f(*dir / "fixed_points.csv", {"K", "root", "residual"});
    for (const auto& row : rep.fixed_points) {
      for (double r : row.roots) {
        f << row.K << r << std::abs(fp::self_consistency_map(row.K, r, rep.sigma) - r);
        f.end_row();
      }
    }
    if (rep.r_star > 0.0) {
      const auto profile = fp::stationary_profile(rep.K, rep.sigma, rep.r_star, 0.0);
      csv::Writer p(*dir / "profile.csv", {"theta", "q"});
      for (std::size_t i = 0; i < profile_points; ++i) {
        const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(profile_points);
        p << th << profile.density(th);
        p.end_row();
      }
    }
    if (!rep.lin_times.empty()) {
      csv::Writer l(*dir / "linearized.csv", {"t", "mean_r_squared", "predicted"});
      for (std::size_t s = 0; s < rep.lin_times.size(); ++s) {
        l << rep.lin_times[s] << rep.lin_mean_r2[s] << rep.lin_predicted[s];
        l.end_row();
      }
    }
  }
  json summary{{"K", rep.K}, {"sigma", rep.sigma}, {"r_star", rep.r_star}, {"relaxed_r", rep.relaxed_r},
               {"linearized_max_rel_error", rep.lin_max_rel_error}};
  for (const auto& f : rep.rates) {
    summary["rates"].push_back({{"k", f.k}, {"fitted", f.fitted}, {"predicted", f.predicted}});
  }
  write_report(dir, cfg, rep, summary);
  return rep;
}

// ---------------------------------------------------------------------------

Report run_simulate(const config::Config& cfg) {
  check_kind(cfg, "simulate");
  Report rep;
  rep.experiment = "simulate";
  const auto choice = build_graph(cfg, cfg.count("graph", "n", 100));
  const auto model = build_model(cfg, 1.0);
  const auto init = build_initial(cfg, model.disorder);
  const double dt = cfg.number("sim", "dt", 0.01);
  const double t_final = cfg.number("sim", "t_final", 1.0);
  const std::size_t record_every = cfg.count("sim", "record_every", 10);
  const auto seeds = cfg.seeds("0..0").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);

  std::vector<char> finite(seeds.size(), 1);
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const auto init_state = sde::sample_initial(init, choice.graph.size(), seeds[j]);
    const auto traj = sde::simulate(choice.graph, model, init_state,
                                    {dt, t_final, seeds[j], record_every, workers});
    for (const auto& s : traj.snapshots)
      for (double t : s.theta) finite[j] = finite[j] && std::isfinite(t);
    if (dir) {
      std::vector<std::string> header{"t"};
      for (std::size_t i = 1; i <= choice.graph.size(); ++i) header.push_back("theta_" + std::to_string(i));
      csv::Writer w(*dir / ("trajectory_seed" + std::to_string(seeds[j]) + ".csv"), header);
      csv::Writer o(*dir / ("order_seed" + std::to_string(seeds[j]) + ".csv"), {"t", "r", "psi"});
      for (const auto& s : traj.snapshots) {
        w << s.t;
        w.row(s.theta);
        const auto op = metrics::order_parameter(s.theta);
        o << s.t << op.r << op.psi;
        o.end_row();
      }
    }
  }
  add(rep, "finite_state", std::all_of(finite.begin(), finite.end(), [](char c) { return c != 0; }),
      "all recorded phases finite");
  write_report(dir, cfg, rep, {{"n", choice.graph.size()}, {"family", choice.family}});
  return rep;
}

Report run_couple(const config::Config& cfg) {
  check_kind(cfg, "couple");
  Report rep;
  rep.experiment = "couple";
  const auto choice = build_graph(cfg, cfg.count("graph", "n", 100));
  const auto model = build_model(cfg, 1.0);
  const auto init = build_initial(cfg, model.disorder);
  const double dt = cfg.number("sim", "dt", 0.01);
  const double t_final = cfg.number("sim", "t_final", 1.0);
  const std::size_t record_every = cfg.count("sim", "record_every", 10);
  const std::size_t k_max = cfg.count("fokker_planck", "k_max", 64);
  const double C = cfg.number("model", "bound_rate", models::model_constants(model).C);
  const auto seeds = cfg.seeds("0..9").list();
  const int workers = workers_of(cfg);
  const auto dir = output_dir(cfg);

  const auto batch = coupled_batch(choice.graph, model, init, choice.p, dt, t_final, record_every,
                                   k_max, seeds, workers, true);
  const auto bound = metrics::bound_curve(graphs::degree_stats(choice.graph, choice.p), C);
  bool below = true;
  for (std::size_t r = 0; r < batch.u.times.size(); ++r) below = below && batch.u.u[r] <= bound(batch.u.times[r]);
  add(rep, "u_below_bound", below, "u_t <= bound(t) with C = " + fmt(C));
  if (dir) {
    for (const auto& run : batch.runs) {
      csv::Writer w(*dir / ("coupled_seed" + std::to_string(run.seed) + ".csv"), {"t", "sup_gap_sq"});
      const auto sup = run.max_running_sup();
      for (std::size_t r = 0; r < run.times.size(); ++r) {
        w << run.times[r] << sup[r];
        w.end_row();
      }
    }
    csv::Writer u(*dir / "u.csv", {"t", "u_t", "bound(t)"});
    csv::Writer d(*dir / "dbl.csv", {"t", "dbl_estimate"});
    for (std::size_t r = 0; r < batch.u.times.size(); ++r) {
      u << batch.u.times[r] << batch.u.u[r] << bound(batch.u.times[r]);
      u.end_row();
      d << batch.u.times[r] << batch.dbl[r];
      d.end_row();
    }
  }
  write_report(dir, cfg, rep,
               {{"n", choice.graph.size()}, {"family", choice.family}, {"C", C},
                {"prefactor", bound.prefactor}});
  return rep;
}

Report run_graph_stats(const config::Config& cfg) {
  check_kind(cfg, "graph_stats");
  Report rep;
  rep.experiment = "graph_stats";
  const auto choice = build_graph(cfg, cfg.count("graph", "n", 100));
  const auto stats = graphs::degree_stats(choice.graph, choice.p);
  const auto dir = output_dir(cfg);

  std::stringstream text;
  graphs::save(choice.graph, text);
  const bool round_trip = graphs::load(text) == choice.graph;
  add(rep, "file_round_trip", round_trip, "graph file reloads to the same adjacency and alpha");
  if (dir) {
    graphs::save(choice.graph, *dir / "graph.txt");
    csv::Writer d(*dir / "degrees.csv", {"vertex", "degree"});
    for (std::size_t i = 0; i < stats.degrees.size(); ++i) {
      d << i + 1 << stats.degrees[i];
      d.end_row();
    }
    csv::Writer s(*dir / "graph_stats.csv", {"n", "edges", "alpha", "p", "b_n", "a_n"});
    s << stats.n << choice.graph.edge_count() << stats.alpha << stats.p << stats.b_n << stats.a_n;
    s.end_row();
  }
  write_report(dir, cfg, rep,
               {{"n", stats.n}, {"family", choice.family}, {"b_n", stats.b_n}, {"a_n", stats.a_n},
                {"edges", choice.graph.edge_count()}});
  return rep;
}

}  // namespace mflab::experiments
