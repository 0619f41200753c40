#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pco/analysis.hpp"
#include "pco/prc.hpp"
#include "pco/sim.hpp"

namespace pco::experiments {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Scenario outcome: named checks, scalar metrics, and the files written
/// (relative to the scenario output directory). Serialises to JSON with a
/// fixed key order, so equal seeds give byte-identical summaries.
struct Report {
  std::string scenario;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> files;

  bool passed() const;
  void check(std::string name, bool ok, std::string detail = {});
  void metric(std::string name, double value);
  const Check* find_check(const std::string& name) const;
  double find_metric(const std::string& name) const;

  std::string to_json() const;
  void write_json(const std::filesystem::path& path) const;
  std::string to_text() const;
};

/// Configuration template plus sweep and randomisation settings.
struct Scenario {
  std::string name;
  SimConfig base;
  std::vector<double> sweep;
  std::size_t random_starts = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> expected;
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Initial condition of the nominal example.
PhaseVector fig2_start();
/// Shared initial condition of the perturbed example.
PhaseVector perturbed_start();

Scenario fig2_scenario();
Scenario perturbed_scenario();

/// Independent stream seed for run `index` of a scenario.
std::uint64_t derive_seed(std::uint64_t scenario_seed, std::uint64_t index);

/// Uniform draw on [0, 2pi]^n, redrawn while it falls in the bad set.
PhaseVector random_start(std::size_t n, std::mt19937_64& rng);

using PrcFactory = std::function<PhaseResponse(std::size_t n)>;

struct ConvergenceOptions {
  std::vector<std::size_t> ns{3};
  std::size_t runs_per_n = 100;
  std::uint64_t seed = kDefaultSeed;
  /// Random starts need up to ~200 s at n = 8; the stop rule ends runs early.
  double horizon = 400.0;
  double v_target = 1e-6;
  double monotone_tol = 1e-9;
  double min_dwell_floor = 1e-6;
  PrcFactory prc = [](std::size_t n) { return prc::standard(n); };
  bool allow_invalid_prc = false;
  bool write_csv = true;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

struct RunSummary {
  std::size_t n = 0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  PhaseVector x0;
  Termination termination = Termination::Horizon;
  std::size_t jumps = 0;
  double terminal_v = 0.0;
  double terminal_t = 0.0;
  bool monotone = false;
  double worst_jump_dv = 0.0;
  double min_jump_geodesic = 0.0;
  double min_dwell = 0.0;
  bool vtilde_increase = false;
  std::string file;
};

/// Seeded random starts outside the bad set, one simulation each. Checks
/// convergence, V monotonicity, distinct phases at every jump sample, and the
/// dwell-time floor.
Report run_convergence_corpus(const std::filesystem::path& out_dir, const ConvergenceOptions& opts,
                              std::vector<RunSummary>* runs = nullptr);

struct Fig2Options {
  std::size_t corpus_runs = 100;
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 0;
};

/// Nominal example: trajectory, events and V trace CSVs; V monotone and
/// terminal V < 1e-6; plus a seeded corpus of random starts.
Report run_fig2(const std::filesystem::path& out_dir, const Fig2Options& opts = {});

struct Fig3Options {
  std::size_t corpus_runs = 100;
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 0;
};

/// Same trajectory, comparator Vtilde: it must rise across some jump yet end
/// below 1e-3. Also a splay start and the fraction of random starts with a rise.
Report run_fig3(const std::filesystem::path& out_dir, const Fig3Options& opts = {});

struct PerturbedOptions {
  std::vector<double> epsilons{0.03, 0.05};
  double frequency = 0.5;
  double horizon = 140.0;
  double tail_fraction = 0.25;
  double tau = 40.0;
  /// Extra tau values reported as metrics only.
  std::vector<double> probe_taus{5.0, 10.0, 20.0};
  double sample_dt = 0.01;
};

/// Nominal and sinusoidally perturbed runs from the shared start: tail
/// statistic S(eps) strictly increasing with S(0) < 1e-6, and closeness
/// to the nominal arc growing with eps.
Report run_perturbed(const std::filesystem::path& out_dir, const PerturbedOptions& opts = {});

struct CorpusOptions {
  std::size_t geometry_samples = 100000;
  std::size_t oracle_samples = 10000;
  std::size_t splay_points = 1000;
  std::size_t jump_samples = 10000;
  std::size_t sim_runs = 100;
  std::size_t n_min = 2;
  std::size_t n_max = 8;
  std::vector<std::size_t> sim_ns{2, 3, 5};
  std::uint64_t seed = kDefaultSeed;
  PrcFactory prc = [](std::size_t n) { return prc::standard(n); };
  bool allow_invalid_prc = false;
  bool write_csv = false;
  std::size_t threads = 0;
};

/// Geometry, model and simulation invariants at the configured sample counts.
/// Failing checks carry the witness input in their detail.
Report run_property_corpus(const std::filesystem::path& out_dir, const CorpusOptions& opts = {});

}  // namespace pco::experiments
