#pragma once

// Corruption-level sweeps over a grid of weight/rank rules, plus the small
// CSV/PGM emitters used for figures.

#include <gcrep/correntropy.hpp>
#include <gcrep/experiment_config.hpp>
#include <gcrep/solver.hpp>

#include <atomic>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

namespace gcrep {

struct RunOptions {
  std::optional<unsigned> workers;  ///< overrides [run] workers
  std::optional<bool> overwrite;    ///< overrides [output] overwrite
  std::optional<std::filesystem::path> output_dir;
  const std::atomic<bool>* cancel = nullptr;
  std::ostream* log = nullptr;  ///< progress lines, in addition to experiment.log
};

struct RunResult {
  bool complete = true;
  std::filesystem::path output_dir;
  std::vector<Variant> variants;
  std::vector<double> levels;  ///< only the levels that finished
  /// accuracy[level][variant], in percent.
  std::vector<std::vector<double>> accuracy;
};

/// Runs the sweep and writes into the output directory:
///   accuracy.csv          level x variant accuracy (%)
///   records.csv           one row per (level, variant, sample)
///   timing.csv            level x variant mean wall time per sample (s)
///   timing_records.csv    per-sample wall times
///   methods.txt           variant names, one per line
///   config.ini            the effective configuration
///   experiment.log        block sizes, pixel counts and warnings
///   traces/, weights/, corrupted/  per-sample artifacts for requested ids
/// Everything except the timing files and the log is a pure function of the
/// configuration. An INCOMPLETE marker exists until the run finishes; on
/// cancellation the levels completed so far remain on disk.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Min-max normalized weight image; a constant map becomes 0.5 everywhere.
ImageMatrix weight_map_image(const Vector& w, Shape shape);
void emit_weight_map(const Vector& w, Shape shape, const std::filesystem::path& path);

/// Columns: sigma, true_rank (indicator sigma > 0), gc_normalized, nuclear,
/// logsum (log(1 + sigma/eps) / log(1 + 1/eps)).
void emit_rank_curves(const std::vector<double>& sigma, const GcParams& params, double logsum_eps,
                      const std::filesystem::path& path);

/// GGD density over e = -3..3 in steps of 0.01 for each alpha at fixed beta.
void emit_weight_curves(const std::vector<double>& alphas, double beta,
                        const std::filesystem::path& path);

/// Trace rows: iteration, r1, r2, eps, kkt_a..kkt_e, surrogate.
void write_trace_csv(const std::vector<IterationRecord>& trace, const std::filesystem::path& path);

}  // namespace gcrep
