#pragma once

// Experiment description read from a flat INI-style file:
//
//   [section]
//   key = value        # comments start with '#' or ';'
//
// Unknown sections or keys are errors reported with file:line.

#include <gcrep/corruption.hpp>
#include <gcrep/solver.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gcrep {

struct SyntheticSpec {
  int classes = 10;
  int per_class = 10;
  Shape shape{24, 21};
  std::uint64_t seed = 42;
};

struct Variant {
  WeightRule weight = WeightRule::gc;
  RankRule rank = RankRule::gc;
  /// "<weight>+<rank>", e.g. "gc+gc".
  std::string name() const;
};

struct ExperimentConfig {
  // [dataset]
  std::optional<std::filesystem::path> manifest;  ///< unset means synthetic
  std::optional<Shape> target_shape;
  SyntheticSpec synthetic;
  // [split]
  int train_per_class = 5;
  std::optional<std::uint64_t> split_seed;
  // [corruption]
  CorruptionKind corruption = CorruptionKind::occlusion;
  std::vector<double> levels{0.0};
  std::string occluder = kBuiltinTexture;  ///< builtin id or PGM path
  bool pixels_first = true;
  // [solver]
  SolverConfig solver;
  // [methods]
  std::vector<WeightRule> weight_rules{WeightRule::gc};
  std::vector<RankRule> rank_rules{RankRule::gc};
  // [output]
  std::filesystem::path output_dir = "gcrep-out";
  bool overwrite = false;
  std::vector<std::size_t> trace_samples;
  std::vector<std::size_t> weight_map_samples;
  // [run]
  std::uint64_t seed = 42;
  unsigned workers = 1;

  /// Weight-rule x rank-rule grid, weight rule varying slowest.
  std::vector<Variant> variants() const;
  /// Throws InvalidArgument when levels are not strictly increasing in [0, 1)
  /// or other fields are out of range.
  void validate() const;
};

/// Parses config text; `origin` names the source in error messages and
/// relative data paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Serializes a config in the same format (used to archive runs).
std::string format_experiment_config(const ExperimentConfig& config);

}  // namespace gcrep
