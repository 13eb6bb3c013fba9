#pragma once

// Sparse-representation classification: solve for the coefficients of a query
// over the whole dictionary, then assign the class whose columns alone give
// the smallest weighted reconstruction residual.

#include <gcrep/dictionary.hpp>
#include <gcrep/image.hpp>
#include <gcrep/solver.hpp>

#include <atomic>
#include <string>
#include <vector>

namespace gcrep {

/// Flattens (raster order), stacks and l2-normalizes the training images.
Dictionary build_dictionary(const std::vector<ImageMatrix>& images, const std::vector<int>& labels);

/// e_i = || sqrt(w) .* (y - D k_i(x)) ||^2 for every class, where k_i keeps
/// only class i's coefficients. Ordered as dictionary.classes().
Vector class_residuals(const Vector& y, const Dictionary& dictionary, const Vector& x_star,
                       const Vector& w_star);

struct Identification {
  int label = 0;
  std::size_t class_index = 0;
  Solution solution;
  Vector residuals;
  /// Another class's residual was within 1e-12 (relative to max(1, min)) of
  /// the minimum; the lowest class index among them won.
  bool tie = false;
};

/// Argmin over classes; the lowest class index within the tie tolerance wins.
std::size_t argmin_class(const Vector& residuals, bool* tie = nullptr);

/// y / ||y||_2, putting queries on the same scale as the unit dictionary
/// columns; a zero vector is returned unchanged.
Vector normalize_query(const Vector& y);

/// Solves for the normalized query and classifies it; residuals refer to the
/// normalized query.
Identification identify(const Vector& y, const Dictionary& dictionary, const SolverContext& ctx,
                        const SolverConfig& config);
Identification identify(const Vector& y, const Dictionary& dictionary, const SolverConfig& config);

struct TestSample {
  Vector y;
  int label = 0;
};

struct SampleRecord {
  std::size_t sample_id = 0;
  int true_label = 0;
  int predicted_label = 0;
  int iterations = 0;
  double final_eps = 0.0;
  double wall_ms = 0.0;
  Vector residuals;
  bool tie = false;
  bool failed = false;
  std::string error;
  bool correct() const { return !failed && predicted_label == true_label; }
};

struct Evaluation {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<SampleRecord> records;
  /// Solutions kept for the sample ids requested in EvaluateOptions::keep_solutions.
  std::vector<std::pair<std::size_t, Solution>> kept;
  /// False when cancelled before every sample was processed.
  bool complete = true;
};

struct EvaluateOptions {
  unsigned workers = 1;
  std::vector<std::size_t> keep_solutions;
  /// When set and raised, workers stop taking new samples and the result is
  /// marked incomplete.
  const std::atomic<bool>* cancel = nullptr;
};

/// Runs identify on every sample over a worker pool. Results are stored by
/// sample index, so they do not depend on the worker count. Solver failures
/// count as misclassifications and are flagged in the record.
Evaluation evaluate(const std::vector<TestSample>& test, const Dictionary& dictionary,
                    const SolverConfig& config, const EvaluateOptions& options = {});

}  // namespace gcrep
