#pragma once

#include <gcrep/image.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gcrep {

struct LabeledDataset {
  std::vector<ImageMatrix> images;
  std::vector<int> labels;
  Shape shape;
  /// Manifest path, or a description of the generator that produced the data.
  std::string source;

  std::size_t size() const { return images.size(); }
  /// Throws InvalidArgument if shapes are mixed or the label list is inconsistent.
  void validate() const;
};

/// Reads a "path,label" CSV manifest; image paths are relative to the
/// manifest's directory. Every image is resized to target_shape when given,
/// otherwise all images must already share one shape.
LabeledDataset load_dataset(const std::filesystem::path& manifest,
                            std::optional<Shape> target_shape = std::nullopt);

/// Writes images as PGM files next to a "path,label" manifest.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir,
                  const std::string& prefix = "img");

struct CorrelationStats {
  double within_class = 0.0;
  double between_class = 0.0;
};

/// Mean pairwise Pearson correlation of same-class and different-class pairs.
CorrelationStats class_correlation_stats(const LabeledDataset& ds);

/// Face-like synthetic classes: each class spans a random rank-3 nonnegative
/// subspace of smooth images; samples add a random illumination gradient and
/// sensor noise (sigma 0.02). Labels run 1..n_classes. Shapes smaller than
/// 8x8 are rejected.
LabeledDataset synthetic_faces(int n_classes, int per_class, Shape shape, std::uint64_t seed);

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Seeded per-class sampling of per_class_train training images; the rest of
/// each class is the test set. Both index lists are ascending.
DatasetSplit split(const LabeledDataset& ds, int per_class_train, std::uint64_t seed);

}  // namespace gcrep
