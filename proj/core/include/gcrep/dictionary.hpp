#pragma once

#include <gcrep/types.hpp>

#include <vector>

namespace gcrep {

/// Column-stacked training matrix. Each column is one training image
/// flattened in raster order and scaled to unit l2 norm.
class Dictionary {
 public:
  /// Takes ownership of raw (unnormalized) columns. Throws InvalidArgument on
  /// empty input, size mismatches, non-finite entries or zero-norm columns.
  Dictionary(Matrix columns, std::vector<int> labels, Shape image_shape);

  const Matrix& columns() const { return columns_; }
  const std::vector<int>& labels() const { return labels_; }
  Shape image_shape() const { return shape_; }
  const Vector& column_norms() const { return column_norms_; }

  Eigen::Index rows() const { return columns_.rows(); }
  Eigen::Index cols() const { return columns_.cols(); }

  /// Distinct class ids in ascending order; position in this list is the
  /// class index used by residual vectors.
  const std::vector<int>& classes() const { return classes_; }
  std::size_t num_classes() const { return classes_.size(); }
  /// Class index (into classes()) of every column.
  const std::vector<std::size_t>& column_class() const { return column_class_; }

 private:
  Matrix columns_;
  std::vector<int> labels_;
  Shape shape_;
  Vector column_norms_;
  std::vector<int> classes_;
  std::vector<std::size_t> column_class_;
};

}  // namespace gcrep
