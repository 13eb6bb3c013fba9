#pragma once

#include <Eigen/Core>
#include <cstddef>

namespace gcrep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Row-major dense matrix. Images and reshaped error vectors use this layout
/// so that entry (i, j) is element i * cols + j of the flat vector.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Shape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Row-major view of a flat vector as a rows x cols matrix.
inline Eigen::Map<const RowMatrix> as_matrix(const Vector& v, Shape shape) {
  return Eigen::Map<const RowMatrix>(v.data(), shape.rows, shape.cols);
}

/// Flattens a row-major matrix into a vector (raster order).
inline Vector flatten(const RowMatrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

}  // namespace gcrep
