#pragma once

#include <gcrep/types.hpp>

#include <filesystem>

namespace gcrep {

/// Grayscale image with intensities normalized to [0, 1], stored row-major.
class ImageMatrix {
 public:
  ImageMatrix() = default;
  ImageMatrix(Eigen::Index rows, Eigen::Index cols, double fill = 0.0)
      : pixels_(RowMatrix::Constant(rows, cols, fill)) {}
  explicit ImageMatrix(RowMatrix pixels) : pixels_(std::move(pixels)) {}

  static ImageMatrix from_flat(const Vector& values, Shape shape);

  Shape shape() const { return {pixels_.rows(), pixels_.cols()}; }
  Eigen::Index rows() const { return pixels_.rows(); }
  Eigen::Index cols() const { return pixels_.cols(); }
  Eigen::Index size() const { return pixels_.size(); }

  double operator()(Eigen::Index r, Eigen::Index c) const { return pixels_(r, c); }
  double& operator()(Eigen::Index r, Eigen::Index c) { return pixels_(r, c); }

  const RowMatrix& pixels() const { return pixels_; }
  RowMatrix& pixels() { return pixels_; }

  /// Raster-order copy of the pixels.
  Vector flat() const { return flatten(pixels_); }

  /// Clamps every entry into [0, 1].
  ImageMatrix& clamp();

  friend bool operator==(const ImageMatrix& a, const ImageMatrix& b) {
    return a.shape() == b.shape() && a.pixels_ == b.pixels_;
  }

 private:
  RowMatrix pixels_;
};

/// Reads a binary (P5) or ASCII (P2) PGM with maxval <= 65535. Samples are
/// divided by maxval. Throws IoError on malformed or truncated files.
ImageMatrix load_pgm(const std::filesystem::path& path);

/// Writes "P5\n<w> <h>\n<maxval>\n" followed by round(v * maxval) samples,
/// big-endian 16-bit when maxval > 255. maxval must be 255 or 65535.
void save_pgm(const ImageMatrix& img, const std::filesystem::path& path, int maxval = 255);

/// Bilinear resampling with pixel-center alignment.
ImageMatrix resize_bilinear(const ImageMatrix& img, Shape target);

}  // namespace gcrep
