#pragma once

// Reproducible test-image degradation: block occlusion by a resized
// occluder image, random-pixel replacement, and their mixture.

#include <gcrep/image.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace gcrep {

enum class CorruptionKind { occlusion, pixel, mixed };

std::string to_string(CorruptionKind kind);
CorruptionKind parse_corruption_kind(const std::string& text);

/// Id accepted by builtin_occluder().
inline constexpr const char* kBuiltinTexture = "texture";

/// Deterministic 128x128 high-frequency texture used as the default occluder.
const ImageMatrix& builtin_occluder(const std::string& id = kBuiltinTexture);

/// Per-pixel provenance of a corrupted image.
enum Provenance : std::uint8_t { kOriginal = 0, kRandomPixel = 1, kOccluder = 2 };
using ProvenanceMask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Block {
  Eigen::Index top = 0;
  Eigen::Index left = 0;
  Eigen::Index size = 0;

  bool contains(Eigen::Index r, Eigen::Index c) const {
    return r >= top && r < top + size && c >= left && c < left + size;
  }
};

struct CorruptionResult {
  ImageMatrix image;
  ProvenanceMask provenance;
  std::optional<Block> block;
  std::size_t pixels_replaced = 0;
  /// Replaced pixels whose new value happened to equal the old one.
  std::size_t value_collisions = 0;
};

/// Side length z = round(sqrt(rows * cols * level)), halves rounded up.
Eigen::Index occlusion_block_size(Shape shape, double level);

/// Number of pixels replaced by pixel corruption: ceil(level * rows * cols).
std::size_t corrupted_pixel_count(Shape shape, double level);

ImageMatrix occlude(const ImageMatrix& img, double level, const ImageMatrix& occluder,
                    std::uint64_t seed);
CorruptionResult occlude_detail(const ImageMatrix& img, double level,
                                const ImageMatrix& occluder, std::uint64_t seed);

ImageMatrix pixel_corrupt(const ImageMatrix& img, double level, std::uint64_t seed);
CorruptionResult pixel_corrupt_detail(const ImageMatrix& img, double level, std::uint64_t seed);

/// Pixel corruption at `level` followed by occlusion at `level` (or the
/// reverse when pixels_first is false), each with its own derived sub-seed.
ImageMatrix mixed_corrupt(const ImageMatrix& img, double level, const ImageMatrix& occluder,
                          std::uint64_t seed, bool pixels_first = true);
CorruptionResult mixed_corrupt_detail(const ImageMatrix& img, double level,
                                      const ImageMatrix& occluder, std::uint64_t seed,
                                      bool pixels_first = true);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::occlusion;
  double level = 0.0;
  std::uint64_t seed = 0;
  ImageMatrix occluder = builtin_occluder();
  bool pixels_first = true;

  void validate() const;
};

CorruptionResult apply_corruption(const ImageMatrix& img, const CorruptionSpec& spec);

/// Provenance mask as an image: original 0, random pixel 0.5, occluder 1.
ImageMatrix provenance_image(const ProvenanceMask& mask);

}  // namespace gcrep
