#include <gcrep/corruption.hpp>
#include <gcrep/error.hpp>
#include <gcrep/random.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace gcrep;

namespace {

ImageMatrix random_image(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  Rng rng(seed);
  return ImageMatrix::from_flat(oracle::random_vector(rng, rows * cols, 0.0, 1.0), Shape{rows, cols});
}

std::size_t diff_count(const ImageMatrix& a, const ImageMatrix& b) {
  return static_cast<std::size_t>((a.pixels().array() != b.pixels().array()).count());
}

std::set<Eigen::Index> diff_positions(const ImageMatrix& a, const ImageMatrix& b) {
  std::set<Eigen::Index> out;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a.pixels().data()[i] != b.pixels().data()[i]) out.insert(i);
  return out;
}

bool in_unit_range(const ImageMatrix& img) {
  return (img.pixels().array() >= 0.0).all() && (img.pixels().array() <= 1.0).all();
}

}  // namespace

TEST(CorruptionSizes, BlockSide) {
  EXPECT_EQ(occlusion_block_size(Shape{96, 84}, 0.30), 49);
  EXPECT_EQ(occlusion_block_size(Shape{96, 84}, 0.0), 0);
  EXPECT_EQ(occlusion_block_size(Shape{96, 84}, 0.50), 63);
  EXPECT_EQ(occlusion_block_size(Shape{24, 21}, 0.40), 14);
  // 2x2 at 0.5625 gives sqrt(2.25) = 1.5, which rounds up.
  EXPECT_EQ(occlusion_block_size(Shape{2, 2}, 0.5625), 2);
}

TEST(CorruptionSizes, PixelCount) {
  EXPECT_EQ(corrupted_pixel_count(Shape{10, 10}, 0.30), 30u);
  EXPECT_EQ(corrupted_pixel_count(Shape{96, 84}, 0.30), 2420u);
  EXPECT_EQ(corrupted_pixel_count(Shape{10, 10}, 0.0), 0u);
  EXPECT_EQ(corrupted_pixel_count(Shape{3, 3}, 0.5), 5u);
}

TEST(Occlude, BlockDiffersExactly) {
  const ImageMatrix base(96, 84, 0.123456789);
  const CorruptionResult r = occlude_detail(base, 0.30, builtin_occluder(), 7);
  ASSERT_TRUE(r.block.has_value());
  EXPECT_EQ(r.block->size, 49);
  EXPECT_EQ(r.value_collisions, 0u);
  EXPECT_EQ(diff_count(base, r.image), 49u * 49u);
  const ImageMatrix patch = resize_bilinear(builtin_occluder(), Shape{49, 49});
  for (Eigen::Index i = 0; i < 96; ++i)
    for (Eigen::Index j = 0; j < 84; ++j) {
      if (r.block->contains(i, j)) {
        EXPECT_EQ(r.image(i, j), patch(i - r.block->top, j - r.block->left));
        EXPECT_EQ(r.provenance(i, j), kOccluder);
      } else {
        EXPECT_EQ(r.image(i, j), base(i, j));
        EXPECT_EQ(r.provenance(i, j), kOriginal);
      }
    }
}

TEST(Occlude, LevelZeroAndDeterminism) {
  const ImageMatrix img = random_image(1, 24, 21);
  EXPECT_EQ(occlude(img, 0.0, builtin_occluder(), 3), img);
  EXPECT_EQ(occlude(img, 0.4, builtin_occluder(), 3), occlude(img, 0.4, builtin_occluder(), 3));
  EXPECT_NE(occlude(img, 0.4, builtin_occluder(), 3), occlude(img, 0.4, builtin_occluder(), 4));
}

TEST(Occlude, PlacementCoversValidRange) {
  const ImageMatrix img(30, 20, 0.5);
  Eigen::Index min_top = 100, max_top = -1, min_left = 100, max_left = -1;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const Block b = *occlude_detail(img, 0.3, builtin_occluder(), s).block;
    ASSERT_LE(b.top + b.size, 30);
    ASSERT_LE(b.left + b.size, 20);
    min_top = std::min(min_top, b.top);
    max_top = std::max(max_top, b.top);
    min_left = std::min(min_left, b.left);
    max_left = std::max(max_left, b.left);
  }
  const Eigen::Index z = occlusion_block_size(Shape{30, 20}, 0.3);
  EXPECT_EQ(min_top, 0);
  EXPECT_EQ(max_top, 30 - z);
  EXPECT_EQ(min_left, 0);
  EXPECT_EQ(max_left, 20 - z);
}

TEST(Occlude, Errors) {
  const ImageMatrix thin(10, 2, 0.5);
  EXPECT_THROW(occlude(thin, 0.5, builtin_occluder(), 1), InvalidArgument);
  EXPECT_THROW(occlude(thin, 1.0, builtin_occluder(), 1), InvalidArgument);
  EXPECT_THROW(occlude(thin, -0.1, builtin_occluder(), 1), InvalidArgument);
  EXPECT_THROW(occlude(ImageMatrix(10, 10, 0.5), 0.3, ImageMatrix(), 1), InvalidArgument);
  EXPECT_THROW(builtin_occluder("baboon"), InvalidArgument);
}

TEST(PixelCorrupt, ExactCount) {
  const ImageMatrix img = random_image(2, 10, 10);
  const CorruptionResult r = pixel_corrupt_detail(img, 0.30, 5);
  EXPECT_EQ(r.pixels_replaced, 30u);
  EXPECT_EQ(diff_count(img, r.image) + r.value_collisions, 30u);
  EXPECT_EQ((r.provenance.array() == kRandomPixel).count(), 30);
  EXPECT_TRUE(in_unit_range(r.image));
  EXPECT_FALSE(r.block.has_value());
}

TEST(PixelCorrupt, LevelZeroAndSeeds) {
  const ImageMatrix img = random_image(3, 96, 84);
  EXPECT_EQ(pixel_corrupt(img, 0.0, 9), img);
  EXPECT_EQ(pixel_corrupt(img, 0.3, 9), pixel_corrupt(img, 0.3, 9));
  EXPECT_NE(diff_positions(img, pixel_corrupt(img, 0.3, 1)),
            diff_positions(img, pixel_corrupt(img, 0.3, 2)));
}

TEST(MixedCorrupt, RegionWiseDiff) {
  const ImageMatrix base(96, 84, 0.123456789);
  const CorruptionResult r = mixed_corrupt_detail(base, 0.30, builtin_occluder(), 11);
  ASSERT_TRUE(r.block.has_value());
  const Block b = *r.block;
  EXPECT_EQ(b.size, 49);
  const ImageMatrix patch = resize_bilinear(builtin_occluder(), Shape{49, 49});
  std::size_t outside = 0, outside_diff = 0;
  for (Eigen::Index i = 0; i < 96; ++i)
    for (Eigen::Index j = 0; j < 84; ++j) {
      if (b.contains(i, j)) {
        EXPECT_EQ(r.image(i, j), patch(i - b.top, j - b.left));
        EXPECT_EQ(r.provenance(i, j), kOccluder);
      } else {
        ++outside;
        if (r.image(i, j) != base(i, j)) {
          ++outside_diff;
          EXPECT_EQ(r.provenance(i, j), kRandomPixel);
        }
      }
    }
  const double frac = static_cast<double>(outside_diff) / static_cast<double>(outside);
  EXPECT_NEAR(frac, 0.30, 0.02);
}

TEST(MixedCorrupt, PixelsLastOverwritesBlock) {
  const ImageMatrix base(96, 84, 0.123456789);
  const CorruptionResult r = mixed_corrupt_detail(base, 0.30, builtin_occluder(), 11, false);
  EXPECT_EQ((r.provenance.array() == kRandomPixel).count(), 2420);
}

TEST(MixedCorrupt, LevelZeroAndDeterminism) {
  const ImageMatrix img = random_image(4, 24, 21);
  EXPECT_EQ(mixed_corrupt(img, 0.0, builtin_occluder(), 1), img);
  EXPECT_EQ(mixed_corrupt(img, 0.3, builtin_occluder(), 1), mixed_corrupt(img, 0.3, builtin_occluder(), 1));
}

TEST(Corruption, OutputsStayInUnitRange) {
  Rng rng(5);
  ImageMatrix occluder = ImageMatrix::from_flat(oracle::random_vector(rng, 64, 0.0, 1.0), Shape{8, 8});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ImageMatrix img = random_image(s, 24, 21);
    for (const CorruptionKind kind : {CorruptionKind::occlusion, CorruptionKind::pixel, CorruptionKind::mixed}) {
      CorruptionSpec spec;
      spec.kind = kind;
      spec.level = 0.1 * static_cast<double>(s % 7);
      spec.seed = s;
      spec.occluder = s % 2 ? occluder : builtin_occluder();
      EXPECT_TRUE(in_unit_range(apply_corruption(img, spec).image));
    }
  }
  EXPECT_TRUE(in_unit_range(builtin_occluder()));
  EXPECT_EQ(builtin_occluder().shape(), (Shape{128, 128}));
}

TEST(Corruption, SpecMatchesDirectCalls) {
  const ImageMatrix img = random_image(6, 24, 21);
  CorruptionSpec spec;
  spec.level = 0.3;
  spec.seed = 77;
  EXPECT_EQ(apply_corruption(img, spec).image, occlude(img, 0.3, builtin_occluder(), 77));
  spec.kind = CorruptionKind::pixel;
  EXPECT_EQ(apply_corruption(img, spec).image, pixel_corrupt(img, 0.3, 77));
  spec.kind = CorruptionKind::mixed;
  spec.pixels_first = false;
  EXPECT_EQ(apply_corruption(img, spec).image, mixed_corrupt(img, 0.3, builtin_occluder(), 77, false));
  spec.level = 1.0;
  EXPECT_THROW(apply_corruption(img, spec), InvalidArgument);
}

TEST(Corruption, ProvenanceImage) {
  ProvenanceMask m(1, 3);
  m << kOriginal, kRandomPixel, kOccluder;
  const ImageMatrix p = provenance_image(m);
  EXPECT_EQ(p(0, 0), 0.0);
  EXPECT_EQ(p(0, 1), 0.5);
  EXPECT_EQ(p(0, 2), 1.0);
}

TEST(Corruption, KindNames) {
  for (const CorruptionKind k : {CorruptionKind::occlusion, CorruptionKind::pixel, CorruptionKind::mixed})
    EXPECT_EQ(parse_corruption_kind(to_string(k)), k);
  EXPECT_THROW(parse_corruption_kind("blur"), InvalidArgument);
}
