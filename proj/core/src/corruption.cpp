#include <gcrep/corruption.hpp>

#include <gcrep/error.hpp>
#include <gcrep/random.hpp>

#include <cmath>
#include <numbers>

namespace gcrep {

std::string to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::occlusion: return "occlusion";
    case CorruptionKind::pixel: return "pixel";
    case CorruptionKind::mixed: return "mixed";
  }
  return "?";
}

CorruptionKind parse_corruption_kind(const std::string& text) {
  if (text == "occlusion") return CorruptionKind::occlusion;
  if (text == "pixel") return CorruptionKind::pixel;
  if (text == "mixed") return CorruptionKind::mixed;
  throw InvalidArgument("unknown corruption kind '" + text + "' (expected occlusion|pixel|mixed)");
}

namespace {

ImageMatrix make_texture() {
  constexpr Eigen::Index kSide = 128;
  Rng rng(0x0BAB00Eu);
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  for (int k = 0; k < 24; ++k) {
    const double freq = uniform(rng, 0.12, 0.45);
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    waves.push_back({freq * std::cos(angle), freq * std::sin(angle),
                     uniform(rng, 0.0, 2.0 * std::numbers::pi), uniform(rng, 0.3, 1.0)});
  }
  RowMatrix t(kSide, kSide);
  for (Eigen::Index r = 0; r < kSide; ++r)
    for (Eigen::Index c = 0; c < kSide; ++c) {
      double v = 0.0;
      for (const Wave& w : waves)
        v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * c + w.fy * r) + w.phase);
      t(r, c) = v + 1.5 * (uniform01(rng) - 0.5);
    }
  const double lo = t.minCoeff();
  const double hi = t.maxCoeff();
  return ImageMatrix(RowMatrix((t.array() - lo) / (hi - lo)));
}

void check_level(double level, const char* who) {
  if (!(level >= 0.0 && level < 1.0) || !std::isfinite(level))
    throw InvalidArgument(std::string(who) + ": level must lie in [0, 1)");
}

}  // namespace

const ImageMatrix& builtin_occluder(const std::string& id) {
  if (id != kBuiltinTexture) throw InvalidArgument("unknown builtin occluder '" + id + "'");
  static const ImageMatrix texture = make_texture();
  return texture;
}

Eigen::Index occlusion_block_size(Shape shape, double level) {
  const double area = static_cast<double>(shape.size()) * level;
  return static_cast<Eigen::Index>(std::floor(std::sqrt(area) + 0.5));
}

std::size_t corrupted_pixel_count(Shape shape, double level) {
  // The slack keeps products such as 0.3 * 100 = 30.000000000000004 at 30.
  const double want = level * static_cast<double>(shape.size());
  return static_cast<std::size_t>(std::ceil(want - 1e-9));
}

CorruptionResult occlude_detail(const ImageMatrix& img, double level, const ImageMatrix& occluder,
                                std::uint64_t seed) {
  check_level(level, "occlude");
  CorruptionResult out{img, ProvenanceMask::Zero(img.rows(), img.cols()), std::nullopt, 0, 0};
  const Eigen::Index z = occlusion_block_size(img.shape(), level);
  if (z > std::min(img.rows(), img.cols()))
    throw InvalidArgument("occlude: block size " + std::to_string(z) + " exceeds image " +
                          std::to_string(img.rows()) + "x" + std::to_string(img.cols()));
  if (z == 0) return out;
  if (occluder.size() == 0) throw InvalidArgument("occlude: empty occluder");

  const ImageMatrix patch = resize_bilinear(occluder, {z, z});
  Rng rng(seed);
  Block b;
  b.size = z;
  b.top = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(img.rows() - z + 1)));
  b.left = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(img.cols() - z + 1)));
  for (Eigen::Index r = 0; r < z; ++r)
    for (Eigen::Index c = 0; c < z; ++c) {
      double& px = out.image(b.top + r, b.left + c);
      const double v = std::clamp(patch(r, c), 0.0, 1.0);
      if (v == px) ++out.value_collisions;
      px = v;
      out.provenance(b.top + r, b.left + c) = kOccluder;
    }
  out.block = b;
  out.pixels_replaced = static_cast<std::size_t>(z * z);
  return out;
}

ImageMatrix occlude(const ImageMatrix& img, double level, const ImageMatrix& occluder,
                    std::uint64_t seed) {
  return occlude_detail(img, level, occluder, seed).image;
}

CorruptionResult pixel_corrupt_detail(const ImageMatrix& img, double level, std::uint64_t seed) {
  check_level(level, "pixel_corrupt");
  CorruptionResult out{img, ProvenanceMask::Zero(img.rows(), img.cols()), std::nullopt, 0, 0};
  const std::size_t k = corrupted_pixel_count(img.shape(), level);
  Rng rng(seed);
  const auto positions = sample_without_replacement(rng, static_cast<std::size_t>(img.size()), k);
  const Eigen::Index cols = img.cols();
  for (const std::size_t p : positions) {
    const auto r = static_cast<Eigen::Index>(p) / cols;
    const auto c = static_cast<Eigen::Index>(p) % cols;
    const double v = uniform01(rng);
    if (v == out.image(r, c)) ++out.value_collisions;
    out.image(r, c) = v;
    out.provenance(r, c) = kRandomPixel;
  }
  out.pixels_replaced = positions.size();
  return out;
}

ImageMatrix pixel_corrupt(const ImageMatrix& img, double level, std::uint64_t seed) {
  return pixel_corrupt_detail(img, level, seed).image;
}

CorruptionResult mixed_corrupt_detail(const ImageMatrix& img, double level,
                                      const ImageMatrix& occluder, std::uint64_t seed,
                                      bool pixels_first) {
  const std::uint64_t pixel_seed = mix_seed(seed, 1);
  const std::uint64_t block_seed = mix_seed(seed, 2);
  auto merge = [](CorruptionResult& into, const CorruptionResult& step) {
    for (Eigen::Index i = 0; i < into.provenance.size(); ++i)
      if (step.provenance.data()[i] != kOriginal) into.provenance.data()[i] = step.provenance.data()[i];
    into.image = step.image;
    if (step.block) into.block = step.block;
    into.pixels_replaced += step.pixels_replaced;
    into.value_collisions += step.value_collisions;
  };
  CorruptionResult out{img, ProvenanceMask::Zero(img.rows(), img.cols()), std::nullopt, 0, 0};
  if (pixels_first) {
    merge(out, pixel_corrupt_detail(out.image, level, pixel_seed));
    merge(out, occlude_detail(out.image, level, occluder, block_seed));
  } else {
    merge(out, occlude_detail(out.image, level, occluder, block_seed));
    merge(out, pixel_corrupt_detail(out.image, level, pixel_seed));
  }
  return out;
}

ImageMatrix mixed_corrupt(const ImageMatrix& img, double level, const ImageMatrix& occluder,
                          std::uint64_t seed, bool pixels_first) {
  return mixed_corrupt_detail(img, level, occluder, seed, pixels_first).image;
}

void CorruptionSpec::validate() const {
  check_level(level, "CorruptionSpec");
  if (kind != CorruptionKind::pixel && occluder.size() == 0)
    throw InvalidArgument("CorruptionSpec: occluder image is empty");
}

CorruptionResult apply_corruption(const ImageMatrix& img, const CorruptionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case CorruptionKind::occlusion: return occlude_detail(img, spec.level, spec.occluder, spec.seed);
    case CorruptionKind::pixel: return pixel_corrupt_detail(img, spec.level, spec.seed);
    case CorruptionKind::mixed:
      return mixed_corrupt_detail(img, spec.level, spec.occluder, spec.seed, spec.pixels_first);
  }
  throw InvalidArgument("apply_corruption: unknown kind");
}

ImageMatrix provenance_image(const ProvenanceMask& mask) {
  ImageMatrix out(mask.rows(), mask.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    out.pixels().data()[i] = mask.data()[i] == kOriginal ? 0.0 : mask.data()[i] == kRandomPixel ? 0.5 : 1.0;
  return out;
}

}  // namespace gcrep
