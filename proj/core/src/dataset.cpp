#include <gcrep/dataset.hpp>

#include <gcrep/error.hpp>
#include <gcrep/random.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace gcrep {

void LabeledDataset::validate() const {
  if (images.empty()) throw InvalidArgument("dataset: no images");
  if (images.size() != labels.size()) throw InvalidArgument("dataset: image/label count mismatch");
  for (std::size_t i = 0; i < images.size(); ++i)
    if (images[i].shape() != shape)
      throw InvalidArgument("dataset: image " + std::to_string(i) + " has a different shape");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LabeledDataset load_dataset(const std::filesystem::path& manifest, std::optional<Shape> target) {
  std::ifstream in(manifest);
  if (!in) throw IoError("load_dataset: cannot open manifest " + manifest.string());
  const std::filesystem::path base = manifest.parent_path();

  LabeledDataset ds;
  ds.source = manifest.string();
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "path,label")
        throw IoError("load_dataset: " + manifest.string() + ":" + std::to_string(line_no) +
                      ": expected header 'path,label'");
      header_seen = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw IoError("load_dataset: " + manifest.string() + ":" + std::to_string(line_no) +
                    ": expected 'path,label'");
    const std::string rel = trim(line.substr(0, comma));
    int label = 0;
    try {
      std::size_t used = 0;
      const std::string tok = trim(line.substr(comma + 1));
      label = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw IoError("load_dataset: " + manifest.string() + ":" + std::to_string(line_no) +
                    ": label is not an integer");
    }
    const std::filesystem::path path = base / rel;
    if (!std::filesystem::exists(path))
      throw IoError("load_dataset: missing image file " + path.string());
    ImageMatrix img = load_pgm(path);
    if (target) {
      img = resize_bilinear(img, *target);
    } else if (!ds.images.empty() && img.shape() != ds.images.front().shape()) {
      throw IoError("load_dataset: " + path.string() + " is " + std::to_string(img.rows()) + "x" +
                    std::to_string(img.cols()) + " but earlier images are " +
                    std::to_string(ds.images.front().rows()) + "x" +
                    std::to_string(ds.images.front().cols()) + "; set a target shape");
    }
    ds.images.push_back(std::move(img));
    ds.labels.push_back(label);
  }
  if (ds.images.empty()) throw IoError("load_dataset: manifest lists no images");
  ds.shape = ds.images.front().shape();
  return ds;
}

void save_dataset(const LabeledDataset& ds, const std::filesystem::path& dir,
                  const std::string& prefix) {
  ds.validate();
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary | std::ios::trunc);
  if (!manifest) throw IoError("save_dataset: cannot write manifest in " + dir.string());
  manifest << "path,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::ostringstream name;
    name << prefix << "_" << i << ".pgm";
    save_pgm(ds.images[i], dir / name.str(), 255);
    manifest << name.str() << "," << ds.labels[i] << "\n";
  }
}

CorrelationStats class_correlation_stats(const LabeledDataset& ds) {
  std::vector<Vector> centered;
  centered.reserve(ds.size());
  for (const ImageMatrix& img : ds.images) {
    Vector v = img.flat();
    v.array() -= v.mean();
    const double nrm = v.norm();
    if (nrm > 0.0) v /= nrm;
    centered.push_back(std::move(v));
  }
  double within = 0.0, between = 0.0;
  std::size_t nw = 0, nb = 0;
  for (std::size_t i = 0; i < centered.size(); ++i)
    for (std::size_t j = i + 1; j < centered.size(); ++j) {
      const double r = centered[i].dot(centered[j]);
      if (ds.labels[i] == ds.labels[j]) {
        within += r;
        ++nw;
      } else {
        between += r;
        ++nb;
      }
    }
  return {nw ? within / static_cast<double>(nw) : 0.0, nb ? between / static_cast<double>(nb) : 0.0};
}

namespace {

// Smooth nonnegative image in [0, 1]: random low-frequency cosine mixture,
// min-max normalized.
RowMatrix smooth_basis(Rng& rng, Shape shape) {
  constexpr int kMaxFreq = 3;
  RowMatrix s = RowMatrix::Zero(shape.rows, shape.cols);
  for (int p = 0; p <= kMaxFreq; ++p)
    for (int q = 0; q <= kMaxFreq; ++q) {
      if (p == 0 && q == 0) continue;
      const double amp = normal01(rng) / (1.0 + p + q);
      const double phase_r = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      const double phase_c = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      for (Eigen::Index r = 0; r < shape.rows; ++r) {
        const double fr = std::cos(std::numbers::pi * p * (r + 0.5) / shape.rows + phase_r);
        for (Eigen::Index c = 0; c < shape.cols; ++c)
          s(r, c) += amp * fr * std::cos(std::numbers::pi * q * (c + 0.5) / shape.cols + phase_c);
      }
    }
  const double lo = s.minCoeff();
  const double hi = s.maxCoeff();
  return (s.array() - lo) / (hi - lo);
}

}  // namespace

LabeledDataset synthetic_faces(int n_classes, int per_class, Shape shape, std::uint64_t seed) {
  if (n_classes < 2) throw InvalidArgument("synthetic_faces: need at least 2 classes");
  if (per_class < 2) throw InvalidArgument("synthetic_faces: need at least 2 samples per class");
  if (shape.rows < 8 || shape.cols < 8)
    throw InvalidArgument("synthetic_faces: shape must be at least 8x8");

  constexpr int kRank = 3;
  constexpr double kNoiseSigma = 0.02;
  constexpr double kMaxGradient = 0.15;

  LabeledDataset ds;
  ds.shape = shape;
  std::ostringstream src;
  src << "synthetic(classes=" << n_classes << ",per_class=" << per_class << ",shape="
      << shape.rows << "x" << shape.cols << ",seed=" << seed << ")";
  ds.source = src.str();

  for (int k = 0; k < n_classes; ++k) {
    Rng class_rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
    std::vector<RowMatrix> basis;
    for (int b = 0; b < kRank; ++b) basis.push_back(smooth_basis(class_rng, shape));
    for (int s = 0; s < per_class; ++s) {
      std::vector<double> coef(kRank);
      double total = 0.0;
      for (double& c : coef) total += (c = uniform(class_rng, 0.2, 1.0));
      RowMatrix img = RowMatrix::Zero(shape.rows, shape.cols);
      for (int b = 0; b < kRank; ++b) img += (coef[b] / total) * basis[b];

      const double angle = uniform(class_rng, 0.0, 2.0 * std::numbers::pi);
      const double amp = uniform(class_rng, 0.0, kMaxGradient);
      for (Eigen::Index r = 0; r < shape.rows; ++r)
        for (Eigen::Index c = 0; c < shape.cols; ++c) {
          const double u = (c + 0.5) / shape.cols - 0.5;
          const double v = (r + 0.5) / shape.rows - 0.5;
          const double light = amp * (u * std::cos(angle) + v * std::sin(angle));
          img(r, c) = 0.85 * img(r, c) + 0.075 + light + kNoiseSigma * normal01(class_rng);
        }
      ImageMatrix sample(std::move(img));
      sample.clamp();
      ds.images.push_back(std::move(sample));
      ds.labels.push_back(k + 1);
    }
  }

  const CorrelationStats stats = class_correlation_stats(ds);
  if (!(stats.within_class > stats.between_class))
    throw NumericalError("synthetic_faces: classes are not separated (within " +
                         std::to_string(stats.within_class) + " <= between " +
                         std::to_string(stats.between_class) + ")");
  return ds;
}

DatasetSplit split(const LabeledDataset& ds, int per_class_train, std::uint64_t seed) {
  ds.validate();
  if (per_class_train < 1) throw InvalidArgument("split: per_class_train must be >= 1");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  DatasetSplit out;
  Rng rng(seed);
  for (const auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(per_class_train) + 1)
      throw InvalidArgument("split: class " + std::to_string(label) + " has " +
                            std::to_string(members.size()) + " samples, need at least " +
                            std::to_string(per_class_train + 1));
    auto picks = sample_without_replacement(rng, members.size(),
                                            static_cast<std::size_t>(per_class_train));
    std::vector<bool> chosen(members.size(), false);
    for (const std::size_t p : picks) chosen[p] = true;
    for (std::size_t j = 0; j < members.size(); ++j)
      (chosen[j] ? out.train_indices : out.test_indices).push_back(members[j]);
  }
  std::sort(out.train_indices.begin(), out.train_indices.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());

  auto subset = [&](const std::vector<std::size_t>& idx, const char* tag) {
    LabeledDataset part;
    part.shape = ds.shape;
    part.source = ds.source + ":" + tag;
    for (const std::size_t i : idx) {
      part.images.push_back(ds.images[i]);
      part.labels.push_back(ds.labels[i]);
    }
    return part;
  };
  out.train = subset(out.train_indices, "train");
  out.test = subset(out.test_indices, "test");
  return out;
}

}  // namespace gcrep
