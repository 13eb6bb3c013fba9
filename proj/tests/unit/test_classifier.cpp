#include <gcrep/classifier.hpp>
#include <gcrep/corruption.hpp>
#include <gcrep/dataset.hpp>
#include <gcrep/error.hpp>
#include <gcrep/random.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>

using namespace gcrep;

namespace {

Dictionary identity_dictionary(Eigen::Index m) {
  std::vector<int> labels;
  for (Eigen::Index j = 0; j < m; ++j) labels.push_back(static_cast<int>(j) + 1);
  return Dictionary(Matrix::Identity(m, m), labels, Shape{m, 1});
}

// Three positive columns per class in a 64-pixel space.
Dictionary block_dictionary(std::uint64_t seed, int classes) {
  Rng rng(seed);
  Matrix cols = oracle::random_matrix(rng, 64, 3 * classes, 0.0, 1.0);
  std::vector<int> labels;
  for (int c = 1; c <= classes; ++c)
    for (int k = 0; k < 3; ++k) labels.push_back(c);
  return Dictionary(cols, labels, Shape{8, 8});
}

std::vector<TestSample> training_queries(const LabeledDataset& ds) {
  std::vector<TestSample> out;
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back({ds.images[i].flat(), ds.labels[i]});
  return out;
}

}  // namespace

TEST(BuildDictionary, OnesExample) {
  const std::vector<ImageMatrix> imgs{ImageMatrix(2, 2, 1.0), ImageMatrix(2, 2, 1.0)};
  const Dictionary d = build_dictionary(imgs, {1, 2});
  EXPECT_EQ(d.columns(), Matrix::Constant(4, 2, 0.5));
  EXPECT_EQ(d.column_norms(), Vector::Constant(2, 2.0));
  EXPECT_EQ(d.image_shape(), (Shape{2, 2}));
  EXPECT_EQ(d.classes(), (std::vector<int>{1, 2}));
}

TEST(BuildDictionary, RasterOrder) {
  ImageMatrix img(2, 3);
  for (Eigen::Index r = 0; r < 2; ++r)
    for (Eigen::Index c = 0; c < 3; ++c) img(r, c) = static_cast<double>(3 * r + c + 1);
  const Dictionary d = build_dictionary({img}, {7});
  const double n = std::sqrt(91.0);
  for (Eigen::Index k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(d.columns()(k, 0), (k + 1) / n);
}

TEST(BuildDictionary, Errors) {
  EXPECT_THROW(build_dictionary({}, {}), InvalidArgument);
  EXPECT_THROW(build_dictionary({ImageMatrix(2, 2, 1.0), ImageMatrix(2, 3, 1.0)}, {1, 2}),
               InvalidArgument);
  EXPECT_THROW(build_dictionary({ImageMatrix(2, 2, 1.0)}, {1, 2}), InvalidArgument);
  EXPECT_THROW(build_dictionary({ImageMatrix(2, 2, 1.0), ImageMatrix(2, 2, 0.0)}, {1, 2}),
               InvalidArgument);
}

TEST(BuildDictionary, UnitNormsOnRandomInput) {
  Rng rng(1);
  std::vector<ImageMatrix> imgs;
  std::vector<int> labels;
  for (int k = 0; k < 20; ++k) {
    imgs.push_back(ImageMatrix::from_flat(oracle::random_vector(rng, 30, 0.0, 1.0), Shape{5, 6}));
    labels.push_back(k % 4 + 1);
  }
  const Dictionary d = build_dictionary(imgs, labels);
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    EXPECT_NEAR(d.columns().col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(d.column_norms()[j], imgs[static_cast<std::size_t>(j)].flat().norm(), 1e-12);
  }
}

TEST(ClassResiduals, ExactReconstruction) {
  const Dictionary d = identity_dictionary(4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const Vector y = d.columns().col(j);
    Vector x = Vector::Zero(4);
    x[j] = 1.0;
    const Vector r = class_residuals(y, d, x, Vector::Ones(4));
    for (Eigen::Index i = 0; i < 4; ++i) {
      if (i == j) EXPECT_EQ(r[i], 0.0);
      else EXPECT_GT(r[i], 0.0);
    }
  }
}

TEST(ClassResiduals, MatchesMaskedOracle) {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Dictionary d = block_dictionary(mix_seed(2, static_cast<std::uint64_t>(k)), 3);
    const Vector y = oracle::random_vector(rng, 64, 0.0, 1.0);
    const Vector x = oracle::random_vector(rng, 9);
    const Vector w = oracle::random_vector(rng, 64, 0.0, 2.0);
    const Vector got = class_residuals(y, d, x, w);
    const Vector want = oracle::masked_residuals(y, d, x, w);
    EXPECT_LE((got - want).norm(), 1e-12 * want.norm());
  }
}

TEST(ClassResiduals, MasksPartitionReconstruction) {
  Rng rng(3);
  const Dictionary d = block_dictionary(3, 4);
  const Vector x = oracle::random_vector(rng, 12);
  Vector sum = Vector::Zero(64);
  for (std::size_t c = 0; c < d.num_classes(); ++c) {
    Vector k = Vector::Zero(12);
    for (Eigen::Index j = 0; j < 12; ++j)
      if (d.column_class()[static_cast<std::size_t>(j)] == c) k[j] = x[j];
    sum += d.columns() * k;
  }
  EXPECT_LE((sum - d.columns() * x).norm(), 1e-12);
}

TEST(ClassResiduals, WeightScalingInvariance) {
  Rng rng(4);
  const Dictionary d = block_dictionary(4, 5);
  for (int k = 0; k < 50; ++k) {
    const Vector y = oracle::random_vector(rng, 64, 0.0, 1.0);
    const Vector x = oracle::random_vector(rng, 15);
    const Vector w = oracle::random_vector(rng, 64, 0.0, 2.0);
    const double c = uniform(rng, 0.01, 100.0);
    const Vector r1 = class_residuals(y, d, x, w);
    const Vector r2 = class_residuals(y, d, x, c * w);
    EXPECT_LE((r2 - c * r1).norm(), 1e-10 * r2.norm());
    EXPECT_EQ(argmin_class(r1), argmin_class(r2));
  }
}

TEST(ClassResiduals, RelabelingPermutesPrediction) {
  Rng rng(5);
  const Dictionary d = block_dictionary(5, 3);
  const std::vector<int> perm{0, 3, 1, 2};  // old label -> new label
  std::vector<int> relabeled;
  for (const int l : d.labels()) relabeled.push_back(perm[static_cast<std::size_t>(l)]);
  const Dictionary p(d.columns(), relabeled, d.image_shape());
  for (int k = 0; k < 30; ++k) {
    const Vector y = oracle::random_vector(rng, 64, 0.0, 1.0);
    const Vector x = oracle::random_vector(rng, 9);
    const Vector w = oracle::random_vector(rng, 64, 0.0, 2.0);
    const int a = d.classes()[argmin_class(class_residuals(y, d, x, w))];
    const int b = p.classes()[argmin_class(class_residuals(y, p, x, w))];
    EXPECT_EQ(b, perm[static_cast<std::size_t>(a)]);
  }
}

TEST(ClassResiduals, SizeChecks) {
  const Dictionary d = identity_dictionary(3);
  EXPECT_THROW(class_residuals(Vector::Zero(3), d, Vector::Zero(2), Vector::Ones(3)), InvalidArgument);
  EXPECT_THROW(class_residuals(Vector::Zero(3), d, Vector::Zero(3), Vector::Ones(2)), InvalidArgument);
}

TEST(ArgminClass, TiesAndOrder) {
  bool tie = true;
  Vector r(3);
  r << 0.3, 0.1, 0.2;
  EXPECT_EQ(argmin_class(r, &tie), 1u);
  EXPECT_FALSE(tie);
  r << 0.1, 0.2, 0.1;
  EXPECT_EQ(argmin_class(r, &tie), 0u);
  EXPECT_TRUE(tie);
  r << 0.2, 0.1 + 5e-13, 0.1;
  EXPECT_EQ(argmin_class(r, &tie), 1u);
  EXPECT_TRUE(tie);
  r << 20.0, 10.0 + 5e-12, 10.0;
  EXPECT_EQ(argmin_class(r, &tie), 1u);
  EXPECT_TRUE(tie);
  r << 0.1 + 2e-12, 0.3, 0.1;
  EXPECT_EQ(argmin_class(r, &tie), 2u);
  EXPECT_FALSE(tie);
  EXPECT_THROW(argmin_class(Vector()), InvalidArgument);
}

TEST(NormalizeQuery, Cases) {
  Vector y(2);
  y << 3.0, 4.0;
  EXPECT_EQ(normalize_query(y), Vector(Eigen::Vector2d(0.6, 0.8)));
  EXPECT_EQ(normalize_query(Vector::Zero(3)), Vector::Zero(3));
  y[0] = std::nan("");
  EXPECT_THROW(normalize_query(y), InvalidArgument);
}

TEST(Identify, IdentityDictionaryColumn) {
  const Dictionary d = identity_dictionary(4);
  const Identification id = identify(d.columns().col(0), d, SolverConfig{});
  EXPECT_EQ(id.label, 1);
  EXPECT_EQ(id.class_index, 0u);
}

TEST(Identify, SubspaceMember) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dictionary d = block_dictionary(mix_seed(6, seed), 4);
    Vector x = Vector::Zero(12);
    x.segment(6, 3) << 0.5, 0.3, 0.8;
    const Identification id = identify(d.columns() * x, d, SolverConfig{});
    EXPECT_EQ(id.label, 3) << "seed " << seed;
  }
}

TEST(Identify, DuplicatedClassesPickLowest) {
  Rng rng(7);
  const Matrix base = oracle::random_matrix(rng, 16, 2, 0.1, 1.0);
  Matrix cols(16, 6);
  cols << base, base, oracle::random_matrix(rng, 16, 2, 0.1, 1.0);
  const Dictionary d(cols, {4, 4, 2, 2, 9, 9}, Shape{4, 4});
  const Identification id = identify(base * Eigen::Vector2d(0.4, 0.6), d, SolverConfig{});
  EXPECT_EQ(id.label, 2);
  EXPECT_TRUE(id.tie);
}

TEST(Evaluate, SelfRecognition) {
  const LabeledDataset ds = synthetic_faces(5, 6, Shape{12, 10}, 11);
  const Dictionary d = build_dictionary(ds.images, ds.labels);
  const Evaluation ev = evaluate(training_queries(ds), d, SolverConfig{});
  EXPECT_EQ(ev.accuracy, 1.0);
  EXPECT_EQ(ev.total, 30u);
  EXPECT_TRUE(ev.complete);
}

TEST(Evaluate, WorkerCountIndependent) {
  const LabeledDataset ds = synthetic_faces(4, 8, Shape{12, 10}, 12);
  const DatasetSplit sp = split(ds, 4, 3);
  const Dictionary d = build_dictionary(sp.train.images, sp.train.labels);
  std::vector<TestSample> test = training_queries(sp.test);
  for (std::size_t i = 0; i < test.size(); ++i)
    test[i].y = occlude(sp.test.images[i], 0.3, builtin_occluder(), i).flat();
  EvaluateOptions one;
  EvaluateOptions many;
  many.workers = 8;
  one.keep_solutions = many.keep_solutions = {0, 5};
  const Evaluation a = evaluate(test, d, SolverConfig{}, one);
  const Evaluation b = evaluate(test, d, SolverConfig{}, many);
  EXPECT_EQ(a.accuracy, b.accuracy);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].sample_id, i);
    EXPECT_EQ(a.records[i].predicted_label, b.records[i].predicted_label);
    EXPECT_EQ(a.records[i].residuals, b.records[i].residuals);
    EXPECT_EQ(a.records[i].iterations, b.records[i].iterations);
    EXPECT_EQ(a.records[i].final_eps, b.records[i].final_eps);
  }
  ASSERT_EQ(a.kept.size(), 2u);
  ASSERT_EQ(b.kept.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(a.kept[k].first, b.kept[k].first);
    EXPECT_EQ(a.kept[k].second.w_star, b.kept[k].second.w_star);
    EXPECT_EQ(a.kept[k].second.trace.size(), static_cast<std::size_t>(a.kept[k].second.iterations));
  }
}

TEST(Evaluate, FailuresCountAsIncorrect) {
  const Dictionary d = identity_dictionary(4);
  std::vector<TestSample> test{{d.columns().col(1), 2}, {Vector::Zero(3), 1}};
  Vector bad = Vector::Zero(4);
  bad[0] = std::numeric_limits<double>::infinity();
  test.push_back({bad, 1});
  const Evaluation ev = evaluate(test, d, SolverConfig{});
  EXPECT_EQ(ev.total, 3u);
  EXPECT_EQ(ev.correct, 1u);
  EXPECT_FALSE(ev.records[0].failed);
  EXPECT_TRUE(ev.records[1].failed);
  EXPECT_TRUE(ev.records[2].failed);
  EXPECT_FALSE(ev.records[1].error.empty());
  EXPECT_DOUBLE_EQ(ev.accuracy, 1.0 / 3.0);
}

TEST(Evaluate, Cancellation) {
  const Dictionary d = identity_dictionary(4);
  const std::vector<TestSample> test{{d.columns().col(1), 2}, {d.columns().col(2), 3}};
  const std::atomic<bool> stop{true};
  EvaluateOptions opt;
  opt.cancel = &stop;
  EXPECT_FALSE(evaluate(test, d, SolverConfig{}, opt).complete);
  EXPECT_THROW(evaluate({}, d, SolverConfig{}), InvalidArgument);
}
