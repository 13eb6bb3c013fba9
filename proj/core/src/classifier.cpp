#include <gcrep/classifier.hpp>

#include <gcrep/error.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <optional>
#include <thread>

namespace gcrep {

Dictionary::Dictionary(Matrix columns, std::vector<int> labels, Shape image_shape)
    : columns_(std::move(columns)), labels_(std::move(labels)), shape_(image_shape) {
  if (columns_.cols() == 0 || columns_.rows() == 0)
    throw InvalidArgument("Dictionary: no training columns");
  if (static_cast<std::size_t>(columns_.cols()) != labels_.size())
    throw InvalidArgument("Dictionary: " + std::to_string(columns_.cols()) + " columns but " +
                          std::to_string(labels_.size()) + " labels");
  if (shape_.size() != columns_.rows())
    throw InvalidArgument("Dictionary: image shape does not match column length");
  if (!columns_.allFinite()) throw InvalidArgument("Dictionary: non-finite entries");

  column_norms_ = columns_.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < columns_.cols(); ++j) {
    if (!(column_norms_[j] > 0.0))
      throw InvalidArgument("Dictionary: column " + std::to_string(j) + " has zero norm");
    columns_.col(j) /= column_norms_[j];
  }

  classes_ = labels_;
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
  column_class_.reserve(labels_.size());
  for (const int label : labels_)
    column_class_.push_back(static_cast<std::size_t>(
        std::lower_bound(classes_.begin(), classes_.end(), label) - classes_.begin()));
}

Dictionary build_dictionary(const std::vector<ImageMatrix>& images,
                            const std::vector<int>& labels) {
  if (images.empty()) throw InvalidArgument("build_dictionary: no images");
  if (images.size() != labels.size())
    throw InvalidArgument("build_dictionary: " + std::to_string(images.size()) + " images but " +
                          std::to_string(labels.size()) + " labels");
  const Shape shape = images.front().shape();
  Matrix columns(shape.size(), static_cast<Eigen::Index>(images.size()));
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (images[k].shape() != shape)
      throw InvalidArgument("build_dictionary: image " + std::to_string(k) +
                            " has a different shape");
    columns.col(static_cast<Eigen::Index>(k)) = images[k].flat();
  }
  return Dictionary(std::move(columns), labels, shape);
}

Vector class_residuals(const Vector& y, const Dictionary& dict, const Vector& x_star,
                       const Vector& w_star) {
  if (x_star.size() != dict.cols() || w_star.size() != dict.rows() || y.size() != dict.rows())
    throw InvalidArgument("class_residuals: dimension mismatch");
  const Matrix& D = dict.columns();
  const auto& owner = dict.column_class();
  const Eigen::ArrayXd sqrt_w = w_star.array().max(0.0).sqrt();
  Vector residuals(static_cast<Eigen::Index>(dict.num_classes()));
  for (std::size_t c = 0; c < dict.num_classes(); ++c) {
    Vector recon = Vector::Zero(dict.rows());
    for (Eigen::Index j = 0; j < dict.cols(); ++j)
      if (owner[static_cast<std::size_t>(j)] == c) recon.noalias() += x_star[j] * D.col(j);
    residuals[static_cast<Eigen::Index>(c)] = (sqrt_w * (y - recon).array()).matrix().squaredNorm();
  }
  return residuals;
}

Vector normalize_query(const Vector& y) {
  const double norm = y.norm();
  if (!std::isfinite(norm)) throw InvalidArgument("query contains non-finite values");
  return norm > 0.0 ? Vector(y / norm) : y;
}

std::size_t argmin_class(const Vector& residuals, bool* tie) {
  if (residuals.size() == 0) throw InvalidArgument("argmin_class: empty residual vector");
  const double lo = residuals.minCoeff();
  const double tol = 1e-12 * std::max(1.0, std::abs(lo));
  Eigen::Index best = -1;
  int within = 0;
  for (Eigen::Index i = 0; i < residuals.size(); ++i) {
    if (residuals[i] - lo <= tol) {
      if (best < 0) best = i;
      ++within;
    }
  }
  if (tie) *tie = within > 1;
  return static_cast<std::size_t>(best);
}

Identification identify(const Vector& y, const Dictionary& dict, const SolverContext& ctx,
                        const SolverConfig& config) {
  Identification id;
  const Vector q = normalize_query(y);
  id.solution = solve(q, ctx, config);
  id.residuals = class_residuals(q, dict, id.solution.x_star, id.solution.w_star);
  id.class_index = argmin_class(id.residuals, &id.tie);
  id.label = dict.classes()[id.class_index];
  return id;
}

Identification identify(const Vector& y, const Dictionary& dict, const SolverConfig& config) {
  config.validate();
  const SolverContext ctx(dict, config);
  return identify(y, dict, ctx, config);
}

Evaluation evaluate(const std::vector<TestSample>& test, const Dictionary& dict,
                    const SolverConfig& config, const EvaluateOptions& options) {
  if (test.empty()) throw InvalidArgument("evaluate: empty test set");
  config.validate();
  SolverConfig cfg = config;
  const SolverContext ctx(dict, cfg);

  Evaluation out;
  out.records.resize(test.size());
  std::vector<std::optional<Solution>> kept(test.size());
  std::vector<bool> keep(test.size(), false);
  for (const std::size_t id : options.keep_solutions)
    if (id < test.size()) keep[id] = true;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> cancelled{false};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < test.size(); i = next.fetch_add(1)) {
      if (options.cancel && options.cancel->load()) {
        cancelled = true;
        return;
      }
      SampleRecord& rec = out.records[i];
      rec.sample_id = i;
      rec.true_label = test[i].label;
      const auto start = std::chrono::steady_clock::now();
      try {
        // Traces are only needed for kept samples.
        SolverConfig local = cfg;
        local.record_trace = keep[i] && cfg.record_trace;
        Identification id = identify(test[i].y, dict, ctx, local);
        rec.predicted_label = id.label;
        rec.iterations = id.solution.iterations;
        rec.final_eps = id.solution.final_eps;
        rec.residuals = std::move(id.residuals);
        rec.tie = id.tie;
        if (keep[i]) kept[i] = std::move(id.solution);
      } catch (const std::exception& ex) {
        rec.failed = true;
        rec.error = ex.what();
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(test.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
  }

  out.complete = !cancelled.load();
  for (const SampleRecord& rec : out.records)
    if (rec.correct()) ++out.correct;
  out.total = out.records.size();
  out.accuracy = static_cast<double>(out.correct) / static_cast<double>(out.total);
  for (std::size_t i = 0; i < test.size(); ++i)
    if (kept[i]) out.kept.emplace_back(i, std::move(*kept[i]));
  return out;
}

}  // namespace gcrep
