#include <gcrep/experiment.hpp>

#include <gcrep/classifier.hpp>
#include <gcrep/corruption.hpp>
#include <gcrep/dataset.hpp>
#include <gcrep/error.hpp>
#include <gcrep/lowrank.hpp>
#include <gcrep/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gcrep {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string level_tag(double level) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "L%03d", static_cast<int>(std::lround(level * 100.0)));
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void prepare_output_dir(const fs::path& dir, bool overwrite) {
  std::error_code ec;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw IoError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!overwrite)
        throw InvalidArgument("output directory " + dir.string() +
                              " is not empty (pass overwrite to replace it)");
      for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const char* sub : {"traces", "weights", "corrupted"}) fs::create_directories(dir / sub);
}

LabeledDataset load_source(const ExperimentConfig& c) {
  if (c.manifest) return load_dataset(*c.manifest, c.target_shape);
  const SyntheticSpec& s = c.synthetic;
  LabeledDataset ds = synthetic_faces(s.classes, s.per_class, s.shape, s.seed);
  if (c.target_shape && !(*c.target_shape == ds.shape))
    for (ImageMatrix& img : ds.images) img = resize_bilinear(img, *c.target_shape);
  if (c.target_shape) ds.shape = *c.target_shape;
  return ds;
}

ImageMatrix load_occluder(const std::string& id) {
  if (id == kBuiltinTexture) return builtin_occluder(id);
  return load_pgm(id);
}

}  // namespace

ImageMatrix weight_map_image(const Vector& w, Shape shape) {
  if (w.size() != shape.size()) throw InvalidArgument("weight map: size does not match shape");
  const double lo = w.minCoeff();
  const double hi = w.maxCoeff();
  Vector scaled = hi > lo ? Vector((w.array() - lo) / (hi - lo)) : Vector::Constant(w.size(), 0.5);
  return ImageMatrix::from_flat(scaled, shape);
}

void emit_weight_map(const Vector& w, Shape shape, const fs::path& path) {
  save_pgm(weight_map_image(w, shape), path);
}

void emit_rank_curves(const std::vector<double>& sigma, const GcParams& params, double logsum_eps,
                      const fs::path& path) {
  if (!(logsum_eps > 0.0)) throw InvalidArgument("rank curves: logsum eps must be > 0");
  std::ofstream out = open_out(path);
  out << "sigma,true_rank,gc_normalized,nuclear,logsum\n";
  const double denom = std::log1p(1.0 / logsum_eps);
  for (const double s : sigma) {
    if (!(s >= 0.0)) throw InvalidArgument("rank curves: sigma must be nonnegative");
    const Vector one = Vector::Constant(1, s);
    out << num(s) << ',' << (s > 0.0 ? 1 : 0) << ',' << num(gc_rank_surrogate(one, params, true))
        << ',' << num(s) << ',' << num(std::log1p(s / logsum_eps) / denom) << '\n';
  }
}

void emit_weight_curves(const std::vector<double>& alphas, double beta, const fs::path& path) {
  std::vector<GcParams> params;
  for (const double a : alphas) params.emplace_back(a, beta);
  std::ofstream out = open_out(path);
  out << 'e';
  for (const double a : alphas) out << ",alpha_" << num(a);
  out << '\n';
  for (int k = -300; k <= 300; ++k) {
    const double e = k / 100.0;
    out << num(e);
    for (const GcParams& p : params) out << ',' << num(ggd_density(e, p));
    out << '\n';
  }
}

void write_trace_csv(const std::vector<IterationRecord>& trace, const fs::path& path) {
  std::ofstream out = open_out(path);
  out << "iteration,r1,r2,eps,kkt_a,kkt_b,kkt_c,kkt_d,kkt_e,surrogate\n";
  for (const IterationRecord& r : trace) {
    out << r.iteration << ',' << num(r.r1) << ',' << num(r.r2) << ',' << num(r.eps);
    for (const double k : r.kkt) out << ',' << num(k);
    out << ',' << num(r.surrogate) << '\n';
  }
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  RunResult result;
  result.output_dir = options.output_dir.value_or(config.output_dir);
  result.variants = config.variants();
  const fs::path dir = result.output_dir;
  const unsigned workers = std::max(1u, options.workers.value_or(config.workers));

  // Load inputs before touching the output directory so bad inputs leave it alone.
  const LabeledDataset data = load_source(config);
  const ImageMatrix occluder = load_occluder(config.occluder);
  const std::uint64_t split_seed = config.split_seed.value_or(mix_seed(config.seed, 1));
  const DatasetSplit parts = split(data, config.train_per_class, split_seed);
  const Dictionary dict = build_dictionary(parts.train.images, parts.train.labels);

  prepare_output_dir(dir, options.overwrite.value_or(config.overwrite));
  const fs::path marker = dir / "INCOMPLETE";
  open_out(marker) << "run in progress\n";

  ExperimentConfig archived = config;
  archived.output_dir = dir;
  archived.workers = workers;
  open_out(dir / "config.ini") << format_experiment_config(archived);
  {
    std::ofstream methods = open_out(dir / "methods.txt");
    for (const Variant& v : result.variants) methods << v.name() << '\n';
  }

  std::ofstream log = open_out(dir / "experiment.log");
  auto note = [&](const std::string& line) {
    log << line << '\n';
    log.flush();
    if (options.log) *options.log << line << '\n';
  };
  note("dataset: " + data.source + " (" + std::to_string(data.size()) + " images, " +
       std::to_string(data.shape.rows) + "x" + std::to_string(data.shape.cols) + ")");
  note("split: " + std::to_string(parts.train.size()) + " train, " +
       std::to_string(parts.test.size()) + " test");
  for (const std::string& w : config.solver.conformance_notes()) note("warning: " + w);

  std::ofstream acc = open_out(dir / "accuracy.csv");
  std::ofstream timing = open_out(dir / "timing.csv");
  std::ofstream records = open_out(dir / "records.csv");
  std::ofstream timing_records = open_out(dir / "timing_records.csv");
  acc << "level";
  timing << "level";
  for (const Variant& v : result.variants) {
    acc << ',' << v.name();
    timing << ',' << v.name();
  }
  acc << '\n';
  timing << '\n';
  records << "level,variant,sample_id,true_label,predicted_label,iterations,final_eps,failed,tie";
  for (const int label : dict.classes()) records << ",res_" << label;
  records << '\n';
  timing_records << "level,variant,sample_id,wall_ms\n";

  std::set<std::size_t> keep_ids(config.trace_samples.begin(), config.trace_samples.end());
  keep_ids.insert(config.weight_map_samples.begin(), config.weight_map_samples.end());
  const std::set<std::size_t> trace_ids(config.trace_samples.begin(), config.trace_samples.end());
  const std::set<std::size_t> map_ids(config.weight_map_samples.begin(),
                                      config.weight_map_samples.end());
  const std::uint64_t corruption_seed = mix_seed(config.seed, 2);

  for (std::size_t li = 0; li < config.levels.size(); ++li) {
    const double level = config.levels[li];
    const std::string tag = level_tag(level);

    std::vector<TestSample> test(parts.test.size());
    std::size_t replaced = 0;
    for (std::size_t i = 0; i < parts.test.size(); ++i) {
      CorruptionSpec spec;
      spec.kind = config.corruption;
      spec.level = level;
      spec.seed = mix_seed(corruption_seed, i);
      spec.occluder = occluder;
      spec.pixels_first = config.pixels_first;
      const CorruptionResult cr = apply_corruption(parts.test.images[i], spec);
      replaced += cr.pixels_replaced;
      test[i] = {cr.image.flat(), parts.test.labels[i]};
      if (map_ids.count(i)) {
        const std::string stem = tag + "_s" + std::to_string(i);
        save_pgm(cr.image, dir / "corrupted" / ("sample_" + stem + ".pgm"));
        save_pgm(provenance_image(cr.provenance), dir / "corrupted" / ("provenance_" + stem + ".pgm"));
      }
    }
    std::string line = "level " + num(level) + ": ";
    if (config.corruption != CorruptionKind::pixel)
      line += "block z=" + std::to_string(occlusion_block_size(data.shape, level)) + ", ";
    if (config.corruption != CorruptionKind::occlusion)
      line += "random pixels per image=" +
              std::to_string(corrupted_pixel_count(data.shape, level)) + ", ";
    line += "mean replaced=" +
            num(static_cast<double>(replaced) / static_cast<double>(std::max<std::size_t>(1, test.size())));
    note(line);

    std::vector<double> acc_row;
    std::vector<double> time_row;
    for (const Variant& v : result.variants) {
      SolverConfig cfg = config.solver;
      cfg.weight_rule = v.weight;
      cfg.rank_rule = v.rank;
      EvaluateOptions eo;
      eo.workers = workers;
      eo.keep_solutions.assign(keep_ids.begin(), keep_ids.end());
      eo.cancel = options.cancel;
      Evaluation ev = evaluate(test, dict, cfg, eo);
      if (!ev.complete) {
        result.complete = false;
        break;
      }
      double total_ms = 0.0;
      std::size_t failures = 0;
      for (const SampleRecord& r : ev.records) {
        records << num(level) << ',' << v.name() << ',' << r.sample_id << ',' << r.true_label << ','
                << r.predicted_label << ',' << r.iterations << ',' << num(r.final_eps) << ','
                << (r.failed ? 1 : 0) << ',' << (r.tie ? 1 : 0);
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(dict.classes().size()); ++k)
          records << ',' << (k < r.residuals.size() ? num(r.residuals[k]) : std::string("nan"));
        records << '\n';
        timing_records << num(level) << ',' << v.name() << ',' << r.sample_id << ','
                       << num(r.wall_ms) << '\n';
        total_ms += r.wall_ms;
        if (r.failed) ++failures;
      }
      for (const auto& [id, sol] : ev.kept) {
        const std::string stem = v.name() + "_" + tag + "_s" + std::to_string(id);
        if (trace_ids.count(id)) write_trace_csv(sol.trace, dir / "traces" / ("trace_" + stem + ".csv"));
        if (map_ids.count(id)) emit_weight_map(sol.w_star, data.shape, dir / "weights" / ("weights_" + stem + ".pgm"));
      }
      if (failures) note("warning: " + v.name() + " at level " + num(level) + ": " +
                         std::to_string(failures) + " solver failures");
      acc_row.push_back(100.0 * ev.accuracy);
      time_row.push_back(total_ms / 1000.0 / static_cast<double>(ev.records.size()));
      note("level " + num(level) + " " + v.name() + ": accuracy " + pct(100.0 * ev.accuracy) + "%");
    }
    if (!result.complete) break;

    acc << num(level);
    timing << num(level);
    for (std::size_t k = 0; k < acc_row.size(); ++k) {
      acc << ',' << pct(acc_row[k]);
      timing << ',' << num(time_row[k]);
    }
    acc << '\n';
    timing << '\n';
    acc.flush();
    timing.flush();
    records.flush();
    timing_records.flush();
    result.levels.push_back(level);
    result.accuracy.push_back(std::move(acc_row));
  }

  if (result.complete) {
    acc.close();
    fs::remove(marker);
  } else {
    note("interrupted after " + std::to_string(result.levels.size()) + " of " +
         std::to_string(config.levels.size()) + " levels");
    open_out(marker) << "interrupted after " << result.levels.size() << " of "
                     << config.levels.size() << " levels\n";
  }
  return result;
}

}  // namespace gcrep
