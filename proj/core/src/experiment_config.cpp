#include <gcrep/experiment_config.hpp>

#include <gcrep/error.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gcrep {

std::string Variant::name() const { return to_string(weight) + "+" + to_string(rank); }

std::vector<Variant> ExperimentConfig::variants() const {
  std::vector<Variant> out;
  for (const WeightRule w : weight_rules)
    for (const RankRule r : rank_rules) out.push_back({w, r});
  return out;
}

void ExperimentConfig::validate() const {
  if (levels.empty()) throw InvalidArgument("config: corruption levels must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0 && levels[i] < 1.0))
      throw InvalidArgument("config: corruption level " + std::to_string(levels[i]) +
                            " outside [0, 1)");
    if (i > 0 && !(levels[i] > levels[i - 1]))
      throw InvalidArgument("config: corruption levels must be strictly increasing");
  }
  if (train_per_class < 1) throw InvalidArgument("config: train_per_class must be >= 1");
  if (weight_rules.empty() || rank_rules.empty())
    throw InvalidArgument("config: at least one weight rule and one rank rule are required");
  if (workers < 1) throw InvalidArgument("config: workers must be >= 1");
  if (target_shape && (target_shape->rows <= 0 || target_shape->cols <= 0))
    throw InvalidArgument("config: target shape must be positive");
  if (!manifest && synthetic.per_class <= train_per_class)
    throw InvalidArgument("config: synthetic per_class must exceed train_per_class");
  solver.validate();
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

class ConfigError {
 public:
  ConfigError(std::string origin) : origin_(std::move(origin)) {}
  [[noreturn]] void raise(int line, const std::string& msg) const {
    throw InvalidArgument(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

 private:
  std::string origin_;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const ConfigError& err, const Entry& e) {
  double v = 0.0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) err.raise(e.line, "expected a number, got '" + e.value + "'");
  return v;
}

long long to_int(const ConfigError& err, const Entry& e) {
  long long v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end) err.raise(e.line, "expected an integer, got '" + e.value + "'");
  return v;
}

std::uint64_t to_u64(const ConfigError& err, const Entry& e) {
  std::uint64_t v = 0;
  const char* b = e.value.data();
  const char* end = b + e.value.size();
  auto [p, ec] = std::from_chars(b, end, v);
  if (ec != std::errc() || p != end)
    err.raise(e.line, "expected a nonnegative integer, got '" + e.value + "'");
  return v;
}

bool to_bool(const ConfigError& err, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  err.raise(e.line, "expected true/false, got '" + e.value + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& origin,
                                         const std::filesystem::path& base_dir) {
  const ConfigError err(origin);
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> section_lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err.raise(line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      section_lines.emplace(section, line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) err.raise(line_no, "expected 'key = value'");
    if (section.empty()) err.raise(line_no, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) err.raise(line_no, "empty key");
    auto& entries = sections[section];
    if (entries.count(key)) err.raise(line_no, "duplicate key '" + key + "'");
    entries[key] = {trim(line.substr(eq + 1)), line_no};
  }

  ExperimentConfig c;
  std::optional<double> beta1;
  double alpha1 = c.solver.gc_weight.alpha();
  double beta2 = c.solver.gc_rank.beta(), alpha2 = c.solver.gc_rank.alpha();
  double floor = c.solver.gc_weight.weight_floor();
  std::optional<long long> target_rows, target_cols;
  int target_line = 0;
  std::string dataset_source = "synthetic";
  int dataset_line = 0;

  using Handler = std::function<void(const Entry&)>;
  const std::map<std::string, std::map<std::string, Handler>> schema = {
      {"dataset",
       {
           {"source", [&](const Entry& e) { dataset_source = e.value; dataset_line = e.line; }},
           {"manifest", [&](const Entry& e) { c.manifest = base_dir / e.value; }},
           {"target_rows", [&](const Entry& e) { target_rows = to_int(err, e); target_line = e.line; }},
           {"target_cols", [&](const Entry& e) { target_cols = to_int(err, e); target_line = e.line; }},
           {"classes", [&](const Entry& e) { c.synthetic.classes = static_cast<int>(to_int(err, e)); }},
           {"per_class", [&](const Entry& e) { c.synthetic.per_class = static_cast<int>(to_int(err, e)); }},
           {"rows", [&](const Entry& e) { c.synthetic.shape.rows = to_int(err, e); }},
           {"cols", [&](const Entry& e) { c.synthetic.shape.cols = to_int(err, e); }},
           {"seed", [&](const Entry& e) { c.synthetic.seed = to_u64(err, e); }},
       }},
      {"split",
       {
           {"train_per_class", [&](const Entry& e) { c.train_per_class = static_cast<int>(to_int(err, e)); }},
           {"seed", [&](const Entry& e) { c.split_seed = to_u64(err, e); }},
       }},
      {"corruption",
       {
           {"kind",
            [&](const Entry& e) {
              try {
                c.corruption = parse_corruption_kind(e.value);
              } catch (const InvalidArgument& ex) {
                err.raise(e.line, ex.what());
              }
            }},
           {"levels",
            [&](const Entry& e) {
              c.levels.clear();
              for (const std::string& item : split_list(e.value)) {
                const double v = to_double(err, {item, e.line});
                if (!(v >= 0.0 && v < 1.0)) err.raise(e.line, "level " + item + " outside [0, 1)");
                if (!c.levels.empty() && !(v > c.levels.back()))
                  err.raise(e.line, "levels must be strictly increasing");
                c.levels.push_back(v);
              }
              if (c.levels.empty()) err.raise(e.line, "levels list is empty");
            }},
           {"occluder",
            [&](const Entry& e) {
              c.occluder = e.value == kBuiltinTexture ? e.value : (base_dir / e.value).string();
            }},
           {"pixels_first", [&](const Entry& e) { c.pixels_first = to_bool(err, e); }},
       }},
      {"solver",
       {
           {"alpha1", [&](const Entry& e) { alpha1 = to_double(err, e); }},
           {"beta1", [&](const Entry& e) { beta1 = to_double(err, e); }},
           {"alpha2", [&](const Entry& e) { alpha2 = to_double(err, e); }},
           {"beta2", [&](const Entry& e) { beta2 = to_double(err, e); }},
           {"weight_floor", [&](const Entry& e) { floor = to_double(err, e); }},
           {"lambda1", [&](const Entry& e) { c.solver.lambda1 = to_double(err, e); }},
           {"lambda2", [&](const Entry& e) { c.solver.lambda2 = to_double(err, e); }},
           {"rho1", [&](const Entry& e) { c.solver.rho1 = to_double(err, e); }},
           {"rho2", [&](const Entry& e) { c.solver.rho2 = to_double(err, e); }},
           {"max_iter", [&](const Entry& e) { c.solver.max_iter = static_cast<int>(to_int(err, e)); }},
           {"tol", [&](const Entry& e) { c.solver.tol = to_double(err, e); }},
           {"h_mode",
            [&](const Entry& e) {
              try {
                c.solver.h_mode = parse_h_mode(e.value);
              } catch (const InvalidArgument& ex) {
                err.raise(e.line, ex.what());
              }
            }},
           {"gaussian_sigma", [&](const Entry& e) { c.solver.baseline.gaussian_sigma = to_double(err, e); }},
           {"logistic_gamma", [&](const Entry& e) { c.solver.baseline.logistic_gamma = to_double(err, e); }},
           {"logistic_beta", [&](const Entry& e) { c.solver.baseline.logistic_beta = to_double(err, e); }},
           {"logistic_theta", [&](const Entry& e) { c.solver.baseline.logistic_theta = to_double(err, e); }},
           {"irgsc_gamma", [&](const Entry& e) { c.solver.baseline.irgsc_gamma = to_double(err, e); }},
           {"logsum_eps", [&](const Entry& e) { c.solver.baseline.logsum_eps = to_double(err, e); }},
       }},
      {"methods",
       {
           {"weight_rules",
            [&](const Entry& e) {
              c.weight_rules.clear();
              std::set<std::string> seen;
              for (const std::string& item : split_list(e.value)) {
                if (!seen.insert(item).second) err.raise(e.line, "duplicate weight rule " + item);
                try {
                  c.weight_rules.push_back(parse_weight_rule(item));
                } catch (const InvalidArgument& ex) {
                  err.raise(e.line, ex.what());
                }
              }
            }},
           {"rank_rules",
            [&](const Entry& e) {
              c.rank_rules.clear();
              std::set<std::string> seen;
              for (const std::string& item : split_list(e.value)) {
                if (!seen.insert(item).second) err.raise(e.line, "duplicate rank rule " + item);
                try {
                  c.rank_rules.push_back(parse_rank_rule(item));
                } catch (const InvalidArgument& ex) {
                  err.raise(e.line, ex.what());
                }
              }
            }},
       }},
      {"output",
       {
           {"dir", [&](const Entry& e) { c.output_dir = e.value; }},
           {"overwrite", [&](const Entry& e) { c.overwrite = to_bool(err, e); }},
           {"trace_samples",
            [&](const Entry& e) {
              for (const std::string& item : split_list(e.value))
                c.trace_samples.push_back(static_cast<std::size_t>(to_u64(err, {item, e.line})));
            }},
           {"weight_map_samples",
            [&](const Entry& e) {
              for (const std::string& item : split_list(e.value))
                c.weight_map_samples.push_back(static_cast<std::size_t>(to_u64(err, {item, e.line})));
            }},
       }},
      {"run",
       {
           {"seed", [&](const Entry& e) { c.seed = to_u64(err, e); }},
           {"workers", [&](const Entry& e) { c.workers = static_cast<unsigned>(to_u64(err, e)); }},
       }},
  };

  for (const auto& [name, entries] : sections) {
    const auto sec = schema.find(name);
    if (sec == schema.end()) {
      err.raise(section_lines.at(name), "unknown section [" + name + "]");
    }
    for (const auto& [key, entry] : entries) {
      const auto handler = sec->second.find(key);
      if (handler == sec->second.end())
        err.raise(entry.line, "unknown key '" + key + "' in [" + name + "]");
      handler->second(entry);
    }
  }

  if (dataset_source == "manifest") {
    if (!c.manifest) err.raise(dataset_line, "source = manifest requires a manifest key");
  } else if (dataset_source == "synthetic") {
    c.manifest.reset();
  } else {
    err.raise(dataset_line, "unknown dataset source '" + dataset_source + "'");
  }
  if (target_rows.has_value() != target_cols.has_value())
    err.raise(target_line, "target_rows and target_cols must be given together");
  if (target_rows) c.target_shape = Shape{*target_rows, *target_cols};

  try {
    const double default_beta1 = c.corruption == CorruptionKind::mixed
                                      ? SolverConfig::for_mixed().gc_weight.beta()
                                      : SolverConfig::for_occlusion().gc_weight.beta();
    c.solver.gc_weight = GcParams(alpha1, beta1.value_or(default_beta1), floor);
    c.solver.gc_rank = GcParams(alpha2, beta2, floor);
    c.validate();
  } catch (const InvalidArgument& ex) {
    throw InvalidArgument(origin + ": " + ex.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path.string(), path.parent_path());
}

std::string format_experiment_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& items, auto&& render) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ", ";
      s += render(items[i]);
    }
    return s;
  };
  out << "[dataset]\n";
  if (c.manifest) {
    out << "source = manifest\nmanifest = " << c.manifest->string() << "\n";
  } else {
    out << "source = synthetic\nclasses = " << c.synthetic.classes
        << "\nper_class = " << c.synthetic.per_class << "\nrows = " << c.synthetic.shape.rows
        << "\ncols = " << c.synthetic.shape.cols << "\nseed = " << c.synthetic.seed << "\n";
  }
  if (c.target_shape)
    out << "target_rows = " << c.target_shape->rows << "\ntarget_cols = " << c.target_shape->cols
        << "\n";
  out << "\n[split]\ntrain_per_class = " << c.train_per_class << "\n";
  if (c.split_seed) out << "seed = " << *c.split_seed << "\n";
  out << "\n[corruption]\nkind = " << to_string(c.corruption)
      << "\nlevels = " << list(c.levels, fmt) << "\noccluder = " << c.occluder
      << "\npixels_first = " << (c.pixels_first ? "true" : "false") << "\n";
  const SolverConfig& s = c.solver;
  out << "\n[solver]\nalpha1 = " << fmt(s.gc_weight.alpha()) << "\nbeta1 = " << fmt(s.gc_weight.beta())
      << "\nalpha2 = " << fmt(s.gc_rank.alpha()) << "\nbeta2 = " << fmt(s.gc_rank.beta())
      << "\nweight_floor = " << fmt(s.gc_weight.weight_floor()) << "\nlambda1 = " << fmt(s.lambda1)
      << "\nlambda2 = " << fmt(s.lambda2) << "\nrho1 = " << fmt(s.rho1) << "\nrho2 = " << fmt(s.rho2)
      << "\nmax_iter = " << s.max_iter << "\ntol = " << fmt(s.tol) << "\nh_mode = " << to_string(s.h_mode)
      << "\ngaussian_sigma = " << fmt(s.baseline.gaussian_sigma)
      << "\nlogistic_gamma = " << fmt(s.baseline.logistic_gamma)
      << "\nlogistic_beta = " << fmt(s.baseline.logistic_beta)
      << "\nlogistic_theta = " << fmt(s.baseline.logistic_theta)
      << "\nirgsc_gamma = " << fmt(s.baseline.irgsc_gamma)
      << "\nlogsum_eps = " << fmt(s.baseline.logsum_eps) << "\n";
  out << "\n[methods]\nweight_rules = "
      << list(c.weight_rules, [](WeightRule r) { return to_string(r); })
      << "\nrank_rules = " << list(c.rank_rules, [](RankRule r) { return to_string(r); }) << "\n";
  auto ids = [](std::size_t v) { return std::to_string(v); };
  out << "\n[output]\ndir = " << c.output_dir.string()
      << "\noverwrite = " << (c.overwrite ? "true" : "false");
  if (!c.trace_samples.empty()) out << "\ntrace_samples = " << list(c.trace_samples, ids);
  if (!c.weight_map_samples.empty())
    out << "\nweight_map_samples = " << list(c.weight_map_samples, ids);
  out << "\n\n[run]\nseed = " << c.seed << "\nworkers = " << c.workers << "\n";
  return out.str();
}

}  // namespace gcrep
