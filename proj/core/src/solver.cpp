#include <gcrep/solver.hpp>

#include <gcrep/error.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gcrep {

std::string to_string(HMode mode) {
  switch (mode) {
    case HMode::paper_faithful: return "paper_faithful";
    case HMode::exact_l2: return "exact_l2";
  }
  return "?";
}

std::string to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::gc: return "gc";
    case WeightRule::gaussian: return "gaussian";
    case WeightRule::logistic: return "logistic";
    case WeightRule::irgsc: return "irgsc";
    case WeightRule::uniform: return "uniform";
  }
  return "?";
}

std::string to_string(RankRule rule) {
  switch (rule) {
    case RankRule::gc: return "gc";
    case RankRule::nuclear: return "nuclear";
    case RankRule::logsum: return "logsum";
    case RankRule::none: return "none";
  }
  return "?";
}

HMode parse_h_mode(const std::string& text) {
  if (text == "paper_faithful") return HMode::paper_faithful;
  if (text == "exact_l2") return HMode::exact_l2;
  throw InvalidArgument("unknown h_mode '" + text + "' (expected paper_faithful|exact_l2)");
}

WeightRule parse_weight_rule(const std::string& text) {
  for (auto r : {WeightRule::gc, WeightRule::gaussian, WeightRule::logistic, WeightRule::irgsc,
                 WeightRule::uniform})
    if (text == to_string(r)) return r;
  throw InvalidArgument("unknown weight rule '" + text +
                        "' (expected gc|gaussian|logistic|irgsc|uniform)");
}

RankRule parse_rank_rule(const std::string& text) {
  for (auto r : {RankRule::gc, RankRule::nuclear, RankRule::logsum, RankRule::none})
    if (text == to_string(r)) return r;
  throw InvalidArgument("unknown rank rule '" + text + "' (expected gc|nuclear|logsum|none)");
}

SolverConfig SolverConfig::for_occlusion() { return SolverConfig{}; }

SolverConfig SolverConfig::for_mixed() {
  SolverConfig c;
  c.gc_weight.set_beta(0.11);
  return c;
}

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("SolverConfig: ") + what);
  };
  require(rho1 > 0.0 && std::isfinite(rho1), "rho1 must be positive");
  require(rho2 > 0.0 && std::isfinite(rho2), "rho2 must be positive");
  require(lambda1 >= 0.0 && std::isfinite(lambda1), "lambda1 must be nonnegative");
  require(lambda2 >= 0.0 && std::isfinite(lambda2), "lambda2 must be nonnegative");
  require(max_iter >= 1, "max_iter must be at least 1");
  require(tol > 0.0, "tol must be positive");
  require(baseline.gaussian_sigma > 0.0, "gaussian_sigma must be positive");
  require(baseline.logistic_gamma > 0.0 && baseline.logistic_beta > 0.0,
          "logistic gamma/beta must be positive");
  require(baseline.irgsc_gamma > 0.0, "irgsc_gamma must be positive");
  require(baseline.logsum_eps > 0.0, "logsum_eps must be positive");
}

std::vector<std::string> SolverConfig::conformance_notes() const {
  std::vector<std::string> notes;
  const double a = gc_weight.alpha();
  if (!(a > 1.0 && a < 2.0)) {
    std::ostringstream msg;
    msg << "alpha1 = " << a << " lies outside the recommended range (1, 2)";
    notes.push_back(msg.str());
  }
  return notes;
}

SolverContext::SolverContext(Matrix D, Shape image_shape, double rho1, double rho2)
    : D_(std::move(D)), shape_(image_shape), rho1_(rho1), rho2_(rho2) {
  if (D_.size() == 0) throw InvalidArgument("SolverContext: empty dictionary");
  if (shape_.size() != D_.rows())
    throw InvalidArgument("SolverContext: image shape " + std::to_string(shape_.rows) + "x" +
                          std::to_string(shape_.cols) + " does not match " +
                          std::to_string(D_.rows()) + " dictionary rows");
  if (!(rho1 > 0.0) || !(rho2 > 0.0))
    throw InvalidArgument("SolverContext: rho1 and rho2 must be positive");
  if (!D_.allFinite()) throw InvalidArgument("SolverContext: dictionary has non-finite entries");
  Matrix normal = rho1_ * (D_.transpose() * D_);
  ++gram_formations_;
  normal.diagonal().array() += rho2_;
  system_.compute(normal);
  if (system_.info() != Eigen::Success)
    throw NumericalError("SolverContext: Cholesky factorization of rho1 D^T D + rho2 I failed");
}

SolverContext::SolverContext(const Dictionary& dictionary, const SolverConfig& config)
    : SolverContext(dictionary.columns(), dictionary.image_shape(), config.rho1, config.rho2) {}

namespace {

void check_inputs(const Vector& y, const SolverContext& ctx, const SolverConfig& config) {
  config.validate();
  if (y.size() != ctx.m())
    throw InvalidArgument("solve: y has length " + std::to_string(y.size()) + ", expected " +
                          std::to_string(ctx.m()));
  if (!y.allFinite()) throw InvalidArgument("solve: y contains non-finite entries");
  if (config.rho1 != ctx.rho1() || config.rho2 != ctx.rho2())
    throw InvalidArgument("solve: context was factored with different rho1/rho2");
}

Vector h_map(const Vector& x, const Vector& v2, const SolverConfig& c) {
  if (c.h_mode == HMode::paper_faithful) return (x + v2 / c.rho2).cwiseMax(0.0);
  return ((c.rho2 * x + v2) / (2.0 * c.lambda2 + c.rho2)).cwiseMax(0.0);
}

}  // namespace

SolverState initial_state(const Vector& y, const SolverContext& ctx) {
  SolverState s;
  const Eigen::Index n = ctx.n();
  s.e = y;
  s.e_hat = y;
  s.x = Vector::Constant(n, 1.0 / static_cast<double>(n));
  s.h = Vector::Zero(n);
  s.v1 = Vector::Zero(y.size());
  s.v2 = Vector::Zero(n);
  s.w = Vector::Ones(y.size());
  s.shape = ctx.image_shape();
  return s;
}

void update_weights(SolverState& s, const SolverConfig& c) {
  const BaselineParams& b = c.baseline;
  switch (c.weight_rule) {
    case WeightRule::gc: s.w = gc_weights(s.e, c.gc_weight); break;
    case WeightRule::gaussian: s.w = weight_baseline_gaussian(s.e, b.gaussian_sigma); break;
    case WeightRule::logistic:
      s.w = weight_baseline_logistic(s.e, b.logistic_gamma, b.logistic_beta, b.logistic_theta);
      break;
    case WeightRule::irgsc: s.w = weight_baseline_irgsc(s.e, b.irgsc_gamma); break;
    case WeightRule::uniform: s.w = Vector::Ones(s.e.size()); break;
  }
}

void update_e(SolverState& s, const Vector& y, const SolverContext& ctx, const SolverConfig& c) {
  const Vector target = y - ctx.D() * s.x + s.v1 / c.rho1;
  s.e_hat = (target.array() / (1.0 + 2.0 * s.w.array() / c.rho1)).matrix();

  const RowMatrix E_hat = as_matrix(s.e_hat, s.shape);
  const BaselineParams& b = c.baseline;
  switch (c.rank_rule) {
    case RankRule::none:
      s.e = s.e_hat;
      s.rank_weights.resize(0);
      s.sigma_out.resize(0);
      return;
    case RankRule::gc: {
      ShrinkResult r = lowrank_step_detail(E_hat, c.lambda1, c.gc_rank);
      s.e = flatten(r.matrix);
      s.rank_weights = std::move(r.weights);
      s.sigma_out = std::move(r.sigma_out);
      break;
    }
    case RankRule::nuclear:
    case RankRule::logsum: {
      const SvdFactors f = svd(E_hat);
      s.rank_weights = c.rank_rule == RankRule::nuclear
                           ? Vector::Ones(f.sigma.size())
                           : rank_weights_logsum(f.sigma, b.logsum_eps);
      s.sigma_out = (f.sigma.array() - c.lambda1 * s.rank_weights.array()).max(0.0).matrix();
      s.e = c.lambda1 == 0.0 ? s.e_hat : flatten(f.reconstruct(s.sigma_out));
      break;
    }
  }
  ++s.counters.svds;
}

void update_h(SolverState& s, const SolverConfig& c) { s.h = h_map(s.x, s.v2, c); }

void update_x(SolverState& s, const Vector& y, const SolverContext& ctx, const SolverConfig& c) {
  const Vector rhs = ctx.D().transpose() * (c.rho1 * (y - s.e) + s.v1) + c.rho2 * s.h - s.v2;
  s.x = ctx.system().solve(rhs);
  ++s.counters.linear_solves;
  if (!s.x.allFinite()) throw NumericalError("update_x: linear solve produced non-finite values");
}

void update_duals(SolverState& s, const Vector& y, const SolverContext& ctx,
                  const SolverConfig& c) {
  s.v1 += c.rho1 * (y - ctx.D() * s.x - s.e);
  s.v2 += c.rho2 * (s.x - s.h);
}

std::array<double, 5> kkt_residuals(const SolverState& s, const Vector& y,
                                    const SolverContext& ctx, const SolverConfig& c) {
  const Matrix& D = ctx.D();
  const Vector fit = y - D * s.x;
  std::array<double, 5> r{};
  r[0] = (fit - s.e).norm();
  r[1] = (s.x - s.h).norm();
  r[2] = ((2.0 * s.w.array() + c.rho1) * s.e_hat.array() - s.v1.array() - c.rho1 * fit.array())
             .matrix()
             .norm();
  r[3] = (s.h - h_map(s.x, s.v2, c)).norm();
  // (rho1 D^T D + rho2) x - rho1 D^T y + rho1 D^T e - D^T v1 + v2 - rho2 h
  const Vector grad =
      D.transpose() * (c.rho1 * (s.e - fit) - s.v1) + c.rho2 * (s.x - s.h) + s.v2;
  r[4] = grad.norm();
  return r;
}

double stopping_eps(const SolverState& s, const Vector& y, const SolverContext& ctx) {
  const double r1 = (y - ctx.D() * s.x - s.e).norm();
  const double r2 = (s.x - s.h).norm();
  return std::max(r1 / std::max(y.norm(), 1.0), r2 / std::max(s.x.norm(), 1.0));
}

Solution solve(const Vector& y, const SolverContext& ctx, const SolverConfig& c) {
  check_inputs(y, ctx, c);
  SolverState s = initial_state(y, ctx);
  Solution out;
  double eps = 0.0;
  for (int t = 1; t <= c.max_iter; ++t) {
    update_weights(s, c);
    update_e(s, y, ctx, c);
    update_h(s, c);
    update_x(s, y, ctx, c);
    update_duals(s, y, ctx, c);
    s.iter = t;

    eps = stopping_eps(s, y, ctx);
    if (c.record_trace) {
      IterationRecord rec;
      rec.iteration = t;
      rec.r1 = (y - ctx.D() * s.x - s.e).norm();
      rec.r2 = (s.x - s.h).norm();
      rec.eps = eps;
      rec.kkt = kkt_residuals(s, y, ctx, c);
      double rank_term = 0.0;
      if (s.rank_weights.size() > 0) rank_term = s.rank_weights.dot(s.sigma_out);
      rec.surrogate = s.w.dot(s.e_hat.cwiseAbs2()) + c.lambda1 * rank_term +
                      c.lambda2 * s.h.squaredNorm();
      s.trace.push_back(rec);
    }
    if (eps <= c.tol) {
      out.converged = true;
      break;
    }
  }
  out.x_star = s.h;
  out.w_star = s.w;
  out.e_star = s.e;
  out.iterations = s.iter;
  out.final_eps = eps;
  out.kkt = kkt_residuals(s, y, ctx, c);
  out.trace = std::move(s.trace);
  out.counters = s.counters;
  return out;
}

Solution solve(const Vector& y, const Dictionary& dictionary, const SolverConfig& config) {
  config.validate();
  const SolverContext ctx(dictionary, config);
  Solution s = solve(y, ctx, config);
  s.counters.gram_formations += ctx.gram_formations();
  return s;
}

}  // namespace gcrep
