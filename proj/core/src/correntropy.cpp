#include <gcrep/correntropy.hpp>

#include <gcrep/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace gcrep {

GcParams::GcParams(double alpha, double beta, double weight_floor)
    : alpha_(alpha), beta_(beta), weight_floor_(weight_floor) {
  if (!(weight_floor > 0.0) || !std::isfinite(weight_floor))
    throw InvalidArgument("GcParams: weight_floor must be positive and finite");
  refresh();
}

void GcParams::set_alpha(double alpha) {
  alpha_ = alpha;
  refresh();
}

void GcParams::set_beta(double beta) {
  beta_ = beta;
  refresh();
}

void GcParams::refresh() {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
    throw InvalidArgument("GcParams: alpha must be positive, got " + std::to_string(alpha_));
  if (!(beta_ > 0.0) || !std::isfinite(beta_))
    throw InvalidArgument("GcParams: beta must be positive, got " + std::to_string(beta_));
  lambda_ = std::pow(beta_, -alpha_);
  gamma_ = alpha_ / (2.0 * beta_ * std::tgamma(1.0 / alpha_));
}

double ggd_density(double e, const GcParams& p) {
  return p.gamma() * std::exp(-p.lambda() * std::pow(std::abs(e), p.alpha()));
}

double gc_loss(const Vector& e, const GcParams& p) {
  const double scale = e.size() == 0 ? 0.0 : e.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (const double v : e)
    sum += -std::expm1(-p.lambda() * std::pow(std::abs(v / scale), p.alpha()));
  return p.gamma() * sum;
}

double gc_penalty(const Vector& e, const GcParams& p) {
  double sum = 0.0;
  for (const double v : e) sum += -std::expm1(-p.lambda() * std::pow(std::abs(v), p.alpha()));
  return p.gamma() * sum;
}

Vector gc_weights(const Vector& e, const GcParams& p) {
  const double a = p.alpha();
  const double lam = p.lambda();
  const double floor = p.weight_floor();
  Vector w(e.size());
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    const double mag = std::max(std::abs(e[j]), floor);
    w[j] = std::exp(-lam * std::pow(mag, a)) * std::pow(mag, a - 2.0);
  }
  return w;
}

double gc_weight_scale(const GcParams& p) { return 0.5 * p.alpha() * p.gamma() * p.lambda(); }

double gc_penalty_majorizer(const Vector& e, const Vector& e_t, const GcParams& p) {
  if (e.size() != e_t.size())
    throw InvalidArgument("gc_penalty_majorizer: size mismatch");
  const Vector slope = gc_weight_scale(p) * gc_weights(e_t, p);
  return gc_penalty(e_t, p) + slope.dot((e.array().square() - e_t.array().square()).matrix());
}

Vector weight_baseline_gaussian(const Vector& e, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("weight_baseline_gaussian: sigma must be positive");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return (-(e.array().square()) * inv).exp().matrix();
}

Vector weight_baseline_logistic(const Vector& e, double gamma_l, double beta_l, double theta) {
  if (!(gamma_l > 0.0) || !(beta_l > 0.0))
    throw InvalidArgument("weight_baseline_logistic: gamma and beta must be positive");
  Vector w(e.size());
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    const double margin = theta - e[j] * e[j];
    const double num = gamma_l * margin;
    const double den = beta_l * margin;
    // log(1 + exp(den)) without overflow
    const double softplus = std::max(den, 0.0) + std::log1p(std::exp(-std::abs(den)));
    w[j] = std::exp(num - softplus);
  }
  return w;
}

Vector weight_baseline_irgsc(const Vector& e, double gamma_r) {
  if (!(gamma_r > 0.0)) throw InvalidArgument("weight_baseline_irgsc: gamma_r must be positive");
  const Eigen::Index m = e.size();
  if (m == 0) return Vector();
  const Vector d = e.array().square() / (2.0 * gamma_r);
  const double dmin = d.minCoeff();
  const double dmax = d.maxCoeff();
  if (dmax == dmin) return Vector::Constant(m, 1.0 / static_cast<double>(m));

  auto mass = [&](double eta) { return (eta - d.array()).max(0.0).sum(); };
  // mass(dmin) = 0 and mass(dmin + 1) >= 1 bracket the multiplier.
  double lo = dmin;
  double hi = dmin + 1.0;
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < 1.0 ? lo : hi) = mid;
  }
  // Solve exactly on the active set found by bisection.
  double eta = 0.5 * (lo + hi);
  for (int pass = 0; pass < 3; ++pass) {
    double active_sum = 0.0;
    Eigen::Index active = 0;
    for (Eigen::Index j = 0; j < m; ++j)
      if (d[j] < eta) {
        active_sum += d[j];
        ++active;
      }
    if (active == 0) break;
    const double refined = (1.0 + active_sum) / static_cast<double>(active);
    if (refined == eta) break;
    eta = refined;
  }
  return (eta - d.array()).max(0.0).matrix();
}

}  // namespace gcrep
