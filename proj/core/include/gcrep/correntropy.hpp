#pragma once

// Generalized-correntropy (GC) primitives built on the generalized Gaussian
// density G(e) = gamma * exp(-lambda * |e|^alpha), together with the
// per-pixel weight rules used by the robust regression solver.

#include <gcrep/types.hpp>

namespace gcrep {

/// Shape/bandwidth pair of the generalized Gaussian family and its derived
/// kernel constants. lambda = 1 / beta^alpha, gamma = alpha / (2 beta Gamma(1/alpha)).
class GcParams {
 public:
  static constexpr double kDefaultWeightFloor = 1e-6;

  GcParams(double alpha, double beta, double weight_floor = kDefaultWeightFloor);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double lambda() const { return lambda_; }
  double gamma() const { return gamma_; }
  /// |e| is clamped to at least this value before negative powers are taken.
  double weight_floor() const { return weight_floor_; }

  void set_alpha(double alpha);
  void set_beta(double beta);

  friend bool operator==(const GcParams&, const GcParams&) = default;

 private:
  void refresh();

  double alpha_;
  double beta_;
  double weight_floor_;
  double lambda_ = 0.0;
  double gamma_ = 0.0;
};

double ggd_density(double e, const GcParams& params);

/// Definition-1 loss: sum_j gamma * (1 - exp(-lambda |e_j / ||e||_inf|^alpha)).
/// The all-zero vector maps to exactly 0.
double gc_loss(const Vector& e, const GcParams& params);

/// Unnormalized penalty sum_j gamma * (1 - exp(-lambda |e_j|^alpha)). This is
/// the quantity the solver's weights majorize.
double gc_penalty(const Vector& e, const GcParams& params);

/// Adaptive weights w_j = exp(-lambda |e_j|^alpha) * |e_j|^(alpha-2), with
/// |e_j| clamped at the weight floor.
Vector gc_weights(const Vector& e, const GcParams& params);

/// The constant alpha * gamma * lambda / 2 that gc_weights drops. Multiplying
/// gc_weights by it yields d/d(e^2) of gamma * (1 - exp(-lambda (e^2)^(alpha/2))).
double gc_weight_scale(const GcParams& params);

/// Value of the first-order majorizer of gc_penalty in the variable e^2,
/// expanded at e_t and evaluated at e.
double gc_penalty_majorizer(const Vector& e, const Vector& e_t, const GcParams& params);

// Baseline weight rules.

/// Gaussian kernel exp(-e^2 / (2 sigma^2)); positive, 1 at e = 0.
Vector weight_baseline_gaussian(const Vector& e, double sigma);

/// Logistic weights exp(-g e^2 + g theta) / (1 + exp(-b e^2 + b theta)),
/// evaluated in log space so large e^2 never overflows.
Vector weight_baseline_logistic(const Vector& e, double gamma_l, double beta_l, double theta);

/// Simplex-constrained weights w_j = max(eta - e_j^2 / (2 gamma_r), 0) with
/// eta chosen so that sum_j w_j = 1.
Vector weight_baseline_irgsc(const Vector& e, double gamma_r);

}  // namespace gcrep
