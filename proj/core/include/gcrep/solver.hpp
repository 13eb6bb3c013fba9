#pragma once

// Majorization-minimization + ADMM solver for GC-weighted, low-rank-regularized
// nonnegative representation of a query vector y over a dictionary D:
//
//   min  f_GC(e) + lambda1 f_GC(sigma(E)) + lambda2 ||h||^2
//   s.t. y - D x = e,  E = reshape(e),  x = h >= 0.
//
// Every outer iteration refreshes the pixel weights from the previous error,
// then runs one sweep of the e, h and x updates followed by dual ascent.

#include <gcrep/correntropy.hpp>
#include <gcrep/dictionary.hpp>
#include <gcrep/lowrank.hpp>
#include <gcrep/types.hpp>

#include <Eigen/Cholesky>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gcrep {

enum class HMode {
  paper_faithful,  ///< h = max(x + v2 / rho2, 0); ignores lambda2
  exact_l2,        ///< h = max((rho2 x + v2) / (2 lambda2 + rho2), 0)
};

/// Pixel weight rule refreshed at the start of each iteration.
enum class WeightRule { gc, gaussian, logistic, irgsc, uniform };

/// Shrinkage applied to the reshaped error in the second half of the e-update.
enum class RankRule { gc, nuclear, logsum, none };

std::string to_string(HMode mode);
std::string to_string(WeightRule rule);
std::string to_string(RankRule rule);
HMode parse_h_mode(const std::string& text);
WeightRule parse_weight_rule(const std::string& text);
RankRule parse_rank_rule(const std::string& text);

/// Parameters of the comparison weight/rank rules.
struct BaselineParams {
  double gaussian_sigma = 0.1;
  double logistic_gamma = 800.0;
  double logistic_beta = 800.0;
  double logistic_theta = 0.01;
  double irgsc_gamma = 0.01;
  double logsum_eps = 0.1;
};

struct SolverConfig {
  GcParams gc_weight{1.7, 0.07};
  GcParams gc_rank{1.0, 0.7};
  double lambda1 = 0.01;
  double lambda2 = 1.0;
  double rho1 = 1.0;
  double rho2 = 0.1;
  int max_iter = 100;
  double tol = 1e-5;
  HMode h_mode = HMode::paper_faithful;
  WeightRule weight_rule = WeightRule::gc;
  RankRule rank_rule = RankRule::gc;
  BaselineParams baseline;
  bool record_trace = true;

  /// Defaults tuned for block occlusion (beta1 = 0.07).
  static SolverConfig for_occlusion();
  /// Defaults tuned for occlusion-pixel mixed corruption (beta1 = 0.11).
  static SolverConfig for_mixed();

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
  /// Soft warnings, e.g. alpha1 outside the recommended open interval (1, 2).
  std::vector<std::string> conformance_notes() const;
};

/// Dictionary plus the Cholesky factor of (rho1 D^T D + rho2 I). Built once
/// and shared read-only by every solve that uses the same rho1/rho2.
class SolverContext {
 public:
  SolverContext(Matrix D, Shape image_shape, double rho1, double rho2);
  SolverContext(const Dictionary& dictionary, const SolverConfig& config);

  const Matrix& D() const { return D_; }
  Shape image_shape() const { return shape_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }
  const Eigen::LLT<Matrix>& system() const { return system_; }
  /// Number of D^T D products formed by this context (always 1).
  int gram_formations() const { return gram_formations_; }

  Eigen::Index m() const { return D_.rows(); }
  Eigen::Index n() const { return D_.cols(); }

 private:
  Matrix D_;
  Shape shape_;
  double rho1_;
  double rho2_;
  Eigen::LLT<Matrix> system_;
  int gram_formations_ = 0;
};

struct IterationRecord {
  int iteration = 0;
  double r1 = 0.0;  ///< ||y - D x - e||_2
  double r2 = 0.0;  ///< ||x - h||_2
  double eps = 0.0;
  std::array<double, 5> kkt{};
  /// Majorized objective sum_j w_j ehat_j^2 + lambda1 sum_i omega_i sigma_i'
  /// + lambda2 ||h||^2 minimized by this iteration's subproblems.
  double surrogate = 0.0;
};

struct OpCounters {
  std::int64_t svds = 0;
  std::int64_t linear_solves = 0;
  std::int64_t gram_formations = 0;
};

struct SolverState {
  Vector e;      ///< error after the low-rank step
  Vector e_hat;  ///< error after the weighted closed-form step
  Vector x;
  Vector h;
  Vector v1;
  Vector v2;
  Vector w;
  Shape shape;
  int iter = 0;
  OpCounters counters;
  std::vector<IterationRecord> trace;
  /// Rank-rule weights and output singular values from the last e-update.
  Vector rank_weights;
  Vector sigma_out;

  /// Row-major reshape of e.
  Eigen::Map<const RowMatrix> error_matrix() const { return as_matrix(e, shape); }
};

struct Solution {
  /// The nonnegative split variable h at termination.
  Vector x_star;
  Vector w_star;
  Vector e_star;
  int iterations = 0;
  bool converged = false;
  double final_eps = 0.0;
  std::array<double, 5> kkt{};
  std::vector<IterationRecord> trace;
  OpCounters counters;
};

/// e = y, h = 0, x = 1/n, v1 = v2 = 0.
SolverState initial_state(const Vector& y, const SolverContext& ctx);

void update_weights(SolverState& state, const SolverConfig& config);
/// Weighted closed-form step followed by the rank shrinkage of the reshaped error.
void update_e(SolverState& state, const Vector& y, const SolverContext& ctx,
              const SolverConfig& config);
void update_h(SolverState& state, const SolverConfig& config);
void update_x(SolverState& state, const Vector& y, const SolverContext& ctx,
              const SolverConfig& config);
void update_duals(SolverState& state, const Vector& y, const SolverContext& ctx,
                  const SolverConfig& config);

/// Norms of the five stationarity/feasibility conditions at the current state:
/// (a) y - Dx - e, (b) x - h, (c) (2w + rho1) ehat - v1 - rho1 (y - Dx),
/// (d) h - hmap(x, v2), (e) dL/dx. (c) measures the weighted step only; the
/// low-rank shrinkage carries no multiplier.
std::array<double, 5> kkt_residuals(const SolverState& state, const Vector& y,
                                    const SolverContext& ctx, const SolverConfig& config);

/// max(||y - Dx - e|| / max(||y||, 1), ||x - h|| / max(||x||, 1)).
double stopping_eps(const SolverState& state, const Vector& y, const SolverContext& ctx);

Solution solve(const Vector& y, const SolverContext& ctx, const SolverConfig& config);
/// Convenience overload; forms and factors the normal matrix for this call only.
Solution solve(const Vector& y, const Dictionary& dictionary, const SolverConfig& config);

}  // namespace gcrep
