#pragma once

// Singular-value machinery for low-rank estimation of error images:
// a deterministic economy SVD, nuclear-norm and weighted singular value
// thresholding, and the GC rank surrogate with its reweighted shrinkage step.

#include <gcrep/correntropy.hpp>
#include <gcrep/types.hpp>

namespace gcrep {

/// Economy SVD E = U diag(sigma) V^T with r = min(rows, cols).
/// sigma is nonincreasing; in every column of U the entry of largest
/// magnitude is nonnegative (V is flipped to compensate).
struct SvdFactors {
  Matrix U;
  Vector sigma;
  Matrix V;

  RowMatrix reconstruct() const;
  RowMatrix reconstruct(const Vector& singular_values) const;
};

/// Throws NumericalError on non-finite input or output.
SvdFactors svd(const RowMatrix& E);

/// Minimizer of 0.5 ||X - E||_F^2 + tau ||X||_*.
RowMatrix svt_nuclear(const RowMatrix& E, double tau);

/// U diag(max(sigma_i - weights_i * tau, 0)) V^T.
RowMatrix svt_weighted(const RowMatrix& E, double tau, const Vector& weights);

/// Derivative of the GC rank surrogate at each singular value:
/// gamma * lambda * alpha * exp(-lambda sigma^alpha) * sigma^(alpha-1).
Vector rank_weights_gc(const Vector& sigma, const GcParams& params);

/// sum_i (1 - exp(-lambda sigma_i^alpha)), times gamma unless normalized.
double gc_rank_surrogate(const Vector& sigma, const GcParams& params, bool normalized);

/// Log-sum reweighting 1 / (sigma + eps).
Vector rank_weights_logsum(const Vector& sigma, double eps);

/// Everything produced by one reweighted shrinkage step.
struct ShrinkResult {
  RowMatrix matrix;
  Vector sigma_in;
  Vector weights;
  Vector sigma_out;
};

/// One GC-reweighted SVT step: weights from rank_weights_gc evaluated at the
/// singular values of E_hat, then sigma_i <- max(sigma_i - w_i * lambda1, 0).
RowMatrix lowrank_step(const RowMatrix& E_hat, double lambda1, const GcParams& params);
ShrinkResult lowrank_step_detail(const RowMatrix& E_hat, double lambda1, const GcParams& params);

}  // namespace gcrep
