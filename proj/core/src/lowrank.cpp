#include <gcrep/lowrank.hpp>

#include <gcrep/error.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gcrep {

RowMatrix SvdFactors::reconstruct() const { return reconstruct(sigma); }

RowMatrix SvdFactors::reconstruct(const Vector& singular_values) const {
  return U * singular_values.asDiagonal() * V.transpose();
}

SvdFactors svd(const RowMatrix& E) {
  if (!E.allFinite()) throw NumericalError("svd: input contains non-finite entries");
  const Eigen::Index r = std::min(E.rows(), E.cols());
  SvdFactors f;
  if (r == 0) {
    f.U = Matrix::Zero(E.rows(), 0);
    f.V = Matrix::Zero(E.cols(), 0);
    return f;
  }
  Eigen::JacobiSVD<Matrix> decomposition(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
  f.U = decomposition.matrixU();
  f.sigma = decomposition.singularValues();
  f.V = decomposition.matrixV();
  if (decomposition.info() != Eigen::Success || !f.U.allFinite() || !f.V.allFinite() ||
      !f.sigma.allFinite()) {
    std::ostringstream msg;
    msg << "svd: failed to converge on " << E.rows() << "x" << E.cols()
        << " matrix (|E|_F=" << E.norm() << ", max|e|=" << E.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  for (Eigen::Index k = 0; k < r; ++k) {
    Eigen::Index pivot = 0;
    f.U.col(k).cwiseAbs().maxCoeff(&pivot);
    if (f.U(pivot, k) < 0.0) {
      f.U.col(k) = -f.U.col(k);
      f.V.col(k) = -f.V.col(k);
    }
  }
  return f;
}

RowMatrix svt_nuclear(const RowMatrix& E, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("svt_nuclear: tau must be nonnegative");
  if (tau == 0.0) return E;
  const SvdFactors f = svd(E);
  return f.reconstruct((f.sigma.array() - tau).max(0.0).matrix());
}

RowMatrix svt_weighted(const RowMatrix& E, double tau, const Vector& weights) {
  if (!(tau >= 0.0)) throw InvalidArgument("svt_weighted: tau must be nonnegative");
  const SvdFactors f = svd(E);
  if (weights.size() != f.sigma.size())
    throw InvalidArgument("svt_weighted: expected " + std::to_string(f.sigma.size()) +
                          " weights, got " + std::to_string(weights.size()));
  if ((weights.array() < 0.0).any())
    throw InvalidArgument("svt_weighted: weights must be nonnegative");
  return f.reconstruct((f.sigma.array() - tau * weights.array()).max(0.0).matrix());
}

Vector rank_weights_gc(const Vector& sigma, const GcParams& p) {
  const double a = p.alpha();
  const double lam = p.lambda();
  const double scale = p.gamma() * lam * a;
  Vector w(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    // sigma^(alpha-1) diverges at 0 only for alpha < 1
    const double s = a < 1.0 ? std::max(sigma[i], p.weight_floor()) : sigma[i];
    w[i] = scale * std::exp(-lam * std::pow(s, a)) * std::pow(s, a - 1.0);
  }
  return w;
}

double gc_rank_surrogate(const Vector& sigma, const GcParams& p, bool normalized) {
  double sum = 0.0;
  for (const double s : sigma) sum += -std::expm1(-p.lambda() * std::pow(s, p.alpha()));
  return normalized ? sum : p.gamma() * sum;
}

Vector rank_weights_logsum(const Vector& sigma, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("rank_weights_logsum: eps must be positive");
  return (sigma.array() + eps).inverse().matrix();
}

ShrinkResult lowrank_step_detail(const RowMatrix& E_hat, double lambda1, const GcParams& p) {
  if (!(lambda1 >= 0.0)) throw InvalidArgument("lowrank_step: lambda1 must be nonnegative");
  ShrinkResult out;
  const SvdFactors f = svd(E_hat);
  out.sigma_in = f.sigma;
  out.weights = rank_weights_gc(f.sigma, p);
  if (lambda1 == 0.0) {
    out.matrix = E_hat;
    out.sigma_out = f.sigma;
    return out;
  }
  out.sigma_out = (f.sigma.array() - lambda1 * out.weights.array()).max(0.0).matrix();
  out.matrix = f.reconstruct(out.sigma_out);
  return out;
}

RowMatrix lowrank_step(const RowMatrix& E_hat, double lambda1, const GcParams& p) {
  return lowrank_step_detail(E_hat, lambda1, p).matrix;
}

}  // namespace gcrep
