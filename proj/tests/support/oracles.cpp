#include "oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace gcrep::oracle {

double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step) {
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
  double best_x = lo;
  double best_f = std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  return best_x;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, tol, &err);
}

Vector masked_residuals(const Vector& y, const Dictionary& dict, const Vector& x, const Vector& w) {
  const auto& classes = dict.classes();
  Vector out(static_cast<Eigen::Index>(classes.size()));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Vector masked = Vector::Zero(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j)
      if (dict.labels()[static_cast<std::size_t>(j)] == classes[c]) masked[j] = x[j];
    const Vector r = y - dict.columns() * masked;
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += w[i] * r[i] * r[i];
    out[static_cast<Eigen::Index>(c)] = s;
  }
  return out;
}

Vector stacked_least_squares(const Matrix& D, const Vector& a, const Vector& b, double rho1,
                             double rho2) {
  const Eigen::Index m = D.rows();
  const Eigen::Index n = D.cols();
  Matrix A(m + n, n);
  A.topRows(m) = std::sqrt(rho1) * D;
  A.bottomRows(n) = std::sqrt(rho2) * Matrix::Identity(n, n);
  Vector rhs(m + n);
  rhs.head(m) = std::sqrt(rho1) * a;
  rhs.tail(n) = std::sqrt(rho2) * b;
  return A.colPivHouseholderQr().solve(rhs);
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = uniform(rng, lo, hi);
  return M;
}

Vector random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

Matrix random_orthogonal(Rng& rng, Eigen::Index n) {
  Matrix G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = normal01(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(n, n);
}

ConstructiveInstance constructive_instance(std::uint64_t seed, Eigen::Index m, Eigen::Index n,
                                           Eigen::Index support, double noise_sigma) {
  Rng rng(seed);
  ConstructiveInstance inst;
  inst.D = random_matrix(rng, m, n, 0.0, 1.0);
  for (Eigen::Index j = 0; j < n; ++j) inst.D.col(j).normalize();
  inst.x_true = Vector::Zero(n);
  for (const std::size_t j : sample_without_replacement(rng, static_cast<std::size_t>(n),
                                                        static_cast<std::size_t>(support)))
    inst.x_true[static_cast<Eigen::Index>(j)] = uniform(rng, 0.2, 1.0);
  inst.y = inst.D * inst.x_true;
  for (Eigen::Index i = 0; i < m; ++i) inst.y[i] += noise_sigma * normal01(rng);
  return inst;
}

}  // namespace gcrep::oracle
