#include "csc/linalg.hpp"

#include <cmath>
#include <random>
#include <string>

namespace csc {

Eigen::VectorXd conjugate_gradient(const LinearMap& a, const Eigen::VectorXd& b,
                                   double tol, int max_iter, double* residual_out) {
  if (tol <= 0.0) throw std::invalid_argument("conjugate_gradient: non-positive tol");
  if (max_iter < 1) throw std::invalid_argument("conjugate_gradient: max_iter < 1");
  if (!b.allFinite()) throw std::invalid_argument("conjugate_gradient: non-finite rhs");

  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (bnorm == 0.0) {
    if (residual_out) *residual_out = 0.0;
    return x;
  }

  Eigen::VectorXd r = b;  // residual of the zero iterate
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  for (int k = 0; k < max_iter; ++k) {
    if (std::sqrt(rs) <= tol * bnorm) break;
    Eigen::VectorXd ap = a.apply(p);
    if (!ap.allFinite())
      throw NumericalFailure("conjugate_gradient: non-finite operator output at iteration " +
                             std::to_string(k));
    const double denom = p.dot(ap);
    if (denom <= 0.0 || !std::isfinite(denom))
      throw NumericalFailure("conjugate_gradient: operator not positive-definite at iteration " +
                             std::to_string(k));
    const double alpha = rs / denom;
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = r.squaredNorm();
    if (!std::isfinite(rs_new))
      throw NumericalFailure("conjugate_gradient: non-finite residual at iteration " +
                             std::to_string(k));
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  if (residual_out) *residual_out = std::sqrt(rs) / bnorm;
  return x;
}

double power_method(const LinearMap& a, int iters, unsigned seed) {
  if (iters < 1) throw std::invalid_argument("power_method: iters < 1");
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::VectorXd v(a.dimension);
  for (int attempt = 0; attempt < 3; ++attempt) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    if (v.norm() > 0.0) break;
    if (attempt == 2)
      throw NumericalFailure("power_method: could not draw a nonzero start vector");
  }
  v.normalize();

  double eigenvalue = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd av = a.apply(v);
    if (!av.allFinite())
      throw NumericalFailure("power_method: non-finite operator output at iteration " +
                             std::to_string(k));
    eigenvalue = v.dot(av);  // Rayleigh quotient (v is unit)
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;  // v in the null space: PSD estimate 0
    v = av / norm;
  }
  return std::max(eigenvalue, 0.0);
}

}  // namespace csc
