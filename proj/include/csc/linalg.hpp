#ifndef CSC_LINALG_HPP
#define CSC_LINALG_HPP

#include <Eigen/Core>
#include <functional>
#include <stdexcept>

namespace csc {

/// Raised when an iterative solver encounters non-finite values.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix-free linear operator on vectors of a fixed dimension.
struct LinearMap {
  Eigen::Index dimension = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const { return apply(v); }
};

/// Conjugate gradient for symmetric positive-definite maps, from a zero
/// initial iterate. Stops at ||Ax - b|| <= tol * ||b|| or max_iter,
/// whichever first; the achieved relative residual is reported through
/// residual_out when given.
Eigen::VectorXd conjugate_gradient(const LinearMap& a, const Eigen::VectorXd& b,
                                   double tol, int max_iter,
                                   double* residual_out = nullptr);

/// Largest-eigenvalue estimate for a symmetric PSD map via Rayleigh
/// quotient iteration from a seeded random start.
double power_method(const LinearMap& a, int iters, unsigned seed);

}  // namespace csc

#endif
