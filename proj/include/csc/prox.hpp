#ifndef CSC_PROX_HPP
#define CSC_PROX_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace csc {

/// Elementwise soft-thresholding: sign(x) .* max(|x| - lambda, 0).
Eigen::VectorXd shrink(const Eigen::VectorXd& x, double lambda);

/// Euclidean projection onto { z : ||z||_1 <= radius }, by sorting the
/// magnitudes and a single shrink with the resulting threshold.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& x, double radius);

/// ||x - project_l1_ball(x, radius)||_2; a convex function of radius.
double dist_l1_ball(const Eigen::VectorXd& x, double radius);

struct RadiusSearchResult {
  double t_star = 0.0;
  double objective = 0.0;
  int evaluations = 0;
};

/// Minimizes lambda*t + sum_i dist(v_i, ball(t))^2 over t >= 0 by
/// golden-section search on [0, max_i ||v_i||_1]. Returns the smallest
/// minimizer when the objective is flat (lambda = 0).
RadiusSearchResult solve_radius(const std::vector<Eigen::VectorXd>& vectors,
                                double lambda, double tol);

namespace detail {

/// Sorted-magnitude profile of a vector, precomputed once so that the
/// l1-ball shrink threshold and squared distance can be evaluated for
/// many radii in O(log K) each.
struct BallProfile {
  Eigen::VectorXd cum;    // cumulative sums of descending |x|
  Eigen::VectorXd cumsq;  // cumulative sums of squares

  static BallProfile from(const Eigen::VectorXd& x);

  double l1_norm() const { return cum.size() ? cum[cum.size() - 1] : 0.0; }
  /// Shrink threshold lambda* achieving ||shrink(x,lambda*)||_1 = t
  /// (0 when x is already inside the ball).
  double shrink_threshold(double t) const;
  double dist_sq(double t) const;
};

/// Golden-section minimizer state shared by solve_radius and the ADMM
/// split update; f must be convex on [lo, hi].
struct GoldenResult {
  double x;
  int evaluations;
};
GoldenResult golden_section(const std::function<double(double)>& f, double lo,
                            double hi, double tol);

}  // namespace detail

}  // namespace csc

#endif
