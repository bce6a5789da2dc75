#include "csc/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csc {

Eigen::VectorXd shrink(const Eigen::VectorXd& x, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("shrink: negative lambda");
  return x.array().sign() * (x.array().abs() - lambda).max(0.0);
}

namespace detail {

BallProfile BallProfile::from(const Eigen::VectorXd& x) {
  const Eigen::Index k = x.size();
  Eigen::VectorXd mags = x.array().abs();
  std::sort(mags.data(), mags.data() + k, std::greater<double>());
  BallProfile p;
  p.cum.resize(k);
  p.cumsq.resize(k);
  double s = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    s += mags[i];
    sq += mags[i] * mags[i];
    p.cum[i] = s;
    p.cumsq[i] = sq;
  }
  return p;
}

double BallProfile::shrink_threshold(double t) const {
  const Eigen::Index k = cum.size();
  if (k == 0 || l1_norm() <= t) return 0.0;
  // Largest j (1-based) with sorted_j > (cum_j - t) / j. The predicate
  // is monotone, so binary search applies.
  auto keeps = [&](Eigen::Index j) {  // j in [1, k]
    const double sj = j == 1 ? cum[0] : cum[j - 1] - cum[j - 2];
    return static_cast<double>(j) * sj - cum[j - 1] + t > 0.0;
  };
  Eigen::Index lo = 1, hi = k;  // keeps(1) always holds for t >= 0, x != 0
  if (!keeps(1)) return cum[0];  // degenerate t = 0 with one entry dominating
  while (lo < hi) {
    const Eigen::Index mid = (lo + hi + 1) / 2;
    if (keeps(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  return (cum[lo - 1] - t) / static_cast<double>(lo);
}

double BallProfile::dist_sq(double t) const {
  const Eigen::Index k = cum.size();
  if (k == 0 || l1_norm() <= t) return 0.0;
  const double lambda = shrink_threshold(t);
  if (lambda <= 0.0) return 0.0;
  // Count of surviving entries at this threshold: entries with
  // magnitude > lambda each contribute lambda^2; the clipped tail
  // contributes its own squared mass.
  Eigen::Index lo = 1, hi = k;
  auto survives = [&](Eigen::Index j) {
    const double sj = j == 1 ? cum[0] : cum[j - 1] - cum[j - 2];
    return sj > lambda;
  };
  if (!survives(1)) return cumsq[k - 1];
  while (lo < hi) {
    const Eigen::Index mid = (lo + hi + 1) / 2;
    if (survives(mid))
      lo = mid;
    else
      hi = mid - 1;
  }
  const double tail = cumsq[k - 1] - cumsq[lo - 1];
  return static_cast<double>(lo) * lambda * lambda + tail;
}

GoldenResult golden_section(const std::function<double(double)>& f, double lo,
                            double hi, double tol) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  int evals = 0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  evals += 2;
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return {0.5 * (a + b), evals};
}

}  // namespace detail

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& x, double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_l1_ball: negative radius");
  if (x.lpNorm<1>() <= radius) return x;
  const auto profile = detail::BallProfile::from(x);
  return shrink(x, profile.shrink_threshold(radius));
}

double dist_l1_ball(const Eigen::VectorXd& x, double radius) {
  if (radius < 0.0) throw std::invalid_argument("dist_l1_ball: negative radius");
  const auto profile = detail::BallProfile::from(x);
  return std::sqrt(profile.dist_sq(radius));
}

RadiusSearchResult solve_radius(const std::vector<Eigen::VectorXd>& vectors,
                                double lambda, double tol) {
  if (vectors.empty()) throw std::invalid_argument("solve_radius: empty list");
  if (lambda < 0.0) throw std::invalid_argument("solve_radius: negative lambda");
  if (tol <= 0.0) throw std::invalid_argument("solve_radius: non-positive tol");

  std::vector<detail::BallProfile> profiles;
  profiles.reserve(vectors.size());
  double bracket = 0.0;
  for (const auto& v : vectors) {
    profiles.push_back(detail::BallProfile::from(v));
    bracket = std::max(bracket, profiles.back().l1_norm());
  }

  auto objective = [&](double t) {
    double obj = lambda * t;
    for (const auto& p : profiles) obj += p.dist_sq(t);
    return obj;
  };

  RadiusSearchResult result;
  if (lambda == 0.0 || bracket == 0.0) {
    // Distances vanish at and beyond the largest l1 norm; the smallest
    // minimizer is exactly that norm (or 0 when everything is inside).
    result.t_star = lambda == 0.0 ? bracket : 0.0;
    result.objective = objective(result.t_star);
    result.evaluations = 1;
    return result;
  }

  const auto gs = detail::golden_section(objective, 0.0, bracket, tol);
  result.evaluations = gs.evaluations;
  double t = gs.x;
  // The objective has a kink at 0; prefer the endpoint when it ties or
  // wins, keeping the smallest-minimizer convention.
  const double f0 = objective(0.0);
  const double ft = objective(t);
  ++result.evaluations;
  if (f0 <= ft) t = 0.0;
  result.t_star = t;
  result.objective = objective(t);
  return result;
}

}  // namespace csc
