#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace csc::oracle {

namespace {

inline int wrap(int v, int limit) {
  v %= limit;
  return v < 0 ? v + limit : v;
}

}  // namespace

Eigen::MatrixXd dense_dictionary(const LocalDictionary& dict, int h, int w) {
  const int n = dict.filter_size, m = dict.atom_count;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(h * w, static_cast<Eigen::Index>(h) * w * m);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int j = 0; j < m; ++j)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            out(wrap(r + a, h) * w + wrap(c + b, w), (r * w + c) * m + j) +=
                dict.atoms(a * n + b, j);
  return out;
}

Eigen::MatrixXd dense_stripe_selector(int h, int w, int n, int m, int loc) {
  const int span = 2 * n - 1;
  const int r = loc / w, c = loc % w;
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(span) * span * m,
                            static_cast<Eigen::Index>(h) * w * m);
  for (int dr = -(n - 1); dr <= n - 1; ++dr)
    for (int dc = -(n - 1); dc <= n - 1; ++dc) {
      const int s = (dr + n - 1) * span + (dc + n - 1);
      const int src = wrap(r + dr, h) * w + wrap(c + dc, w);
      for (int j = 0; j < m; ++j) out(s * m + j, src * m + j) = 1.0;
    }
  return out;
}

Eigen::MatrixXd dense_patch_selector(int h, int w, int n, int loc) {
  const int r = loc / w, c = loc % w;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n * n, h * w);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a * n + b, wrap(r + a, h) * w + wrap(c + b, w)) = 1.0;
  return out;
}

Eigen::VectorXd project_l1_ball_bisect(const Eigen::VectorXd& x, double radius) {
  if (radius < 0.0) throw std::invalid_argument("negative radius");
  auto norm_after = [&](double lam) {
    return (x.array().abs() - lam).max(0.0).sum();
  };
  if (norm_after(0.0) <= radius) return x;
  double lo = 0.0, hi = x.array().abs().maxCoeff();
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (norm_after(mid) > radius ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  return x.array().sign() * (x.array().abs() - lam).max(0.0);
}

Eigen::VectorXd ellipsoid_project(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                  double budget, const Eigen::VectorXd& x0) {
  const Eigen::VectorXd r0 = a * x0 - b;
  if (r0.squaredNorm() <= budget) return x0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a * a.transpose());
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd e = eig.eigenvectors().transpose() * r0;

  // Residual of the projection as a function of the multiplier nu.
  auto g = [&](double nu) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      const double d = 1.0 + nu * lam[k];
      s += (e[k] / d) * (e[k] / d);
    }
    return s;
  };
  double floor_val = 0.0;  // limit as nu -> infinity
  for (Eigen::Index k = 0; k < e.size(); ++k)
    if (lam[k] < 1e-12 * lam.maxCoeff()) floor_val += e[k] * e[k];
  if (floor_val > budget) throw std::runtime_error("ellipsoid_project: empty set");

  double hi = 1.0;
  while (g(hi) > budget) hi *= 2.0;
  double lo = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > budget ? lo : hi) = mid;
  }
  const double nu = hi;  // feasible side
  const Eigen::VectorXd scaled =
      eig.eigenvectors() *
      (e.array() / (1.0 + nu * lam.array())).matrix();
  return x0 - nu * a.transpose() * scaled;
}

double lasso_objective_ista(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                            double lambda, int iters, Eigen::VectorXd* x_out) {
  const double lip =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a.transpose() * a)
          .eigenvalues()
          .maxCoeff();
  const double step = 1.0 / (1.01 * std::max(lip, 1e-12));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd z = x - step * (a.transpose() * (a * x - y));
    x = z.array().sign() * (z.array().abs() - lambda * step).max(0.0);
  }
  if (x_out) *x_out = x;
  return 0.5 * (y - a * x).squaredNorm() + lambda * x.lpNorm<1>();
}

double l1inf_objective_subgradient(const Eigen::MatrixXd& a,
                                   const std::vector<Eigen::MatrixXd>& stripes,
                                   const Eigen::VectorXd& y, double lambda,
                                   int iters) {
  auto objective = [&](const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (const auto& s : stripes) worst = std::max(worst, (s * x).lpNorm<1>());
    return 0.5 * (y - a * x).squaredNorm() + lambda * worst;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  double best = objective(x);
  const double scale = std::max(1.0, y.norm());
  for (int k = 0; k < iters; ++k) {
    // Subgradient: gradient of the quadratic plus lambda * sign on the
    // worst stripe.
    int worst_i = 0;
    double worst = -1.0;
    for (size_t i = 0; i < stripes.size(); ++i) {
      const double v = (stripes[i] * x).lpNorm<1>();
      if (v > worst) {
        worst = v;
        worst_i = static_cast<int>(i);
      }
    }
    Eigen::VectorXd g = a.transpose() * (a * x - y) +
                        lambda * (stripes[worst_i].transpose() *
                                  (stripes[worst_i] * x).array().sign().matrix());
    const double gn = g.norm();
    if (gn < 1e-15) break;
    x -= (0.5 * scale / (gn * std::sqrt(k + 1.0))) * g;
    best = std::min(best, objective(x));
  }
  return best;
}

Eigen::VectorXd dykstra_intersection(const std::vector<QuadConstraint>& sets,
                                     const Eigen::VectorXd& x0, int sweeps) {
  Eigen::VectorXd x = x0;
  std::vector<Eigen::VectorXd> corrections(
      sets.size(), Eigen::VectorXd::Zero(x0.size()));
  for (int k = 0; k < sweeps; ++k)
    for (size_t i = 0; i < sets.size(); ++i) {
      const Eigen::VectorXd z = x + corrections[i];
      x = ellipsoid_project(sets[i].a, sets[i].b, sets[i].budget, z);
      corrections[i] = z - x;
    }
  return x;
}

double constrained_l1_subgradient(const std::vector<QuadConstraint>& sets,
                                  const Eigen::VectorXd& anchor, double quad_weight,
                                  const Eigen::VectorXd& start, int iters,
                                  Eigen::VectorXd* x_out) {
  auto objective = [&](const Eigen::VectorXd& x) {
    double v = x.lpNorm<1>();
    if (quad_weight > 0.0) v += 0.5 / quad_weight * (x - anchor).squaredNorm();
    return v;
  };
  auto feasible = [&](const Eigen::VectorXd& x) {
    for (const auto& s : sets)
      if ((s.a * x - s.b).squaredNorm() > s.budget * (1.0 + 1e-9) + 1e-12)
        return false;
    return true;
  };

  Eigen::VectorXd x = dykstra_intersection(sets, start, 400);
  double best = objective(x);
  Eigen::VectorXd best_x = x;
  const double scale = std::max(1.0, x.norm());
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd g = x.array().sign();
    if (quad_weight > 0.0) g += (x - anchor) / quad_weight;
    const double gn = std::max(g.norm(), 1e-15);
    x = dykstra_intersection(sets, x - (0.2 * scale / (gn * std::sqrt(k + 1.0))) * g,
                             120);
    if (feasible(x) && objective(x) < best) {
      best = objective(x);
      best_x = x;
    }
  }
  if (x_out) *x_out = best_x;
  return best;
}

}  // namespace csc::oracle
