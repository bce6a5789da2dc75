#include "csc/solver_classic.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "csc/linalg.hpp"
#include "csc/prox.hpp"

namespace csc {

namespace {

double l1_objective(const SignalImage& y, const LocalDictionary& dict,
                    const SparseCode& code, double lambda) {
  const SignalImage rec = synthesize(dict, code);
  return 0.5 * (y.values - rec.values).squaredNorm() + lambda * code.coeffs.lpNorm<1>();
}

}  // namespace

SparseCode solve_l1(const SignalImage& y, const LocalDictionary& dict,
                    double lambda, const FistaConfig& cfg,
                    std::vector<double>* objective_trace) {
  if (lambda <= 0.0) throw std::invalid_argument("solve_l1: lambda must be > 0");
  if (cfg.max_iter < 1) throw std::invalid_argument("solve_l1: max_iter < 1");

  const int h = y.height, w = y.width, m = dict.atom_count;
  const Eigen::Index dim = static_cast<Eigen::Index>(h) * w * m;

  // Spectral norm of D^T D via the power method on analyze o synthesize.
  LinearMap gram{dim, [&](const Eigen::VectorXd& v) {
                   SparseCode g(h, w, m, v);
                   return analyze(dict, synthesize(dict, g)).coeffs;
                 }};
  const double lip = std::max(power_method(gram, 100, 7u), 1e-12);
  const double step = 1.0 / (cfg.step_safety * lip);

  SparseCode x(h, w, m);
  Eigen::VectorXd z = x.coeffs;  // momentum point
  double t_momentum = 1.0;
  double prev_obj = l1_objective(y, dict, x, lambda);
  if (objective_trace) objective_trace->push_back(prev_obj);

  for (int k = 0; k < cfg.max_iter; ++k) {
    SparseCode zc(h, w, m, z);
    const SignalImage residual(h, w, synthesize(dict, zc).values - y.values);
    const Eigen::VectorXd grad = analyze(dict, residual).coeffs;
    Eigen::VectorXd x_new = shrink(z - step * grad, lambda * step);

    SparseCode cand(h, w, m, x_new);
    double obj = l1_objective(y, dict, cand, lambda);
    if (obj > prev_obj) {
      // Monotone restart: drop the momentum and redo a plain proximal
      // step from the last accepted iterate.
      SparseCode xc(h, w, m, x.coeffs);
      const SignalImage res2(h, w, synthesize(dict, xc).values - y.values);
      const Eigen::VectorXd grad2 = analyze(dict, res2).coeffs;
      x_new = shrink(x.coeffs - step * grad2, lambda * step);
      cand = SparseCode(h, w, m, x_new);
      obj = l1_objective(y, dict, cand, lambda);
      t_momentum = 1.0;
      z = x_new;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      z = x_new + ((t_momentum - 1.0) / t_next) * (x_new - x.coeffs);
      t_momentum = t_next;
    }

    const double rel_change = std::abs(prev_obj - obj) / std::max(1e-30, std::abs(prev_obj));
    x.coeffs = x_new;
    prev_obj = std::min(prev_obj, obj);
    if (objective_trace) objective_trace->push_back(obj);
    if (rel_change < cfg.tol) break;
  }
  return x;
}

Eigen::VectorXd omp_patch(const Eigen::VectorXd& y, const LocalDictionary& dict,
                          double err_threshold, int max_atoms, bool* degenerate) {
  if (err_threshold < 0.0)
    throw std::invalid_argument("omp_patch: negative error threshold");
  if (max_atoms < 1) throw std::invalid_argument("omp_patch: max_atoms < 1");
  if (y.size() != dict.patch_dim())
    throw std::invalid_argument("omp_patch: patch length mismatch");
  if (degenerate) *degenerate = false;

  const int m = dict.atom_count;
  Eigen::VectorXd needle = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd residual = y;
  std::vector<int> active;

  while (residual.squaredNorm() > err_threshold &&
         static_cast<int>(active.size()) < max_atoms) {
    Eigen::VectorXd corr = dict.atoms.transpose() * residual;
    for (int j : active) corr[j] = 0.0;
    int best = 0;
    corr.array().abs().maxCoeff(&best);
    if (corr[best] == 0.0) break;  // residual orthogonal to all remaining atoms
    active.push_back(best);

    Eigen::MatrixXd sub(y.size(), active.size());
    for (size_t k = 0; k < active.size(); ++k) sub.col(k) = dict.atoms.col(active[k]);
    const Eigen::MatrixXd gram = sub.transpose() * sub;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd coef = ldlt.solve(sub.transpose() * y);
    const double pivot_floor = 1e-10 * std::max(1.0, ldlt.vectorD().cwiseAbs().maxCoeff());
    if (ldlt.info() != Eigen::Success || !coef.allFinite() ||
        ldlt.vectorD().cwiseAbs().minCoeff() < pivot_floor ||
        (gram * coef - sub.transpose() * y).norm() > 1e-8 * std::max(1.0, y.norm())) {
      active.pop_back();
      if (degenerate) *degenerate = true;
      break;
    }
    needle.setZero();
    for (size_t k = 0; k < active.size(); ++k) needle[active[k]] = coef[k];
    residual = y - sub * coef;
  }
  return needle;
}

SignalImage patch_average(const SparseCode& needles, const LocalDictionary& dict,
                          const SignalImage& y, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("patch_average: negative lambda");
  if (needles.height != y.height || needles.width != y.width)
    throw std::invalid_argument("patch_average: grid mismatch");
  const double n2 = static_cast<double>(dict.patch_dim());
  const SignalImage acc = synthesize(dict, needles);  // sum_i R_i^T D_l beta_i
  return SignalImage(y.height, y.width,
                     (lambda * y.values + acc.values) / (lambda + n2));
}

}  // namespace csc
