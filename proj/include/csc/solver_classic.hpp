#ifndef CSC_SOLVER_CLASSIC_HPP
#define CSC_SOLVER_CLASSIC_HPP

#include <vector>

#include "csc/conv_ops.hpp"

namespace csc {

struct FistaConfig {
  int max_iter = 500;
  double step_safety = 1.05;  // step = 1 / (step_safety * L)
  double tol = 1e-8;          // relative objective change
};

/// Global l2-l1 pursuit: min 0.5 ||Y - D Gamma||^2 + lambda ||Gamma||_1
/// by FISTA with a monotone restart whenever the objective increases.
SparseCode solve_l1(const SignalImage& y, const LocalDictionary& dict,
                    double lambda, const FistaConfig& cfg,
                    std::vector<double>* objective_trace = nullptr);

/// Greedy per-patch pursuit: picks the atom of maximal absolute
/// correlation, refits the active set by least squares, and stops once
/// ||D_l beta - y||^2 <= err_threshold or max_atoms atoms are chosen.
/// A singular active-set system drops the offending atom, stops, and
/// flags degeneracy.
Eigen::VectorXd omp_patch(const Eigen::VectorXd& y, const LocalDictionary& dict,
                          double err_threshold, int max_atoms,
                          bool* degenerate = nullptr);

/// Closed-form patch-averaging reconstruction
/// X = (lambda Y + sum_i R_i^T D_l beta_i) / (lambda + n^2).
SignalImage patch_average(const SparseCode& needles, const LocalDictionary& dict,
                          const SignalImage& y, double lambda);

}  // namespace csc

#endif
