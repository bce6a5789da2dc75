#ifndef CSC_SOLVER_L1INF_HPP
#define CSC_SOLVER_L1INF_HPP

#include <vector>

#include "csc/conv_ops.hpp"
#include "csc/prox.hpp"

namespace csc {

struct AdmmConfig {
  double rho = 1.0;  // fixed penalty, no adaptation
  int max_iter = 2000;
  double tol_primal = 1e-4;
  double tol_dual = 1e-4;
  double cg_tol = 1e-6;
  int cg_max_iter = 50;
  double radius_tol_factor = 1e-6;  // times the initial bracket width
};

/// State of the l2-l1,inf ADMM: consensus code, per-location splitting
/// variables gamma_i and scaled duals u_i (stripe-sized each).
struct AdmmState {
  SparseCode code;
  std::vector<Eigen::VectorXd> split;  // gamma_i
  std::vector<Eigen::VectorXd> dual;   // u_i
  double rho = 1.0;
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;

  AdmmState(int h, int w, int n, int m, double rho_in);
};

struct SolveReport {
  bool converged = true;
  int iterations = 0;
  std::vector<double> objective_trace;
  std::vector<double> primal_trace;
  std::vector<double> dual_trace;
};

/// Gamma update: solves (D^T D + rho (2n-1)^2 I) Gamma = D^T Y +
/// rho sum_i S_i^T (gamma_i + u_i) by warm-started conjugate gradient.
SparseCode admm_gamma_update(const AdmmState& state, const SignalImage& y,
                             const LocalDictionary& dict, const AdmmConfig& cfg);

/// Splitting update: one global radius search over all stripes followed
/// by per-location l1-ball projections of v_i = S_i Gamma - u_i.
std::vector<Eigen::VectorXd> admm_split_update(const AdmmState& state,
                                               const SparseCode& code_new,
                                               double lambda,
                                               const AdmmConfig& cfg);

/// min 0.5 ||Y - D Gamma||^2 + lambda max_i ||S_i Gamma||_1 by ADMM.
SparseCode solve_l1inf(const SignalImage& y, const LocalDictionary& dict,
                       double lambda, const AdmmConfig& cfg,
                       SolveReport* report = nullptr);

/// max_i ||S_i Gamma||_1, by stripe extraction.
double l1inf_norm(const SparseCode& code, int n);

/// Same quantity via a sliding-window sum of needle l1 norms; used as a
/// second algebraic route for validation.
double l1inf_norm_sliding(const SparseCode& code, int n);

}  // namespace csc

#endif
