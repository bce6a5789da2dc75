#ifndef CSC_SOLVER_L2INF_HPP
#define CSC_SOLVER_L2INF_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "csc/conv_ops.hpp"
#include "csc/solver_classic.hpp"
#include "csc/solver_l1inf.hpp"

namespace csc {

/// Raised when a patch constraint cannot be met (T_i = 0 against an
/// inconsistent patch); carries the offending location.
struct ConstraintInfeasible : std::runtime_error {
  int location;
  ConstraintInfeasible(int loc, const std::string& what)
      : std::runtime_error(what), location(loc) {}
};

struct PpxaConfig {
  double mu = 100.0;        // prox scaling
  double relaxation = 1.6;  // rho_l, constant schedule in (0, 2)
  int max_outer = 300;
  double outer_tol = 1e-6;       // on the Gamma change
  double feas_tol = 1e-6;        // relative to T_i
  FistaConfig inner{200, 1.05, 1e-9};
  double bisection_tol = 1e-4;   // relative, on the Lagrange multiplier
  double lambda_bracket_init = 1e-3;
  double lambda_bracket_growth = 10.0;
  double theta = 0.0;
};

/// Per-patch error budgets, optional inpainting mask, and the noise
/// model they derive from.
struct ConstraintSpec {
  Eigen::VectorXd thresholds;           // T_i, one per location
  std::optional<Eigen::VectorXd> mask;  // per-pixel 0/1
  double sigma = 0.0;
  double multiplier = 1.0;  // C

  static ConstraintSpec uniform(int locations, double threshold);
};

/// prox of f_i at Gamma_in: argmin ||G||_1 + 1/(2 N mu) ||Gamma_in - G||^2
/// subject to ||Omega_theta S_i G - R_i Y||^2 <= threshold (mask folded
/// into the residual when present). Coordinates outside stripe i reduce
/// to a plain shrink; the stripe block is solved by a Lagrange-multiplier
/// bisection with warm-started FISTA.
SparseCode prox_patch_constraint(const SparseCode& gamma_in, int loc,
                                 const SignalImage& y, const LocalDictionary& dict,
                                 const StripeDictionary& stripes, double threshold,
                                 const Eigen::VectorXd* mask, const PpxaConfig& cfg);

/// min ||Gamma||_1 s.t. per-patch error constraints, by PPXA over the N
/// constraint proximal operators.
SparseCode solve_l2inf(const SignalImage& y, const LocalDictionary& dict,
                       const ConstraintSpec& spec, const PpxaConfig& cfg,
                       SolveReport* report = nullptr);

/// X = (lambda Y + n^2 D Gamma) / (lambda + n^2).
SignalImage reconstruct_denoise(const SignalImage& y, const SparseCode& code,
                                const LocalDictionary& dict, double lambda);

}  // namespace csc

#endif
