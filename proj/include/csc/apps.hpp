#ifndef CSC_APPS_HPP
#define CSC_APPS_HPP

#include "csc/solver_l1inf.hpp"
#include "csc/solver_l2inf.hpp"

namespace csc {

/// Isotropic total variation with periodic differences.
double tv_norm(const SignalImage& x);

/// argmin 0.5 ||Y - X||^2 + zeta TV(X) by dual projected gradient with
/// a fixed 1/8 dual step; deterministic for a fixed iteration count.
SignalImage tv_denoise(const SignalImage& y, double zeta, int iters);

struct SeparationConfig {
  double lambda = 0.1;  // l1,inf weight
  double zeta = 0.1;    // TV weight
  int outer_iters = 5;
  AdmmConfig inner;
  int tv_iters = 100;
  int dict_cg_iters = 30;
};

struct SeparationResult {
  SignalImage cartoon;
  SignalImage texture;
  LocalDictionary dictionary;
  SparseCode code;
  std::vector<double> objective_trace;
};

/// Block-coordinate cartoon-texture separation: TV prox on the cartoon,
/// l2-l1,inf pursuit on the texture, convolutional dictionary update.
SeparationResult separate_cartoon_texture(const SignalImage& x,
                                          const LocalDictionary& d_init,
                                          const SeparationConfig& cfg);

/// Least-squares dictionary update for fixed code, by conjugate gradient
/// in filter space. Updated atoms are renormalized and the code rows
/// rescaled inversely so the product D Gamma is unchanged; unused atoms
/// are returned as-is.
LocalDictionary update_dictionary(const SignalImage& residual, SparseCode& code,
                                  const LocalDictionary& dict, int cg_iters);

struct InpaintResult {
  SparseCode code;
  SignalImage reconstruction;
};

/// Masked l2,inf-l1 inpainting with per-patch thresholds
/// T_i = C * k_i * sigma^2 (k_i = active pixels in patch i; a small
/// floor keeps sigma = 0 well-posed).
InpaintResult inpaint(const SignalImage& y_masked, const Eigen::VectorXd& mask,
                      const LocalDictionary& dict, double sigma, double c_mult,
                      const PpxaConfig& cfg);

}  // namespace csc

#endif
