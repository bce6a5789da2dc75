#ifndef CSC_CONV_OPS_HPP
#define CSC_CONV_OPS_HPP

#include <Eigen/Core>

#include "csc/dictionary.hpp"
#include "csc/image.hpp"
#include "csc/sparse_code.hpp"

namespace csc {

// All operators use periodic (circular) boundary handling. A patch at
// location loc = r*W + c covers pixels (r+a mod H, c+b mod W) for
// a,b in [0,n). The stripe at loc collects the needles at offsets
// (dr,dc) in [-(n-1), n-1]^2, row-major over offsets, atom-major
// within each offset.

/// X = sum_i R_i^T D_l alpha_i, via per-location placement of slices.
SignalImage synthesize(const LocalDictionary& dict, const SparseCode& code);

/// Exact adjoint of synthesize: coefficients D^T X.
SparseCode analyze(const LocalDictionary& dict, const SignalImage& x);

int stripe_length(int n, int m);

Eigen::VectorXd extract_patch(const SignalImage& x, int n, int loc);
/// Adds the patch back into place (adjoint of extract_patch).
void scatter_patch(SignalImage& x, int n, int loc, const Eigen::VectorXd& patch);

Eigen::VectorXd extract_stripe(const SparseCode& code, int n, int loc);
/// Adds the stripe back into place (adjoint of extract_stripe).
void scatter_stripe(SparseCode& code, int n, int loc, const Eigen::VectorXd& stripe);

/// The stripe dictionary Omega (n^2 rows, (2n-1)^2 m columns), its
/// theta-weighted variant and the zero-padded local dictionary.
/// Location-independent under the periodic convention.
struct StripeDictionary {
  Eigen::MatrixXd base;          // Omega
  Eigen::MatrixXd local_padded;  // D_l in the center-shift columns
  Eigen::MatrixXd weighted;      // (1-theta) Omega + theta n^2 local_padded
  double theta = 0.0;
  int filter_size = 0;
  int atom_count = 0;
};

StripeDictionary build_stripe_dictionary(const LocalDictionary& dict, double theta);

}  // namespace csc

#endif
