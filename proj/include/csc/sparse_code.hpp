#ifndef CSC_SPARSE_CODE_HPP
#define CSC_SPARSE_CODE_HPP

#include <Eigen/Core>

namespace csc {

/// The global representation: one length-m needle per pixel location,
/// needle-major in row-major pixel order. coeffs[loc * m + j] is the
/// coefficient of atom j at location loc.
struct SparseCode {
  int height = 0;
  int width = 0;
  int atom_count = 0;  // m
  Eigen::VectorXd coeffs;

  SparseCode() = default;
  SparseCode(int h, int w, int m);
  SparseCode(int h, int w, int m, Eigen::VectorXd c);

  int locations() const { return height * width; }

  Eigen::VectorBlock<Eigen::VectorXd> needle(int loc) {
    return coeffs.segment(static_cast<Eigen::Index>(loc) * atom_count, atom_count);
  }
  Eigen::VectorBlock<const Eigen::VectorXd> needle(int loc) const {
    return coeffs.segment(static_cast<Eigen::Index>(loc) * atom_count, atom_count);
  }
};

}  // namespace csc

#endif
