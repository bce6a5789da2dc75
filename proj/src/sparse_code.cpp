#include "csc/sparse_code.hpp"

#include <stdexcept>

namespace csc {

SparseCode::SparseCode(int h, int w, int m)
    : height(h),
      width(w),
      atom_count(m),
      coeffs(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h) * w * m)) {
  if (h < 1 || w < 1 || m < 1)
    throw std::invalid_argument("SparseCode: non-positive shape");
}

SparseCode::SparseCode(int h, int w, int m, Eigen::VectorXd c)
    : height(h), width(w), atom_count(m), coeffs(std::move(c)) {
  if (h < 1 || w < 1 || m < 1)
    throw std::invalid_argument("SparseCode: non-positive shape");
  if (coeffs.size() != static_cast<Eigen::Index>(h) * w * m)
    throw std::invalid_argument("SparseCode: coefficient count does not match N*m");
}

}  // namespace csc
