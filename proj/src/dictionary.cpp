#include "csc/dictionary.hpp"

#include <cmath>
#include <stdexcept>

namespace csc {

namespace {
constexpr double kUnitNormTol = 1e-12;
}

LocalDictionary::LocalDictionary(int n, int m, Eigen::MatrixXd a)
    : filter_size(n), atom_count(m), atoms(std::move(a)) {
  if (n < 1 || m < 1) throw std::invalid_argument("LocalDictionary: n, m must be >= 1");
  if (atoms.rows() != static_cast<Eigen::Index>(n) * n || atoms.cols() != m)
    throw std::invalid_argument("LocalDictionary: atom matrix shape mismatch");
  for (int j = 0; j < m; ++j) {
    if (std::abs(atoms.col(j).norm() - 1.0) > kUnitNormTol)
      throw std::invalid_argument("LocalDictionary: atom is not unit-norm");
  }
}

LocalDictionary build_dct_dictionary(int n, int m) {
  if (n < 1) throw std::invalid_argument("build_dct_dictionary: n must be >= 1");
  const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (root * root != m)
    throw std::invalid_argument("build_dct_dictionary: m is not a perfect square");
  if (root < n)
    throw std::invalid_argument("build_dct_dictionary: sqrt(m) must be >= n");

  // 1-D overcomplete cosine basis: v_k[p] = cos(pi p k / root), mean
  // subtracted for k >= 1, each normalized.
  Eigen::MatrixXd basis(n, root);
  for (int k = 0; k < root; ++k) {
    for (int p = 0; p < n; ++p)
      basis(p, k) = std::cos(M_PI * p * k / root);
    if (k > 0) basis.col(k).array() -= basis.col(k).mean();
    basis.col(k).normalize();
  }

  Eigen::MatrixXd atoms(n * n, m);
  for (int k = 0; k < root; ++k) {
    for (int l = 0; l < root; ++l) {
      const int j = k * root + l;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          atoms(a * n + b, j) = basis(a, k) * basis(b, l);
      atoms.col(j).normalize();
    }
  }
  return LocalDictionary(n, m, std::move(atoms));
}

}  // namespace csc
