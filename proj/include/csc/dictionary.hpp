#ifndef CSC_DICTIONARY_HPP
#define CSC_DICTIONARY_HPP

#include <Eigen/Core>

namespace csc {

/// m unit-norm filters of support n x n, stored as columns of an
/// (n*n) x m matrix. The global convolutional dictionary is never
/// materialized; it exists only through synthesize/analyze.
struct LocalDictionary {
  int filter_size = 0;  // n
  int atom_count = 0;   // m
  Eigen::MatrixXd atoms;

  LocalDictionary() = default;
  LocalDictionary(int n, int m, Eigen::MatrixXd a);

  int patch_dim() const { return filter_size * filter_size; }
};

/// Overcomplete separable 2-D cosine dictionary. m must be a perfect
/// square with sqrt(m) >= n; atom 0 is the constant (DC) atom.
LocalDictionary build_dct_dictionary(int n, int m);

}  // namespace csc

#endif
