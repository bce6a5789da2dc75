#ifndef CSC_IMAGE_HPP
#define CSC_IMAGE_HPP

#include <Eigen/Core>

namespace csc {

/// A 2-D grayscale signal stored row-major in its vectorized form.
/// Values are arbitrary reals; intensities are nominally in [0,255]
/// only at the I/O boundary.
struct SignalImage {
  int height = 0;
  int width = 0;
  Eigen::VectorXd values;

  SignalImage() = default;
  SignalImage(int h, int w);
  SignalImage(int h, int w, Eigen::VectorXd v);

  int size() const { return height * width; }

  double operator()(int r, int c) const { return values[r * width + c]; }
  double& operator()(int r, int c) { return values[r * width + c]; }
};

}  // namespace csc

#endif
