#include "csc/image.hpp"

#include <stdexcept>

namespace csc {

SignalImage::SignalImage(int h, int w)
    : height(h), width(w), values(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h) * w)) {
  if (h < 1 || w < 1) throw std::invalid_argument("SignalImage: non-positive shape");
}

SignalImage::SignalImage(int h, int w, Eigen::VectorXd v)
    : height(h), width(w), values(std::move(v)) {
  if (h < 1 || w < 1) throw std::invalid_argument("SignalImage: non-positive shape");
  if (values.size() != static_cast<Eigen::Index>(h) * w)
    throw std::invalid_argument("SignalImage: value count does not match H*W");
  if (!values.allFinite())
    throw std::invalid_argument("SignalImage: non-finite values");
}

}  // namespace csc
