#include "csc/conv_ops.hpp"

#include <stdexcept>

namespace csc {

namespace {

void check_shapes(const LocalDictionary& dict, const SparseCode& code) {
  if (dict.atom_count != code.atom_count)
    throw std::invalid_argument("conv_ops: atom count mismatch");
  if (code.height < 1 || code.width < 1)
    throw std::invalid_argument("conv_ops: empty grid");
}

inline int wrap(int v, int limit) {
  v %= limit;
  return v < 0 ? v + limit : v;
}

}  // namespace

int stripe_length(int n, int m) {
  const int span = 2 * n - 1;
  return span * span * m;
}

SignalImage synthesize(const LocalDictionary& dict, const SparseCode& code) {
  check_shapes(dict, code);
  const int h = code.height, w = code.width, n = dict.filter_size,
            m = dict.atom_count;
  SignalImage out(h, w);
  Eigen::VectorXd slice(n * n);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int loc = r * w + c;
      const auto needle = code.needle(loc);
      if (needle.isZero(0.0)) continue;
      slice.noalias() = dict.atoms * needle;
      for (int a = 0; a < n; ++a) {
        double* row = out.values.data() + static_cast<Eigen::Index>(wrap(r + a, h)) * w;
        const double* s = slice.data() + a * n;
        for (int b = 0; b < n; ++b) row[wrap(c + b, w)] += s[b];
      }
    }
  }
  return out;
}

SparseCode analyze(const LocalDictionary& dict, const SignalImage& x) {
  if (x.height < 1 || x.width < 1)
    throw std::invalid_argument("analyze: empty image");
  const int h = x.height, w = x.width, n = dict.filter_size, m = dict.atom_count;
  SparseCode out(h, w, m);
  Eigen::VectorXd patch(n * n);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int a = 0; a < n; ++a) {
        const double* row = x.values.data() + static_cast<Eigen::Index>(wrap(r + a, h)) * w;
        double* p = patch.data() + a * n;
        for (int b = 0; b < n; ++b) p[b] = row[wrap(c + b, w)];
      }
      out.needle(r * w + c).noalias() = dict.atoms.transpose() * patch;
    }
  }
  return out;
}

Eigen::VectorXd extract_patch(const SignalImage& x, int n, int loc) {
  if (loc < 0 || loc >= x.size())
    throw std::invalid_argument("extract_patch: location out of range");
  const int h = x.height, w = x.width;
  const int r = loc / w, c = loc % w;
  Eigen::VectorXd patch(n * n);
  for (int a = 0; a < n; ++a) {
    const double* row = x.values.data() + static_cast<Eigen::Index>(wrap(r + a, h)) * w;
    for (int b = 0; b < n; ++b) patch[a * n + b] = row[wrap(c + b, w)];
  }
  return patch;
}

void scatter_patch(SignalImage& x, int n, int loc, const Eigen::VectorXd& patch) {
  if (loc < 0 || loc >= x.size())
    throw std::invalid_argument("scatter_patch: location out of range");
  if (patch.size() != static_cast<Eigen::Index>(n) * n)
    throw std::invalid_argument("scatter_patch: patch length mismatch");
  const int h = x.height, w = x.width;
  const int r = loc / w, c = loc % w;
  for (int a = 0; a < n; ++a) {
    double* row = x.values.data() + static_cast<Eigen::Index>(wrap(r + a, h)) * w;
    for (int b = 0; b < n; ++b) row[wrap(c + b, w)] += patch[a * n + b];
  }
}

Eigen::VectorXd extract_stripe(const SparseCode& code, int n, int loc) {
  if (loc < 0 || loc >= code.locations())
    throw std::invalid_argument("extract_stripe: location out of range");
  const int h = code.height, w = code.width, m = code.atom_count;
  const int r = loc / w, c = loc % w;
  Eigen::VectorXd stripe(stripe_length(n, m));
  int s = 0;
  for (int dr = -(n - 1); dr <= n - 1; ++dr) {
    const int rr = wrap(r + dr, h);
    for (int dc = -(n - 1); dc <= n - 1; ++dc, ++s) {
      const int src = rr * w + wrap(c + dc, w);
      stripe.segment(static_cast<Eigen::Index>(s) * m, m) = code.needle(src);
    }
  }
  return stripe;
}

void scatter_stripe(SparseCode& code, int n, int loc, const Eigen::VectorXd& stripe) {
  if (loc < 0 || loc >= code.locations())
    throw std::invalid_argument("scatter_stripe: location out of range");
  const int m = code.atom_count;
  if (stripe.size() != stripe_length(n, m))
    throw std::invalid_argument("scatter_stripe: stripe length mismatch");
  const int h = code.height, w = code.width;
  const int r = loc / w, c = loc % w;
  int s = 0;
  for (int dr = -(n - 1); dr <= n - 1; ++dr) {
    const int rr = wrap(r + dr, h);
    for (int dc = -(n - 1); dc <= n - 1; ++dc, ++s) {
      const int dst = rr * w + wrap(c + dc, w);
      code.needle(dst) += stripe.segment(static_cast<Eigen::Index>(s) * m, m);
    }
  }
}

StripeDictionary build_stripe_dictionary(const LocalDictionary& dict, double theta) {
  if (theta < 0.0 || theta > 1.0)
    throw std::invalid_argument("build_stripe_dictionary: theta outside [0,1]");
  const int n = dict.filter_size, m = dict.atom_count;
  const int span = 2 * n - 1;
  const int cols = stripe_length(n, m);

  StripeDictionary sd;
  sd.theta = theta;
  sd.filter_size = n;
  sd.atom_count = m;
  sd.base = Eigen::MatrixXd::Zero(n * n, cols);
  sd.local_padded = Eigen::MatrixXd::Zero(n * n, cols);

  // A slice placed at offset (dr,dc) relative to the patch covers patch
  // rows p = dr + a, columns q = dc + b; clip to the window.
  for (int dr = -(n - 1); dr <= n - 1; ++dr) {
    for (int dc = -(n - 1); dc <= n - 1; ++dc) {
      const int s = (dr + n - 1) * span + (dc + n - 1);
      for (int j = 0; j < m; ++j) {
        for (int p = 0; p < n; ++p) {
          const int a = p - dr;
          if (a < 0 || a >= n) continue;
          for (int q = 0; q < n; ++q) {
            const int b = q - dc;
            if (b < 0 || b >= n) continue;
            sd.base(p * n + q, static_cast<Eigen::Index>(s) * m + j) =
                dict.atoms(a * n + b, j);
          }
        }
      }
    }
  }
  const int center = (n - 1) * span + (n - 1);
  sd.local_padded.middleCols(static_cast<Eigen::Index>(center) * m, m) = dict.atoms;
  sd.weighted = (1.0 - theta) * sd.base +
                (theta * n * n) * sd.local_padded;
  return sd;
}

}  // namespace csc
