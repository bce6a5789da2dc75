#include "csc/diagnostics.hpp"

#include <array>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace csc {

namespace {

inline int wrap(int v, int limit) {
  v %= limit;
  return v < 0 ? v + limit : v;
}

// Periodic box filter; window is odd so the window is centered.
SignalImage box_filter(const SignalImage& x, int window) {
  const int h = x.height, w = x.width, half = window / 2;
  SignalImage out(h, w);
  // Separable passes, rows then columns.
  SignalImage tmp(h, w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int d = -half; d <= half; ++d) s += x(r, wrap(c + d, w));
      tmp(r, c) = s;
    }
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int d = -half; d <= half; ++d) s += tmp(wrap(r + d, h), c);
      out(r, c) = s / (static_cast<double>(window) * window);
    }
  return out;
}

int read_pnm_token(std::istream& in, std::string& token) {
  token.clear();
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {  // comment runs to end of line
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return static_cast<int>(in.tellg());
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token.empty() ? -1 : static_cast<int>(in.tellg());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<unsigned char, 4> b{static_cast<unsigned char>(v & 0xff),
                                 static_cast<unsigned char>((v >> 8) & 0xff),
                                 static_cast<unsigned char>((v >> 16) & 0xff),
                                 static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  std::array<unsigned char, 4> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 4))
    throw FormatError("truncated code container: " + path);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64le(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

double get_f64le(std::istream& in, const std::string& path) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8))
    throw FormatError("truncated code container: " + path);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

SignalImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open image: " + path);

  std::string token;
  read_pnm_token(in, token);
  if (token == "P2")
    throw FormatError("ASCII PGM (P2) is not supported: " + path);
  if (token != "P5")
    throw FormatError("bad magic '" + token + "' (expected P5) at byte 0: " + path);

  auto parse_int = [&](const char* what) {
    const int offset = read_pnm_token(in, token);
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (token.empty() || *end != '\0' || v <= 0)
      throw FormatError(std::string("malformed ") + what + " near byte " +
                        std::to_string(offset) + ": " + path);
    return static_cast<int>(v);
  };
  const int width = parse_int("width");
  const int height = parse_int("height");
  const int maxval = parse_int("maxval");
  if (maxval != 255)
    throw FormatError("unsupported maxval " + std::to_string(maxval) + ": " + path);

  std::vector<unsigned char> payload(static_cast<size_t>(width) * height);
  if (!in.read(reinterpret_cast<char*>(payload.data()), payload.size()))
    throw FormatError("truncated payload at byte " +
                      std::to_string(static_cast<long>(in.gcount())) + ": " + path);

  SignalImage out(height, width);
  for (size_t i = 0; i < payload.size(); ++i)
    out.values[static_cast<Eigen::Index>(i)] = static_cast<double>(payload[i]);
  return out;
}

void write_pgm(const SignalImage& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "P5\n" << x.width << " " << x.height << "\n255\n";
  for (Eigen::Index i = 0; i < x.values.size(); ++i) {
    const double clamped = std::min(255.0, std::max(0.0, x.values[i]));
    // nearbyint under the default FP environment rounds half to even.
    out.put(static_cast<char>(static_cast<unsigned char>(std::nearbyint(clamped))));
  }
  if (!out) throw FormatError("write failed: " + path);
}

ContrastNormalization local_contrast_normalize(const SignalImage& x, int window,
                                               double eps) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("local_contrast_normalize: window must be odd and positive");
  if (window > std::min(x.height, x.width))
    throw std::invalid_argument("local_contrast_normalize: window exceeds image");
  if (eps <= 0.0) throw std::invalid_argument("local_contrast_normalize: eps <= 0");

  ContrastNormalization cn;
  cn.window = window;
  cn.local_mean = box_filter(x, window);
  SignalImage squared(x.height, x.width, x.values.array().square().matrix());
  const SignalImage mean_sq = box_filter(squared, window);
  cn.local_scale = SignalImage(x.height, x.width);
  for (Eigen::Index i = 0; i < x.values.size(); ++i) {
    const double var =
        std::max(0.0, mean_sq.values[i] - cn.local_mean.values[i] * cn.local_mean.values[i]);
    cn.local_scale.values[i] = std::max(std::sqrt(var), eps);
  }
  cn.normalized = SignalImage(
      x.height, x.width,
      ((x.values - cn.local_mean.values).array() / cn.local_scale.values.array())
          .matrix());
  return cn;
}

SignalImage invert_contrast_normalization(const ContrastNormalization& cn) {
  return SignalImage(cn.normalized.height, cn.normalized.width,
                     (cn.normalized.values.array() * cn.local_scale.values.array())
                             .matrix() +
                         cn.local_mean.values);
}

std::vector<long> atom_usage_histogram(const SparseCode& code, double zero_tol) {
  if (zero_tol < 0.0)
    throw std::invalid_argument("atom_usage_histogram: negative tolerance");
  std::vector<long> counts(code.atom_count, 0);
  for (int i = 0; i < code.locations(); ++i) {
    const auto needle = code.needle(i);
    for (int j = 0; j < code.atom_count; ++j)
      if (std::abs(needle[j]) > zero_tol) ++counts[j];
  }
  return counts;
}

SignalImage sparsity_map(const SparseCode& code) {
  SignalImage map(code.height, code.width);
  for (int i = 0; i < code.locations(); ++i)
    map.values[i] = code.needle(i).lpNorm<1>();
  return map;
}

SignalImage diff_sparsity_maps(const SparseCode& a, const SparseCode& b,
                               int shift_r, int shift_c) {
  if (std::abs(shift_r) >= std::min(a.height, b.height) ||
      std::abs(shift_c) >= std::min(a.width, b.width))
    throw std::invalid_argument("diff_sparsity_maps: shift larger than image");
  const SignalImage ma = sparsity_map(a);
  const SignalImage mb = sparsity_map(b);

  // Overlap of ma with mb shifted by (shift_r, shift_c).
  const int r0 = std::max(0, shift_r);
  const int r1 = std::min(ma.height, mb.height + shift_r);
  const int c0 = std::max(0, shift_c);
  const int c1 = std::min(ma.width, mb.width + shift_c);
  if (r1 <= r0 || c1 <= c0)
    throw std::invalid_argument("diff_sparsity_maps: empty overlap");

  SignalImage out(r1 - r0, c1 - c0);
  for (int r = r0; r < r1; ++r)
    for (int c = c0; c < c1; ++c)
      out(r - r0, c - c0) = ma(r, c) - mb(r - shift_r, c - shift_c);
  return out;
}

double psnr(const SignalImage& x, const SignalImage& xhat, double peak) {
  if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be > 0");
  if (x.height != xhat.height || x.width != xhat.width)
    throw std::invalid_argument("psnr: shape mismatch");
  const double mse = (x.values - xhat.values).squaredNorm() / x.size();
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

void write_code(const SparseCode& code, int filter_size, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out.write("CSCG", 4);
  put_u32(out, static_cast<std::uint32_t>(code.height));
  put_u32(out, static_cast<std::uint32_t>(code.width));
  put_u32(out, static_cast<std::uint32_t>(filter_size));
  put_u32(out, static_cast<std::uint32_t>(code.atom_count));
  for (Eigen::Index i = 0; i < code.coeffs.size(); ++i) put_f64le(out, code.coeffs[i]);
  if (!out) throw FormatError("write failed: " + path);
}

StoredCode read_code(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open code container: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CSCG", 4) != 0)
    throw FormatError("bad magic at byte 0 (expected CSCG): " + path);
  const int h = static_cast<int>(get_u32(in, path));
  const int w = static_cast<int>(get_u32(in, path));
  const int n = static_cast<int>(get_u32(in, path));
  const int m = static_cast<int>(get_u32(in, path));
  if (h < 1 || w < 1 || n < 1 || m < 1)
    throw FormatError("bad header fields: " + path);
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(h) * w * m);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs[i] = get_f64le(in, path);
  return StoredCode{SparseCode(h, w, m, std::move(coeffs)), n};
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

void write_histogram_csv(const std::vector<long>& counts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "atom_index,count\n";
  for (size_t j = 0; j < counts.size(); ++j) out << j << "," << counts[j] << "\n";
}

void write_map_csv(const SignalImage& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "row,col,value\n";
  for (int r = 0; r < map.height; ++r)
    for (int c = 0; c < map.width; ++c)
      out << r << "," << c << "," << csv_number(map(r, c)) << "\n";
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open for writing: " + path);
  out << "iter,objective,primal_residual,dual_residual\n";
  for (const auto& row : rows)
    out << row.iter << "," << csv_number(row.objective) << ","
        << csv_number(row.primal_residual) << "," << csv_number(row.dual_residual)
        << "\n";
}

}  // namespace csc
