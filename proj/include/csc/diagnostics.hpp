#ifndef CSC_DIAGNOSTICS_HPP
#define CSC_DIAGNOSTICS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "csc/image.hpp"
#include "csc/sparse_code.hpp"

namespace csc {

/// Malformed or unsupported image / code container input.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Binary PGM (P5, maxval 255). Values map to reals in [0,255]; writing
/// clamps and rounds half-to-even.
SignalImage read_pgm(const std::string& path);
void write_pgm(const SignalImage& x, const std::string& path);

struct ContrastNormalization {
  SignalImage normalized;
  SignalImage local_mean;
  SignalImage local_scale;  // max(local std, eps)
  int window = 0;
};

/// Subtracts a periodic box-filtered local mean and divides by the
/// local standard deviation (floored at eps). Side data allows exact
/// inversion.
ContrastNormalization local_contrast_normalize(const SignalImage& x, int window,
                                               double eps);
SignalImage invert_contrast_normalization(const ContrastNormalization& cn);

/// Per-atom counts of coefficients with magnitude above zero_tol.
std::vector<long> atom_usage_histogram(const SparseCode& code,
                                       double zero_tol = 1e-8);

/// H x W map of needle l1 norms.
SignalImage sparsity_map(const SparseCode& code);

/// Shifts b's map by (shift_r, shift_c) before subtracting from a's,
/// restricted to the overlap region.
SignalImage diff_sparsity_maps(const SparseCode& a, const SparseCode& b,
                               int shift_r, int shift_c);

/// 10 log10(peak^2 / MSE); +infinity for identical images.
double psnr(const SignalImage& x, const SignalImage& xhat, double peak);

/// The CSV sentinel for unbounded PSNR values.
inline constexpr double kPsnrCsvCap = 99.0;

// --- file formats driven by the CLI ---

/// Flat binary code container: magic "CSCG", uint32 H, W, n, m,
/// then N*m little-endian 64-bit reals.
void write_code(const SparseCode& code, int filter_size, const std::string& path);
struct StoredCode {
  SparseCode code;
  int filter_size = 0;
};
StoredCode read_code(const std::string& path);

void write_histogram_csv(const std::vector<long>& counts, const std::string& path);
void write_map_csv(const SignalImage& map, const std::string& path);
struct MetricsRow {
  int iter;
  double objective;
  double primal_residual;
  double dual_residual;
};
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

/// Locale-independent formatting used by every CSV emitter.
std::string csv_number(double v);

}  // namespace csc

#endif
