// Batch front-end: encode / inpaint / separate / diag subcommands over
// PGM images, with CSV diagnostics. Exit codes: 0 success, 1 usage or
// input error, 2 solver failure.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csc/apps.hpp"
#include "csc/diagnostics.hpp"

namespace fs = std::filesystem;
using namespace csc;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SignalImage load_image(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("input file not found: " + path);
  return read_pgm(path);
}

void ensure_outdir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory: " + dir);
}

std::vector<MetricsRow> rows_from_report(const SolveReport& report) {
  std::vector<MetricsRow> rows;
  for (size_t k = 0; k < report.objective_trace.size(); ++k) {
    MetricsRow row{static_cast<int>(k), report.objective_trace[k], 0.0, 0.0};
    if (k < report.primal_trace.size()) row.primal_residual = report.primal_trace[k];
    if (k < report.dual_trace.size()) row.dual_residual = report.dual_trace[k];
    rows.push_back(row);
  }
  return rows;
}

/// Binary mask image: exact 0 stays missing, everything else is active.
Eigen::VectorXd mask_from_image(const SignalImage& img) {
  Eigen::VectorXd mask(img.size());
  for (int i = 0; i < img.size(); ++i) mask[i] = img.values[i] != 0.0 ? 1.0 : 0.0;
  return mask;
}

int run_encode(const std::string& solver, const std::string& input,
               const std::string& outdir, int n, int m, double lambda,
               double threshold, double theta, double mu, double rho,
               int max_iter) {
  const SignalImage y = load_image(input);
  const LocalDictionary dict = build_dct_dictionary(n, m);
  ensure_outdir(outdir);

  SparseCode code(y.height, y.width, m);
  std::vector<MetricsRow> rows;
  if (solver == "l1") {
    FistaConfig cfg;
    cfg.max_iter = max_iter;
    std::vector<double> trace;
    code = solve_l1(y, dict, lambda, cfg, &trace);
    for (size_t k = 0; k < trace.size(); ++k)
      rows.push_back({static_cast<int>(k), trace[k], 0.0, 0.0});
  } else if (solver == "l1inf") {
    AdmmConfig cfg;
    cfg.rho = rho;
    cfg.max_iter = max_iter;
    SolveReport report;
    code = solve_l1inf(y, dict, lambda, cfg, &report);
    rows = rows_from_report(report);
  } else {  // l2inf
    PpxaConfig cfg;
    cfg.mu = mu;
    cfg.theta = theta;
    cfg.max_outer = max_iter;
    ConstraintSpec spec = ConstraintSpec::uniform(y.size(), threshold);
    SolveReport report;
    code = solve_l2inf(y, dict, spec, cfg, &report);
    rows = rows_from_report(report);
  }

  write_code(code, n, (fs::path(outdir) / "code.csc").string());
  write_pgm(synthesize(dict, code), (fs::path(outdir) / "reconstruction.pgm").string());
  write_metrics_csv(rows, (fs::path(outdir) / "metrics.csv").string());
  return 0;
}

int run_inpaint(const std::string& input, const std::string& mask_path,
                const std::string& outdir, int n, int m, double sigma,
                double c_mult, double theta, double mu, int max_iter) {
  const SignalImage y = load_image(input);
  const SignalImage mask_img = load_image(mask_path);
  if (mask_img.size() != y.size())
    throw UsageError("mask shape does not match the input image");
  const LocalDictionary dict = build_dct_dictionary(n, m);
  ensure_outdir(outdir);

  PpxaConfig cfg;
  cfg.mu = mu;
  cfg.theta = theta;
  cfg.max_outer = max_iter;
  const InpaintResult res = inpaint(y, mask_from_image(mask_img), dict, sigma,
                                    c_mult, cfg);
  write_code(res.code, n, (fs::path(outdir) / "code.csc").string());
  write_pgm(res.reconstruction, (fs::path(outdir) / "reconstruction.pgm").string());
  write_metrics_csv({{0, res.code.coeffs.lpNorm<1>(), 0.0, 0.0}},
                    (fs::path(outdir) / "metrics.csv").string());
  return 0;
}

int run_separate(const std::string& input, const std::string& outdir, int n,
                 int m, double lambda, double zeta, int rounds, int inner_iter) {
  const SignalImage x = load_image(input);
  const LocalDictionary dict = build_dct_dictionary(n, m);
  ensure_outdir(outdir);

  SeparationConfig cfg;
  cfg.lambda = lambda;
  cfg.zeta = zeta;
  cfg.outer_iters = rounds;
  cfg.inner.max_iter = inner_iter;
  const SeparationResult res = separate_cartoon_texture(x, dict, cfg);

  write_pgm(res.cartoon, (fs::path(outdir) / "cartoon.pgm").string());
  // Texture is signed; shift to mid-gray for the 8-bit container.
  SignalImage texture_vis(res.texture.height, res.texture.width,
                          res.texture.values.array() + 128.0);
  write_pgm(texture_vis, (fs::path(outdir) / "texture.pgm").string());
  write_code(res.code, n, (fs::path(outdir) / "code.csc").string());
  std::vector<MetricsRow> rows;
  for (size_t k = 0; k < res.objective_trace.size(); ++k)
    rows.push_back({static_cast<int>(k), res.objective_trace[k], 0.0, 0.0});
  write_metrics_csv(rows, (fs::path(outdir) / "metrics.csv").string());
  return 0;
}

int run_diag(const std::string& code_path, const std::string& outdir,
             const std::string& shift_code_path, int shift_r, int shift_c,
             const std::string& psnr_ref, const std::string& psnr_test,
             double zero_tol) {
  if (!fs::exists(code_path)) throw UsageError("code file not found: " + code_path);
  const StoredCode stored = read_code(code_path);
  ensure_outdir(outdir);

  write_histogram_csv(atom_usage_histogram(stored.code, zero_tol),
                      (fs::path(outdir) / "histogram.csv").string());
  write_map_csv(sparsity_map(stored.code),
                (fs::path(outdir) / "sparsity_map.csv").string());

  if (!shift_code_path.empty()) {
    if (!fs::exists(shift_code_path))
      throw UsageError("code file not found: " + shift_code_path);
    const StoredCode other = read_code(shift_code_path);
    write_map_csv(diff_sparsity_maps(stored.code, other.code, shift_r, shift_c),
                  (fs::path(outdir) / "diff_map.csv").string());
  }
  if (!psnr_ref.empty() || !psnr_test.empty()) {
    if (psnr_ref.empty() || psnr_test.empty())
      throw UsageError("--psnr-ref and --psnr-test must be given together");
    const double value = psnr(load_image(psnr_ref), load_image(psnr_test), 255.0);
    std::vector<MetricsRow> rows{{0, std::min(value, kPsnrCsvCap), 0.0, 0.0}};
    write_metrics_csv(rows, (fs::path(outdir) / "psnr.csv").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolutional sparse coding toolkit"};
  app.require_subcommand(1);

  // encode
  auto* encode = app.add_subcommand("encode", "Run a pursuit and store its code");
  std::string solver, input, outdir;
  int n = 8, m = 64, max_iter = 200;
  double lambda = 0.1, threshold = 1.0, theta = 0.0, mu = 100.0, rho = 1.0;
  encode->add_option("--solver", solver, "l1 | l1inf | l2inf")
      ->required()
      ->check(CLI::IsMember({"l1", "l1inf", "l2inf"}));
  encode->add_option("input", input, "input PGM image")->required();
  encode->add_option("outdir", outdir, "output directory")->required();
  encode->add_option("--filter-size", n)->check(CLI::PositiveNumber);
  encode->add_option("--atoms", m)->check(CLI::PositiveNumber);
  encode->add_option("--lambda", lambda)->check(CLI::PositiveNumber);
  encode->add_option("--threshold", threshold, "per-patch error budget (l2inf)")
      ->check(CLI::NonNegativeNumber);
  encode->add_option("--theta", theta)->check(CLI::Range(0.0, 1.0));
  encode->add_option("--mu", mu)->check(CLI::PositiveNumber);
  encode->add_option("--rho", rho)->check(CLI::PositiveNumber);
  encode->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  encode->set_config("--config");

  // inpaint
  auto* inp = app.add_subcommand("inpaint", "Fill masked pixels");
  std::string mask_path;
  double sigma = 0.0, c_mult = 1.0;
  inp->add_option("input", input, "masked PGM image")->required();
  inp->add_option("outdir", outdir)->required();
  inp->add_option("--mask", mask_path, "PGM mask, 0 = missing")->required();
  inp->add_option("--filter-size", n)->check(CLI::PositiveNumber);
  inp->add_option("--atoms", m)->check(CLI::PositiveNumber);
  inp->add_option("--sigma", sigma)->check(CLI::NonNegativeNumber);
  inp->add_option("--cmult", c_mult)->check(CLI::PositiveNumber);
  inp->add_option("--theta", theta)->check(CLI::Range(0.0, 1.0));
  inp->add_option("--mu", mu)->check(CLI::PositiveNumber);
  inp->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
  inp->set_config("--config");

  // separate
  auto* sep = app.add_subcommand("separate", "Cartoon-texture separation");
  double zeta = 0.1;
  int rounds = 5, inner_iter = 200;
  sep->add_option("input", input)->required();
  sep->add_option("outdir", outdir)->required();
  sep->add_option("--filter-size", n)->check(CLI::PositiveNumber);
  sep->add_option("--atoms", m)->check(CLI::PositiveNumber);
  sep->add_option("--lambda", lambda)->check(CLI::PositiveNumber);
  sep->add_option("--zeta", zeta)->check(CLI::PositiveNumber);
  sep->add_option("--rounds", rounds)->check(CLI::PositiveNumber);
  sep->add_option("--inner-iter", inner_iter)->check(CLI::PositiveNumber);
  sep->set_config("--config");

  // diag
  auto* diag = app.add_subcommand("diag", "Histogram / sparsity-map CSVs");
  std::string code_path, shift_code_path, psnr_ref, psnr_test;
  int shift_r = 0, shift_c = 0;
  double zero_tol = 1e-8;
  diag->add_option("--code", code_path, "stored code container")->required();
  diag->add_option("outdir", outdir)->required();
  diag->add_option("--shift-code", shift_code_path,
                   "second code for a shifted sparsity-map difference");
  diag->add_option("--shift-r", shift_r);
  diag->add_option("--shift-c", shift_c);
  diag->add_option("--psnr-ref", psnr_ref);
  diag->add_option("--psnr-test", psnr_test);
  diag->add_option("--zero-tol", zero_tol)->check(CLI::NonNegativeNumber);
  diag->set_config("--config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (encode->parsed())
      return run_encode(solver, input, outdir, n, m, lambda, threshold, theta,
                        mu, rho, max_iter);
    if (inp->parsed())
      return run_inpaint(input, mask_path, outdir, n, m, sigma, c_mult, theta,
                         mu, max_iter);
    if (sep->parsed())
      return run_separate(input, outdir, n, m, lambda, zeta, rounds, inner_iter);
    return run_diag(code_path, outdir, shift_code_path, shift_r, shift_c,
                    psnr_ref, psnr_test, zero_tol);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
}
