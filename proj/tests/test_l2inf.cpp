#include "doctest.h"

#include <random>

#include "csc/solver_l2inf.hpp"
#include "oracles.hpp"

using namespace csc;

namespace {

Eigen::VectorXd random_vector(Eigen::Index size, std::mt19937& rng, double spread = 1.0) {
  std::normal_distribution<double> dist(0.0, spread);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = dist(rng);
  return v;
}

/// Largest constraint violation relative to its budget, unmasked case.
double worst_violation(const SignalImage& y, const LocalDictionary& dict,
                       const SparseCode& code, const ConstraintSpec& spec,
                       double theta) {
  const StripeDictionary sd = build_stripe_dictionary(dict, theta);
  const int n = dict.filter_size;
  const Eigen::VectorXd mask =
      spec.mask ? *spec.mask : Eigen::VectorXd::Ones(y.size());
  double worst = -1e300;
  for (int i = 0; i < y.size(); ++i) {
    Eigen::VectorXd pm(n * n);
    const int r = i / y.width, c = i % y.width;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        pm[a * n + b] = mask[((r + a) % y.height) * y.width + (c + b) % y.width];
    const Eigen::VectorXd res = pm.cwiseProduct(
        sd.weighted * extract_stripe(code, n, i) - extract_patch(y, n, i));
    worst = std::max(worst, res.squaredNorm() - spec.thresholds[i]);
  }
  return worst;
}

}  // namespace

TEST_CASE("constrained patch prox matches a dense reference") {
  std::mt19937 rng(61);
  const int h = 4, w = 4, n = 2, m = 4;
  const LocalDictionary dict = build_dct_dictionary(n, m);
  const StripeDictionary sd = build_stripe_dictionary(dict, 0.0);
  const SignalImage y(h, w, random_vector(h * w, rng, 2.0));
  const SparseCode gamma_in(h, w, m, random_vector(h * w * m, rng, 0.8));
  const int loc = 5;
  const double threshold = 0.5;

  PpxaConfig cfg;
  cfg.mu = 0.5 / (h * w);  // N mu = 0.5, both terms matter
  cfg.inner.max_iter = 2000;
  cfg.inner.tol = 1e-12;
  cfg.bisection_tol = 1e-6;
  cfg.feas_tol = 1e-9;
  const SparseCode got =
      prox_patch_constraint(gamma_in, loc, y, dict, sd, threshold, nullptr, cfg);

  const double n_mu = h * w * cfg.mu;
  const double obj = got.coeffs.lpNorm<1>() +
                     0.5 / n_mu * (got.coeffs - gamma_in.coeffs).squaredNorm();

  std::vector<oracle::QuadConstraint> sets(1);
  sets[0].a = sd.weighted * oracle::dense_stripe_selector(h, w, n, m, loc);
  sets[0].b = oracle::dense_patch_selector(h, w, n, loc) * y.values;
  sets[0].budget = threshold;
  const double ref = oracle::constrained_l1_subgradient(sets, gamma_in.coeffs, n_mu,
                                                        gamma_in.coeffs, 3000);
  CHECK(obj <= ref + 1e-3 * std::max(1.0, ref));
  // Feasibility of the prox output itself.
  CHECK((sets[0].a * got.coeffs - sets[0].b).squaredNorm() <=
        threshold * (1.0 + 1e-6));
}

TEST_CASE("prox reduces to a shrink away from the stripe") {
  std::mt19937 rng(62);
  const int h = 5, w = 5, n = 2, m = 4;
  const LocalDictionary dict = build_dct_dictionary(n, m);
  const StripeDictionary sd = build_stripe_dictionary(dict, 0.0);
  const SignalImage y(h, w, random_vector(h * w, rng));
  const SparseCode gamma_in(h, w, m, random_vector(h * w * m, rng, 3.0));
  PpxaConfig cfg;
  cfg.mu = 1.0 / (h * w);
  const int loc = 0;
  const SparseCode got =
      prox_patch_constraint(gamma_in, loc, y, dict, sd, 100.0, nullptr, cfg);
  const Eigen::VectorXd plain = shrink(gamma_in.coeffs, 1.0);
  // Needles outside the 3x3 stripe window of loc are plain shrinks.
  for (int r = 2; r < 4; ++r)
    for (int c = 2; c < 4; ++c) {
      const int i = r * w + c;
      CHECK((got.needle(i) - plain.segment(i * m, m)).norm() == 0.0);
    }
}

TEST_CASE("ppxa solution matches a projected-subgradient reference") {
  std::mt19937 rng(63);
  const int h = 4, w = 4, n = 2, m = 4;
  const LocalDictionary dict = build_dct_dictionary(n, m);
  // A target that is an actual sparse synthesis plus noise keeps the
  // constraints comfortably satisfiable.
  SparseCode planted(h, w, m);
  planted.coeffs[5] = 2.0;
  planted.coeffs[40] = -1.5;
  const SignalImage y(
      h, w, synthesize(dict, planted).values + 0.05 * random_vector(h * w, rng));
  ConstraintSpec spec = ConstraintSpec::uniform(h * w, 0.15);

  PpxaConfig cfg;
  cfg.mu = 1.0 / (h * w);
  cfg.max_outer = 600;
  cfg.outer_tol = 1e-9;
  SolveReport report;
  const SparseCode code = solve_l2inf(y, dict, spec, cfg, &report);
  CHECK(worst_violation(y, dict, code, spec, 0.0) <= 10.0 * cfg.feas_tol * 0.15);

  std::vector<oracle::QuadConstraint> sets(h * w);
  const StripeDictionary sd = build_stripe_dictionary(dict, 0.0);
  for (int i = 0; i < h * w; ++i) {
    sets[i].a = sd.weighted * oracle::dense_stripe_selector(h, w, n, m, i);
    sets[i].b = oracle::dense_patch_selector(h, w, n, i) * y.values;
    sets[i].budget = 0.15;
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(h * w * m);
  const double ref = oracle::constrained_l1_subgradient(sets, zero, 0.0, zero, 400);
  CHECK(code.coeffs.lpNorm<1>() <= ref + 1e-3 * std::max(1.0, ref));
}

TEST_CASE("an explicit all-ones mask changes nothing, bit for bit") {
  std::mt19937 rng(64);
  const int h = 4, w = 4, n = 2, m = 4;
  const LocalDictionary dict = build_dct_dictionary(n, m);
  const SignalImage y(h, w, random_vector(h * w, rng));
  ConstraintSpec plain = ConstraintSpec::uniform(h * w, 0.3);
  ConstraintSpec masked = plain;
  masked.mask = Eigen::VectorXd::Ones(h * w);

  PpxaConfig cfg;
  cfg.max_outer = 40;
  const SparseCode a = solve_l2inf(y, dict, plain, cfg);
  const SparseCode b = solve_l2inf(y, dict, masked, cfg);
  CHECK(a.coeffs == b.coeffs);
}

TEST_CASE("unreachable budgets are reported as infeasible") {
  // A rank-one patch operator (single DC atom, theta = 1) cannot
  // interpolate a generic patch, so a zero budget has no solution.
  std::mt19937 rng(65);
  const int h = 4, w = 4, n = 2;
  const LocalDictionary dict(n, 1, Eigen::MatrixXd::Constant(4, 1, 0.5));
  const StripeDictionary sd = build_stripe_dictionary(dict, 1.0);
  const SignalImage y(h, w, random_vector(h * w, rng, 5.0));
  const SparseCode gamma_in(h, w, 1);
  PpxaConfig cfg;
  cfg.inner.max_iter = 50;
  try {
    prox_patch_constraint(gamma_in, 3, y, dict, sd, 0.0, nullptr, cfg);
    FAIL("expected ConstraintInfeasible");
  } catch (const ConstraintInfeasible& e) {
    CHECK(e.location == 3);
  }
}

TEST_CASE("denoising reconstruction matches its closed form") {
  std::mt19937 rng(66);
  const int h = 4, w = 4, n = 2, m = 4;
  const LocalDictionary dict = build_dct_dictionary(n, m);
  const SparseCode code(h, w, m, random_vector(h * w * m, rng));
  const SignalImage y(h, w, random_vector(h * w, rng));
  const SignalImage got = reconstruct_denoise(y, code, dict, 3.0);
  const Eigen::VectorXd want =
      (3.0 * y.values + n * n * synthesize(dict, code).values) / (3.0 + n * n);
  CHECK((got.values - want).norm() < 1e-12);
  CHECK_THROWS_AS(reconstruct_denoise(y, code, dict, -1.0), std::invalid_argument);
}
