#include "csc/solver_l2inf.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "csc/linalg.hpp"
#include "csc/prox.hpp"

namespace csc {

namespace {

constexpr double kThresholdFloor = 1e-12;  // epsilon in relative feasibility tests
constexpr double kLambdaCeiling = 1e12;

/// Everything the stripe-local constraint subproblem needs at one location.
struct PatchContext {
  Eigen::VectorXd target;      // masked R_i Y
  Eigen::VectorXd patch_mask;  // 0/1 per patch pixel
  double threshold = 0.0;
  double curvature = 0.0;  // sigma_max of (M Omega_theta)^T (M Omega_theta)
};

Eigen::VectorXd masked_residual(const StripeDictionary& sd, const PatchContext& ctx,
                                const Eigen::VectorXd& gamma) {
  return ctx.patch_mask.cwiseProduct(sd.weighted * gamma - ctx.target);
}

double violation(double err_sq, double threshold) {
  return std::max(0.0, err_sq - threshold);
}

double feas_slack(double threshold, const PpxaConfig& cfg) {
  return cfg.feas_tol * std::max(threshold, kThresholdFloor);
}

double patch_curvature(const StripeDictionary& sd, const Eigen::VectorXd& patch_mask) {
  const Eigen::Index dim = sd.weighted.cols();
  LinearMap gram{dim, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                   return sd.weighted.transpose() *
                          patch_mask.cwiseProduct(sd.weighted * v);
                 }};
  return power_method(gram, 100, 13u);
}

/// FISTA on the Lagrangian
///   ||g||_1 + 1/(2 N mu) ||center - g||^2 + lambda ||M(Omega g - b)||^2,
/// warm-started from `gamma`.
void fista_lagrangian(const StripeDictionary& sd, const PatchContext& ctx,
                      const Eigen::VectorXd& center, double n_mu, double lambda,
                      double curvature, const FistaConfig& inner,
                      Eigen::VectorXd& gamma) {
  const double lip = 1.0 / n_mu + 2.0 * lambda * std::max(curvature, 1e-30);
  const double step = 1.0 / (inner.step_safety * lip);
  Eigen::VectorXd x = gamma;
  Eigen::VectorXd z = x;
  double t_momentum = 1.0;
  for (int k = 0; k < inner.max_iter; ++k) {
    const Eigen::VectorXd res = masked_residual(sd, ctx, z);
    const Eigen::VectorXd grad =
        (z - center) / n_mu + 2.0 * lambda * (sd.weighted.transpose() * res);
    Eigen::VectorXd x_new = shrink(z - step * grad, step);
    const double t_next =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    z = x_new + ((t_momentum - 1.0) / t_next) * (x_new - x);
    const double change = (x_new - x).norm();
    x = std::move(x_new);
    t_momentum = t_next;
    if (change <= inner.tol * (1.0 + x.norm())) break;
  }
  gamma = x;
}

/// Multiplier and stripe iterate carried across repeated prox calls at
/// the same location (PPXA revisits every patch each outer iteration).
struct ProxWarm {
  Eigen::VectorXd gamma;
  double lambda = -1.0;
};

/// Stripe-block solution of the constrained prox at one location.
Eigen::VectorXd stripe_prox(const StripeDictionary& sd, const PatchContext& ctx,
                            const Eigen::VectorXd& center, double n_mu,
                            int loc, const PpxaConfig& cfg,
                            ProxWarm* warm = nullptr) {
  // lambda = 0 branch: plain shrink, accepted when already feasible.
  Eigen::VectorXd candidate = shrink(center, n_mu);
  double err = masked_residual(sd, ctx, candidate).squaredNorm();
  const double slack = feas_slack(ctx.threshold, cfg);
  if (violation(err, ctx.threshold) <= slack) {
    if (warm) warm->lambda = -1.0;
    return candidate;
  }

  // Geometric bracket growth until the constraint flips to feasible; a
  // remembered multiplier from the previous visit seeds the bracket.
  double lo = 0.0;
  double hi = cfg.lambda_bracket_init;
  Eigen::VectorXd gamma = candidate;  // warm start carried across multipliers
  if (warm && warm->lambda > 0.0) {
    hi = warm->lambda;
    gamma = warm->gamma;
  }
  Eigen::VectorXd best;
  bool bracketed = false;
  while (hi <= kLambdaCeiling) {
    fista_lagrangian(sd, ctx, center, n_mu, hi, ctx.curvature, cfg.inner, gamma);
    err = masked_residual(sd, ctx, gamma).squaredNorm();
    if (violation(err, ctx.threshold) <= slack) {
      bracketed = true;
      best = gamma;
      break;
    }
    lo = hi;
    hi *= cfg.lambda_bracket_growth;
  }
  if (!bracketed)
    throw ConstraintInfeasible(
        loc, "prox_patch_constraint: patch " + std::to_string(loc) +
                 " cannot meet its error threshold");

  // Bisect down to the smallest multiplier that stays feasible.
  while (hi - lo > cfg.bisection_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    fista_lagrangian(sd, ctx, center, n_mu, mid, ctx.curvature, cfg.inner, gamma);
    err = masked_residual(sd, ctx, gamma).squaredNorm();
    if (violation(err, ctx.threshold) <= slack) {
      hi = mid;
      best = gamma;
    } else {
      lo = mid;
    }
  }
  if (warm) {
    warm->gamma = best;
    warm->lambda = hi;
  }
  return best;
}

Eigen::VectorXd patch_mask_at(const Eigen::VectorXd& mask, int h, int w, int n,
                              int loc) {
  const int r = loc / w, c = loc % w;
  Eigen::VectorXd pm(n * n);
  for (int a = 0; a < n; ++a) {
    const int rr = (r + a) % h;
    for (int b = 0; b < n; ++b) pm[a * n + b] = mask[rr * w + (c + b) % w];
  }
  return pm;
}

void set_stripe(SparseCode& code, int n, int loc, const Eigen::VectorXd& stripe) {
  const int h = code.height, w = code.width, m = code.atom_count;
  const int r = loc / w, c = loc % w;
  int s = 0;
  for (int dr = -(n - 1); dr <= n - 1; ++dr) {
    const int rr = ((r + dr) % h + h) % h;
    for (int dc = -(n - 1); dc <= n - 1; ++dc, ++s) {
      const int dst = rr * w + ((c + dc) % w + w) % w;
      code.needle(dst) = stripe.segment(static_cast<Eigen::Index>(s) * m, m);
    }
  }
}

/// prox of f_i with a precomputed patch context; `out` receives the full
/// solution (shrink off the stripe, constrained block on it).
SparseCode prox_with_context(const SparseCode& gamma_in, int loc,
                             const StripeDictionary& sd, const PatchContext& ctx,
                             const PpxaConfig& cfg, ProxWarm* warm = nullptr) {
  const int n = sd.filter_size;
  const double n_mu = static_cast<double>(gamma_in.locations()) * cfg.mu;
  SparseCode out(gamma_in.height, gamma_in.width, gamma_in.atom_count,
                 shrink(gamma_in.coeffs, n_mu));
  const Eigen::VectorXd center = extract_stripe(gamma_in, n, loc);
  set_stripe(out, n, loc, stripe_prox(sd, ctx, center, n_mu, loc, cfg, warm));
  return out;
}

/// Deterministic pairwise tree reduction, independent of any future
/// parallel evaluation order.
Eigen::VectorXd tree_sum(std::vector<Eigen::VectorXd>& terms) {
  size_t count = terms.size();
  while (count > 1) {
    const size_t half = (count + 1) / 2;
    for (size_t i = 0; i + half < count; ++i) terms[i] += terms[i + half];
    count = half;
  }
  return terms[0];
}

/// Projection of `gamma` onto one patch ellipsoid, in the 16..n^2-dim
/// range space of the masked stripe dictionary.
struct EllipsoidProjector {
  Eigen::MatrixXd v;          // right singular vectors (K x rank)
  Eigen::VectorXd sigma;      // singular values
  Eigen::VectorXd d;          // U^T b
  double off_range_sq = 0.0;  // ||b - U U^T b||^2

  EllipsoidProjector(const StripeDictionary& sd, const PatchContext& ctx) {
    const Eigen::MatrixXd a = ctx.patch_mask.asDiagonal() * sd.weighted;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cutoff = 1e-12 * std::max(1.0, svd.singularValues()[0]);
    int rank = 0;
    while (rank < svd.singularValues().size() && svd.singularValues()[rank] > cutoff)
      ++rank;
    v = svd.matrixV().leftCols(rank);
    sigma = svd.singularValues().head(rank);
    d = svd.matrixU().leftCols(rank).transpose() * ctx.target;
    off_range_sq = (ctx.target - svd.matrixU().leftCols(rank) * d).squaredNorm();
  }

  bool project(Eigen::VectorXd& stripe, double threshold, int loc) const {
    const double budget = threshold - off_range_sq;
    if (budget < 0.0)
      throw ConstraintInfeasible(
          loc, "feasibility polish: patch " + std::to_string(loc) +
                   " has an unreachable threshold");
    const Eigen::VectorXd c = v.transpose() * stripe;
    auto err_at = [&](double nu) {
      double e = 0.0;
      for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        const double chat =
            (c[k] + nu * sigma[k] * d[k]) / (1.0 + nu * sigma[k] * sigma[k]);
        const double r = sigma[k] * chat - d[k];
        e += r * r;
      }
      return e;
    };
    if (err_at(0.0) <= budget) return false;
    double lo = 0.0, hi = 1.0;
    while (err_at(hi) > budget) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e18) break;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (err_at(mid) > budget ? lo : hi) = mid;
    }
    const double nu = hi;
    Eigen::VectorXd chat(sigma.size());
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
      chat[k] = (c[k] + nu * sigma[k] * d[k]) / (1.0 + nu * sigma[k] * sigma[k]);
    stripe += v * (chat - c);
    return true;
  }
};

/// Cyclic projection onto the violated patch ellipsoids until every
/// constraint sits within its slack (or the sweep budget runs out).
void feasibility_polish(SparseCode& code, const StripeDictionary& sd,
                        const std::vector<PatchContext>& contexts,
                        const PpxaConfig& cfg) {
  const int n = sd.filter_size;
  const int count = static_cast<int>(contexts.size());
  std::vector<std::unique_ptr<EllipsoidProjector>> projectors(count);
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool touched = false;
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd stripe = extract_stripe(code, n, i);
      const double err = masked_residual(sd, contexts[i], stripe).squaredNorm();
      if (violation(err, contexts[i].threshold) <=
          feas_slack(contexts[i].threshold, cfg))
        continue;
      if (!projectors[i])
        projectors[i] = std::make_unique<EllipsoidProjector>(sd, contexts[i]);
      if (projectors[i]->project(stripe, contexts[i].threshold, i)) {
        set_stripe(code, n, i, stripe);
        touched = true;
      }
    }
    if (!touched) break;
  }
}

}  // namespace

ConstraintSpec ConstraintSpec::uniform(int locations, double threshold) {
  ConstraintSpec spec;
  spec.thresholds = Eigen::VectorXd::Constant(locations, threshold);
  return spec;
}

SparseCode prox_patch_constraint(const SparseCode& gamma_in, int loc,
                                 const SignalImage& y, const LocalDictionary& dict,
                                 const StripeDictionary& stripes, double threshold,
                                 const Eigen::VectorXd* mask, const PpxaConfig& cfg) {
  if (threshold < 0.0)
    throw std::invalid_argument("prox_patch_constraint: negative threshold");
  const int n = dict.filter_size;
  PatchContext ctx;
  ctx.patch_mask = mask ? patch_mask_at(*mask, y.height, y.width, n, loc)
                        : Eigen::VectorXd::Ones(n * n);
  ctx.target = ctx.patch_mask.cwiseProduct(extract_patch(y, n, loc));
  ctx.threshold = threshold;
  ctx.curvature = patch_curvature(stripes, ctx.patch_mask);
  return prox_with_context(gamma_in, loc, stripes, ctx, cfg);
}

SparseCode solve_l2inf(const SignalImage& y, const LocalDictionary& dict,
                       const ConstraintSpec& spec, const PpxaConfig& cfg,
                       SolveReport* report) {
  const int h = y.height, w = y.width, n = dict.filter_size, m = dict.atom_count;
  const int count = h * w;
  if (spec.thresholds.size() != count)
    throw std::invalid_argument("solve_l2inf: one threshold per location required");
  if (cfg.relaxation <= 0.0 || cfg.relaxation >= 2.0)
    throw std::invalid_argument("solve_l2inf: relaxation outside (0,2)");

  const StripeDictionary sd = build_stripe_dictionary(dict, cfg.theta);
  const Eigen::VectorXd mask =
      spec.mask ? *spec.mask : Eigen::VectorXd::Ones(count);

  std::vector<PatchContext> contexts(count);
  for (int i = 0; i < count; ++i) {
    contexts[i].patch_mask = patch_mask_at(mask, h, w, n, i);
    contexts[i].target =
        contexts[i].patch_mask.cwiseProduct(extract_patch(y, n, i));
    contexts[i].threshold = spec.thresholds[i];
    contexts[i].curvature = patch_curvature(sd, contexts[i].patch_mask);
  }

  auto max_violation = [&](const SparseCode& code) {
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      const Eigen::VectorXd stripe = extract_stripe(code, n, i);
      const double err = masked_residual(sd, contexts[i], stripe).squaredNorm();
      worst = std::max(worst,
                       violation(err, contexts[i].threshold) -
                           10.0 * feas_slack(contexts[i].threshold, cfg));
    }
    return worst;
  };

  SparseCode consensus(h, w, m);
  std::vector<Eigen::VectorXd> aux(
      count, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count) * m));
  std::vector<Eigen::VectorXd> prox_out(count);
  std::vector<ProxWarm> warm(count);

  // Feasible start: cyclic projection onto the patch ellipsoids from
  // zero. Seeding every aux copy with a feasible point lets the outer
  // iteration spend its budget shrinking the l1 norm instead of slowly
  // accumulating enough signal to meet the constraints.
  feasibility_polish(consensus, sd, contexts, cfg);
  for (int i = 0; i < count; ++i) aux[i] = consensus.coeffs;

  if (report) *report = SolveReport{};
  bool converged = false;
  int iter = 0;
  for (; iter < cfg.max_outer; ++iter) {
    for (int i = 0; i < count; ++i) {
      SparseCode gamma_i(h, w, m, aux[i]);
      prox_out[i] =
          prox_with_context(gamma_i, i, sd, contexts[i], cfg, &warm[i]).coeffs;
    }
    std::vector<Eigen::VectorXd> terms = prox_out;
    const Eigen::VectorXd average = tree_sum(terms) / static_cast<double>(count);

    for (int i = 0; i < count; ++i)
      aux[i] += cfg.relaxation * (2.0 * average - consensus.coeffs - prox_out[i]);
    const Eigen::VectorXd next =
        consensus.coeffs + cfg.relaxation * (average - consensus.coeffs);
    const double change = (next - consensus.coeffs).norm();
    consensus.coeffs = next;

    if (report) {
      report->objective_trace.push_back(consensus.coeffs.lpNorm<1>());
      report->primal_trace.push_back(change);
    }
    if (change <= cfg.outer_tol * (1.0 + consensus.coeffs.norm()) &&
        max_violation(consensus) <= 0.0) {
      converged = true;
      ++iter;
      break;
    }
  }

  // Final feasibility polish: the averaged consensus can sit slightly
  // outside the constraint set even after convergence.
  if (max_violation(consensus) > 0.0)
    feasibility_polish(consensus, sd, contexts, cfg);

  if (report) {
    report->converged = converged;
    report->iterations = iter;
  }
  return consensus;
}

SignalImage reconstruct_denoise(const SignalImage& y, const SparseCode& code,
                                const LocalDictionary& dict, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("reconstruct_denoise: negative lambda");
  if (code.height != y.height || code.width != y.width)
    throw std::invalid_argument("reconstruct_denoise: grid mismatch");
  const double n2 = static_cast<double>(dict.patch_dim());
  const SignalImage rec = synthesize(dict, code);
  return SignalImage(y.height, y.width,
                     (lambda * y.values + n2 * rec.values) / (lambda + n2));
}

}  // namespace csc
