#include "csc/solver_l1inf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csc/linalg.hpp"

namespace csc {

namespace {

int filter_size_of(const AdmmState& state) {
  // stripe length = (2n-1)^2 m
  const int m = state.code.atom_count;
  const int span2 = static_cast<int>(state.split.front().size()) / m;
  const int span = static_cast<int>(std::lround(std::sqrt(static_cast<double>(span2))));
  return (span + 1) / 2;
}

}  // namespace

AdmmState::AdmmState(int h, int w, int n, int m, double rho_in)
    : code(h, w, m), rho(rho_in) {
  const int len = stripe_length(n, m);
  split.assign(static_cast<size_t>(h) * w, Eigen::VectorXd::Zero(len));
  dual.assign(static_cast<size_t>(h) * w, Eigen::VectorXd::Zero(len));
}

SparseCode admm_gamma_update(const AdmmState& state, const SignalImage& y,
                             const LocalDictionary& dict, const AdmmConfig& cfg) {
  const int h = y.height, w = y.width, n = dict.filter_size, m = dict.atom_count;
  const int span2 = (2 * n - 1) * (2 * n - 1);
  const double rho = state.rho;
  const Eigen::Index dim = static_cast<Eigen::Index>(h) * w * m;

  SparseCode rhs_code = analyze(dict, y);
  SparseCode scatter(h, w, m);
  for (int i = 0; i < h * w; ++i)
    scatter_stripe(scatter, n, i, state.split[i] + state.dual[i]);
  const Eigen::VectorXd rhs = rhs_code.coeffs + rho * scatter.coeffs;

  LinearMap normal{dim, [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
                     SparseCode g(h, w, m, v);
                     SparseCode dtd = analyze(dict, synthesize(dict, g));
                     return dtd.coeffs + (rho * span2) * v;
                   }};

  // Warm start from the previous consensus code by solving for the delta.
  const Eigen::VectorXd shifted = rhs - normal.apply(state.code.coeffs);
  const Eigen::VectorXd delta =
      conjugate_gradient(normal, shifted, cfg.cg_tol, cfg.cg_max_iter);
  return SparseCode(h, w, m, state.code.coeffs + delta);
}

std::vector<Eigen::VectorXd> admm_split_update(const AdmmState& state,
                                               const SparseCode& code_new,
                                               double lambda,
                                               const AdmmConfig& cfg) {
  const int n = filter_size_of(state);
  const int count = code_new.locations();

  // Centers v_i = S_i Gamma - u_i of the epigraph subproblems, with one
  // sorted profile per location reused by the radius search and the
  // final projections.
  std::vector<detail::BallProfile> profiles(count);
  std::vector<Eigen::VectorXd> centers(count);
  double bracket = 0.0;
  for (int i = 0; i < count; ++i) {
    centers[i] = extract_stripe(code_new, n, i) - state.dual[i];
    profiles[i] = detail::BallProfile::from(centers[i]);
    bracket = std::max(bracket, profiles[i].l1_norm());
  }

  // The epigraph objective lambda t + (rho/2) sum_i dist^2 matches the
  // shared radius search with weight 2 lambda / rho.
  const double weight = 2.0 * lambda / state.rho;
  double t_star = bracket;
  if (weight > 0.0 && bracket > 0.0) {
    auto objective = [&](double t) {
      double obj = weight * t;
      for (const auto& p : profiles) obj += p.dist_sq(t);
      return obj;
    };
    const double tol = std::max(cfg.radius_tol_factor * bracket, 1e-300);
    t_star = detail::golden_section(objective, 0.0, bracket, tol).x;
    if (objective(0.0) <= objective(t_star)) t_star = 0.0;
  }

  std::vector<Eigen::VectorXd> split(count);
  for (int i = 0; i < count; ++i)
    split[i] = shrink(centers[i], profiles[i].shrink_threshold(t_star));
  return split;
}

SparseCode solve_l1inf(const SignalImage& y, const LocalDictionary& dict,
                       double lambda, const AdmmConfig& cfg, SolveReport* report) {
  if (lambda <= 0.0) throw std::invalid_argument("solve_l1inf: lambda must be > 0");
  const int h = y.height, w = y.width, n = dict.filter_size, m = dict.atom_count;
  const int count = h * w;

  AdmmState state(h, w, n, m, cfg.rho);
  if (report) *report = SolveReport{};

  bool converged = false;
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    const SparseCode code_new = admm_gamma_update(state, y, dict, cfg);
    const auto split_new = admm_split_update(state, code_new, lambda, cfg);

    // Scaled dual ascent and residuals.
    double primal_sq = 0.0, dual_sq = 0.0, split_sq = 0.0, stripes_sq = 0.0;
    for (int i = 0; i < count; ++i) {
      const Eigen::VectorXd stripe = extract_stripe(code_new, n, i);
      const Eigen::VectorXd gap = split_new[i] - stripe;
      state.dual[i] += gap;
      primal_sq += gap.squaredNorm();
      dual_sq += (split_new[i] - state.split[i]).squaredNorm();
      split_sq += split_new[i].squaredNorm();
      stripes_sq += stripe.squaredNorm();
    }
    state.split = split_new;
    state.code = code_new;
    state.iteration = iter + 1;
    state.primal_residual = std::sqrt(primal_sq);
    state.dual_residual = cfg.rho * std::sqrt(dual_sq);

    const double primal_scale = std::sqrt(std::max(split_sq, stripes_sq)) + 1.0;
    const double dual_scale = state.code.coeffs.norm() + 1.0;
    const double rel_primal = state.primal_residual / primal_scale;
    const double rel_dual = state.dual_residual / (cfg.rho * dual_scale);

    if (report) {
      report->primal_trace.push_back(rel_primal);
      report->dual_trace.push_back(rel_dual);
      const double obj =
          0.5 * (y.values - synthesize(dict, state.code).values).squaredNorm() +
          lambda * l1inf_norm(state.code, n);
      report->objective_trace.push_back(obj);
    }
    if (rel_primal < cfg.tol_primal && rel_dual < cfg.tol_dual) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (report) {
    report->converged = converged;
    report->iterations = iter;
  }
  return state.code;
}

double l1inf_norm(const SparseCode& code, int n) {
  double best = 0.0;
  for (int i = 0; i < code.locations(); ++i)
    best = std::max(best, extract_stripe(code, n, i).lpNorm<1>());
  return best;
}

double l1inf_norm_sliding(const SparseCode& code, int n) {
  // Sum of needle l1 norms over each (2n-1)^2 window equals the stripe
  // l1 norm; computed here without forming stripes.
  const int h = code.height, w = code.width;
  SignalImage needle_l1(h, w);
  for (int i = 0; i < code.locations(); ++i)
    needle_l1.values[i] = code.needle(i).lpNorm<1>();
  double best = 0.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double sum = 0.0;
      for (int dr = -(n - 1); dr <= n - 1; ++dr) {
        const int rr = ((r + dr) % h + h) % h;
        for (int dc = -(n - 1); dc <= n - 1; ++dc) {
          const int cc = ((c + dc) % w + w) % w;
          sum += needle_l1(rr, cc);
        }
      }
      best = std::max(best, sum);
    }
  }
  return best;
}

}  // namespace csc
