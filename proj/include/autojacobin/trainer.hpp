#pragma once

// Mini-batch steepest descent with a Wolfe line search.
//
// Random stream order (one mt19937_64 seeded from TrainConfig::seed):
//   1. the d x d rotation used by init_params,
//   2. per epoch: the shuffle permutation, then (dautobin only) the corruption
//      draws for every training point in permuted order, entry by entry.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "autojacobin/errors.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/network.hpp"
#include "autojacobin/tangent.hpp"
#include "autojacobin/variants.hpp"

namespace ajb {

using Rng = std::mt19937_64;

/// Uniformly distributed rotation (orthogonal, det +1) of size n.
inline Matrix random_rotation(Index n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) g(r, c) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& rr = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  if (n > 0 && q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

struct InitResult {
  NetworkParams params;
  Index data_rank = 0;  // numeric rank of the training covariance
  bool padded = false;  // rank < d: trailing directions are an arbitrary orthonormal completion
};

/// W1 = R P with P the top-d PCA directions (rows) and R a random rotation;
/// W2 = W1^T, b1 = -W1 mu, b2 = mu.
inline InitResult init_params(const DataMatrix& train, Index bits, Rng& rng) {
  const Index dims = train.rows();
  const Index n = train.cols();
  if (bits < 1) throw DimensionError("init_params: bits must be positive");
  if (n <= bits) throw DimensionError("init_params: need more training points than bits");
  if (bits > dims)
    throw DimensionError("init_params: bits (" + std::to_string(bits) +
                         ") exceed the data dimension (" + std::to_string(dims) + ")");
  const Vector mu = train.rowwise().mean();
  const Matrix centered = train.colwise() - mu;
  const Matrix cov = (centered * centered.transpose()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success) throw DegenerateError("init_params: eigensolver failed");

  InitResult out;
  const Vector evals = eig.eigenvalues().reverse();
  const double top = std::max(evals(0), 0.0);
  for (Index i = 0; i < dims; ++i)
    if (evals(i) > top * 1e-12 && evals(i) > 0.0) ++out.data_rank;
  out.padded = out.data_rank < bits;

  const Matrix pca = eig.eigenvectors().rightCols(bits).rowwise().reverse().transpose();
  const Matrix rot = random_rotation(bits, rng);
  NetworkParams& p = out.params;
  p.w1 = rot * pca;
  p.w2 = p.w1.transpose();
  p.b1 = -p.w1 * mu;
  p.b2 = mu;
  return out;
}

inline InitResult init_params(const DataMatrix& train, Index bits, std::uint64_t seed) {
  Rng rng(seed);
  return init_params(train, bits, rng);
}

// --- Wolfe line search -------------------------------------------------------

struct WolfeOptions {
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_evals = 20;
  double initial_step = 1.0;
};

struct LineSearchResult {
  double step = 0.0;
  int evals = 0;
  bool fallback = false;
  bool sufficient_decrease = true;
  int accepted_eval = -1;  // index into the sequence of objective evaluations
  double value = 0.0;      // objective at the accepted step
};

namespace detail {

struct Trial {
  double a = 0.0;
  double f = 0.0;
  double slope = 0.0;  // d/da f(theta - a g)
  bool finite = true;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db); NaN when
// the cubic has no real minimizer.
inline double cubic_min(const Trial& x, const Trial& y) {
  const double d1 = x.slope + y.slope - 3.0 * (x.f - y.f) / (x.a - y.a);
  const double disc = d1 * d1 - x.slope * y.slope;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), y.a - x.a);
  return y.a - (y.a - x.a) * (y.slope + d2 - d1) / (y.slope - x.slope + 2.0 * d2);
}

// Trial step inside [lo, hi] (either order), kept away from both ends.
inline double interpolate(const Trial& lo, const Trial& hi) {
  const double left = std::min(lo.a, hi.a);
  const double right = std::max(lo.a, hi.a);
  const double w = right - left;
  double t = std::numeric_limits<double>::quiet_NaN();
  if (lo.finite && hi.finite) t = cubic_min(lo, hi);
  if (!hi.finite) t = lo.a + 0.1 * (hi.a - lo.a);
  if (!std::isfinite(t)) t = 0.5 * (lo.a + hi.a);
  return std::clamp(t, left + 0.01 * w, right - 0.01 * w);
}

}  // namespace detail

/// Finds a step a > 0 along -g satisfying the strong Wolfe conditions
///   f(theta - a g) <= f0 - c1 a g'g,   |g(theta - a g)' g| <= c2 g'g.
/// `fn(theta)` must return {value, gradient}. When no such step is found in
/// max_evals evaluations the best sufficient-decrease step is returned (or the
/// smallest trial step if none decreased) with `fallback` set. A zero gradient
/// returns step 0 without evaluating.
template <class Fn>
LineSearchResult wolfe_step(const Vector& theta, double f0, const Vector& g, Fn&& fn,
                            const WolfeOptions& opt) {
  if (!(opt.c1 > 0.0 && opt.c1 < opt.c2 && opt.c2 < 1.0))
    throw DimensionError("wolfe_step: need 0 < c1 < c2 < 1");
  LineSearchResult res;
  res.value = f0;
  const double gg = g.squaredNorm();
  if (gg == 0.0) return res;
  if (!std::isfinite(f0) || !std::isfinite(gg))
    throw LineSearchError("wolfe_step: objective or gradient not finite at the start point");
  const double d0 = -gg;

  struct Seen {
    detail::Trial t;
    int index;
  };
  std::vector<Seen> seen;
  auto eval = [&](double a) {
    auto [f, grad] = fn(Vector(theta - a * g));
    detail::Trial t;
    t.a = a;
    t.f = f;
    t.slope = -grad.dot(g);
    t.finite = std::isfinite(f) && std::isfinite(t.slope);
    seen.push_back({t, res.evals});
    ++res.evals;
    return t;
  };
  auto sufficient = [&](const detail::Trial& t) { return t.finite && t.f <= f0 + opt.c1 * t.a * d0; };
  auto curvature = [&](const detail::Trial& t) { return std::abs(t.slope) <= -opt.c2 * d0; };
  auto accept = [&](const detail::Trial& t) {
    res.step = t.a;
    res.value = t.f;
    res.accepted_eval = seen.back().index;
    for (const auto& s : seen)
      if (s.t.a == t.a) res.accepted_eval = s.index;
    res.sufficient_decrease = sufficient(t);
    return res;
  };

  detail::Trial prev{0.0, f0, d0, true};
  double a = opt.initial_step > 0.0 ? opt.initial_step : 1.0;
  bool bracketed = false;
  detail::Trial lo, hi;

  while (res.evals < opt.max_evals) {
    const detail::Trial cur = eval(a);
    if (!sufficient(cur) || (res.evals > 1 && cur.f >= prev.f)) {
      lo = prev;
      hi = cur;
      bracketed = true;
      break;
    }
    if (curvature(cur)) return accept(cur);
    if (cur.slope >= 0.0) {
      lo = cur;
      hi = prev;
      bracketed = true;
      break;
    }
    prev = cur;
    a *= 2.0;
  }

  while (bracketed && res.evals < opt.max_evals) {
    const double span = std::abs(hi.a - lo.a);
    if (span <= 1e-14 * std::max(std::abs(lo.a), std::abs(hi.a))) break;
    const detail::Trial cur = eval(detail::interpolate(lo, hi));
    if (!sufficient(cur) || cur.f >= lo.f) {
      hi = cur;
      continue;
    }
    if (curvature(cur)) return accept(cur);
    if (cur.slope * (hi.a - lo.a) >= 0.0) hi = lo;
    lo = cur;
  }

  // Fallback.
  res.fallback = true;
  const Seen* best = nullptr;
  const Seen* smallest = nullptr;
  for (const auto& s : seen) {
    if (sufficient(s.t) && (!best || s.t.f < best->t.f)) best = &s;
    if (s.t.finite && (!smallest || s.t.a < smallest->t.a)) smallest = &s;
  }
  const Seen* pick = best ? best : smallest;
  if (!pick) throw LineSearchError("wolfe_step: objective not finite at any trial step");
  res.step = pick->t.a;
  res.value = pick->t.f;
  res.accepted_eval = pick->index;
  res.sufficient_decrease = sufficient(pick->t);
  return res;
}

// --- Training loop -----------------------------------------------------------

/// How the first trial step of each line search is chosen.
enum class StepInit {
  unit,      // always 1
  adaptive,  // min(1, 1/||g||_1) first, then previous step * min(2, ||g_prev||^2 / ||g||^2)
};

struct TrainConfig {
  Index bits = 32;
  int epochs = 5;
  Index batch_size = 1000;
  int max_iterations = 0;  // 0: epochs x batches
  std::uint64_t seed = 0;
  VariantConfig method{};
  WolfeOptions wolfe{};
  StepInit step_init = StepInit::adaptive;
  int line_search_retries = 5;
  bool full_cost_each_epoch = true;

  void validate(Index n_train) const {
    method.validate();
    if (epochs < 0) throw DimensionError("epochs must be non-negative");
    if (bits < 1) throw DimensionError("bits must be positive");
    if (batch_size < 1 || batch_size > n_train)
      throw DimensionError("batch size " + std::to_string(batch_size) + " not in [1, N=" +
                           std::to_string(n_train) + "]");
    if (!(wolfe.c1 > 0.0 && wolfe.c1 < wolfe.c2 && wolfe.c2 < 1.0))
      throw DimensionError("Wolfe constants must satisfy 0 < c1 < c2 < 1");
    if (wolfe.max_evals < 1) throw DimensionError("max line-search evaluations must be positive");
  }
};

struct TraceRow {
  int iteration = 0;
  int epoch = 0;
  ObjectiveParts parts;
  double step = 0.0;
  int evals = 0;
  bool fallback = false;
};

struct EpochCost {
  int epoch = 0;  // 0 is the initial parameters
  ObjectiveParts parts;
};

struct TrainReport {
  std::vector<TraceRow> trace;
  std::vector<EpochCost> epoch_costs;
  InitResult init;
  double wall_seconds = 0.0;
};

struct TrainResult {
  NetworkParams params;
  TrainReport report;
};

/// Objective of the configured method on the whole (clean) training set. The
/// denoising model is scored without corruption.
inline ObjectiveParts full_objective(const NetworkParams& p, const DataMatrix& train,
                                     const JacobianTargets* tangents, const VariantConfig& method) {
  return evaluate_loss(p, train, train, method.needs_tangents() ? tangents : nullptr,
                       method.loss_spec(), false)
      .parts;
}

inline TrainResult train(const DataMatrix& x_train, const JacobianTargets* tangents,
                         const TrainConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const Index n = x_train.cols();
  const Index dims = x_train.rows();
  Rng rng(cfg.seed);
  TrainResult out;

  if (cfg.method.kind == Method::lsh) {
    out.params = lsh_generate(dims, cfg.bits, cfg.seed);
    return out;
  }
  cfg.validate(n);
  if (cfg.method.needs_tangents() &&
      (tangents == nullptr || tangents->size() != static_cast<std::size_t>(n)))
    throw DimensionError("train: tangent targets required for every training point");

  out.report.init = init_params(x_train, cfg.bits, rng);
  NetworkParams params = out.report.init.params;
  const LossSpec spec = cfg.method.loss_spec();
  const JacobianTargets* full_targets = cfg.method.needs_tangents() ? tangents : nullptr;

  if (cfg.full_cost_each_epoch && cfg.epochs > 0)
    out.report.epoch_costs.push_back({0, full_objective(params, x_train, tangents, cfg.method)});

  Vector theta = params.to_vector();
  NetworkParams probe = params;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  const Index n_batches = (n + cfg.batch_size - 1) / cfg.batch_size;
  int iteration = 0;
  double prev_step = 0.0;
  double prev_gg = 0.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.max_iterations > 0 && iteration >= cfg.max_iterations) break;
    std::shuffle(perm.begin(), perm.end(), rng);
    DataMatrix permuted(dims, n);
    for (Index j = 0; j < n; ++j) permuted.col(j) = x_train.col(perm[static_cast<std::size_t>(j)]);
    DataMatrix inputs_all = cfg.method.kind == Method::dautobin
                                ? corrupt_columns(permuted, cfg.method.corruption_t, rng)
                                : permuted;

    for (Index b = 0; b < n_batches; ++b) {
      if (cfg.max_iterations > 0 && iteration >= cfg.max_iterations) break;
      const Index begin = b * cfg.batch_size;
      const Index len = std::min(cfg.batch_size, n - begin);
      const DataMatrix targets = permuted.middleCols(begin, len);
      const DataMatrix inputs = inputs_all.middleCols(begin, len);
      JacobianTargets batch_targets;
      if (full_targets)
        batch_targets = full_targets->select(
            std::span<const Index>(perm.data() + begin, static_cast<std::size_t>(len)));
      const JacobianTargets* bt = full_targets ? &batch_targets : nullptr;

      std::vector<ObjectiveParts> evaluated;
      auto fn = [&](const Vector& th) {
        probe.assign(th);
        Evaluation ev = evaluate_loss(probe, inputs, targets, bt, spec, true);
        evaluated.push_back(ev.parts);
        return std::pair<double, Vector>(ev.parts.total(), ev.grad.to_vector());
      };

      params.assign(theta);
      const Evaluation start = evaluate_loss(params, inputs, targets, bt, spec, true);
      const Vector g = start.grad.to_vector();
      const double gg = g.squaredNorm();

      WolfeOptions wo = cfg.wolfe;
      if (cfg.step_init == StepInit::adaptive) {
        wo.initial_step = (prev_step > 0.0 && gg > 0.0)
                              ? prev_step * std::min(2.0, prev_gg / gg)
                              : std::min(1.0, 1.0 / std::max(g.lpNorm<1>(), 1e-300));
      }
      LineSearchResult ls;
      for (int attempt = 0;; ++attempt) {
        evaluated.clear();
        try {
          ls = wolfe_step(theta, start.parts.total(), g, fn, wo);
          break;
        } catch (const LineSearchError&) {
          if (attempt >= cfg.line_search_retries) throw;
          wo.initial_step *= 0.5;
        }
      }

      ++iteration;
      TraceRow row;
      row.iteration = iteration;
      row.epoch = epoch;
      row.step = ls.step;
      row.evals = ls.evals;
      row.fallback = ls.fallback;
      row.parts = ls.accepted_eval >= 0 ? evaluated[static_cast<std::size_t>(ls.accepted_eval)]
                                        : start.parts;
      out.report.trace.push_back(row);

      if (ls.step > 0.0) {
        theta -= ls.step * g;
        prev_step = ls.step;
        prev_gg = gg;
      }
    }
    params.assign(theta);
    if (cfg.full_cost_each_epoch)
      out.report.epoch_costs.push_back({epoch, full_objective(params, x_train, tangents, cfg.method)});
  }

  params.assign(theta);
  out.params = params;
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace ajb
