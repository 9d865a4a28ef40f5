#pragma once

// The 3-bit simplex experiment: 1,000 points on the open triangle
// x1 + x2 + x3 = 1, x_i > 0, encoded with three bits. A plane cut by the three
// coordinate hyperplanes of the hidden space has at most 7 cells, so at most
// 7 distinct codes can occur.

#include <cstdint>
#include <set>
#include <vector>

#include "autojacobin/hamming.hpp"
#include "autojacobin/matrix_io.hpp"
#include "autojacobin/network.hpp"
#include "autojacobin/synthetic.hpp"
#include "autojacobin/tangent.hpp"
#include "autojacobin/trainer.hpp"

namespace ajb {

/// Defaults: 50 full-batch iterations (batch = all 1,000 points).
struct ToyOptions {
  Index points = 1000;
  double alpha = kDefaultAlpha;
  int epochs = 50;
  Index batch_size = 1000;
  std::uint64_t seed = 1;
};

struct ToySummary {
  Index distinct_codes = 0;     // codes sign(W1 x)
  Index distinct_orthants = 0;  // hidden-layer orthants sign(W1 x + b1)
  double mean_abs_hidden = 0.0;
  ObjectiveParts cost;
};

struct ToyResult {
  ToySummary init;
  ToySummary trained;
  DataMatrix data;  // normalized
  Matrix hidden;    // 3 x N hidden activations after training
  BinaryCodes codes;  // sign(W1 x) after training
  NetworkParams params;
  TrainReport report;
};

inline Index count_distinct_codes(const BinaryCodes& codes) {
  std::set<std::vector<std::uint8_t>> seen;
  for (Index i = 0; i < codes.count(); ++i) {
    const auto s = codes.code_span(i);
    seen.emplace(s.begin(), s.end());
  }
  return static_cast<Index>(seen.size());
}

inline Matrix hidden_features(const NetworkParams& p, const DataMatrix& x) {
  return ((p.w1 * x).colwise() + p.b1).array().tanh().matrix();
}

inline ToySummary summarize_toy(const NetworkParams& p, const DataMatrix& x,
                                const JacobianTargets& tangents, double alpha) {
  ToySummary s;
  s.distinct_codes = count_distinct_codes(encode(p, x, /*use_bias=*/false));
  s.distinct_orthants = count_distinct_codes(encode(p, x, /*use_bias=*/true));
  s.mean_abs_hidden = hidden_features(p, x).cwiseAbs().mean();
  s.cost = objective(p, x, tangents, ObjectiveConfig{alpha, kDefaultEpsilon});
  return s;
}

inline ToyResult run_toy(const ToyOptions& opt) {
  constexpr Index kBits = 3;
  Rng data_rng(opt.seed);
  const DataMatrix raw = sample_simplex(opt.points, data_rng);
  const Normalizer nz = fit_normalizer(raw);
  ToyResult out;
  out.data = nz.apply(raw);

  const auto tangents = estimate_all_tangents(out.data, kBits);
  const auto targets = JacobianTargets::from_tangents(tangents);

  TrainConfig cfg;
  cfg.bits = kBits;
  cfg.epochs = opt.epochs;
  cfg.batch_size = opt.batch_size;
  cfg.seed = opt.seed;
  cfg.method = VariantConfig::defaults(Method::auto_jacobin);
  cfg.method.alpha = opt.alpha;
  auto trained = train(out.data, &targets, cfg);
  trained.params.scale = nz.scale;

  out.init = summarize_toy(trained.report.init.params, out.data, targets, opt.alpha);
  out.trained = summarize_toy(trained.params, out.data, targets, opt.alpha);
  out.hidden = hidden_features(trained.params, out.data);
  out.codes = encode(trained.params, out.data);
  out.params = std::move(trained.params);
  out.report = std::move(trained.report);
  return out;
}

}  // namespace ajb
