// Train 16-bit codes on a small synthetic manifold and compare retrieval
// quality with random-projection codes.

#include <cstdio>

#include "autojacobin/autojacobin.hpp"

int main() {
  using namespace ajb;

  ManifoldSpec spec;
  spec.dims = 32;
  spec.intrinsic = 4;
  const CurvedManifold manifold(spec);
  Rng rng(7);
  const DataMatrix train_raw = manifold.sample(3000, rng);
  const DataMatrix base_raw = manifold.sample(5000, rng);
  const DataMatrix query_raw = manifold.sample(100, rng);

  const Normalizer nz = fit_normalizer(train_raw);
  const DataMatrix train_x = nz.apply(train_raw);
  const Index bits = 16;

  const auto tangents = estimate_all_tangents(train_x, bits);
  const auto targets = JacobianTargets::from_tangents(tangents);

  TrainConfig cfg;
  cfg.bits = bits;
  cfg.batch_size = 1000;
  cfg.seed = 1;
  TrainResult learned = train(train_x, &targets, cfg);
  learned.params.scale = nz.scale;

  const NetworkParams random_proj = lsh_generate(spec.dims, bits, 1);

  const Index k = 10;
  const Index depth = 500;
  const GroundTruth gt = compute_ground_truth(base_raw, query_raw, k);
  auto score = [&](const NetworkParams& p) {
    const BinaryCodes b = encode(p, nz.apply(base_raw));
    const BinaryCodes q = encode(p, nz.apply(query_raw));
    return recall_curve(gt, b, q, depth).m_recall;
  };

  std::printf("iterations: %zu, cost %.1f -> %.1f\n", learned.report.trace.size(),
              learned.report.epoch_costs.front().parts.total(),
              learned.report.epoch_costs.back().parts.total());
  std::printf("m-Recall@%ld (k=%ld)  learned: %.4f  random projections: %.4f\n",
              static_cast<long>(depth), static_cast<long>(k), score(learned.params),
              score(random_proj));
  return 0;
}
