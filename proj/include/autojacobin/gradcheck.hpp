#pragma once

// Finite-difference validation of the analytic gradients for every trained
// model, term by term and in total.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "autojacobin/network.hpp"
#include "autojacobin/synthetic.hpp"
#include "autojacobin/trainer.hpp"
#include "autojacobin/variants.hpp"

namespace ajb {

struct GradInstance {
  NetworkParams params;
  DataMatrix clean;
  DataMatrix corrupted;  // frozen corruption of `clean` (denoising model)
  JacobianTargets tangents;
};

/// Random weights ~ N(0, 0.5^2), biases ~ N(0, 0.3^2), points ~ N(0, 0.4^2)
/// and one random orthonormal tangent basis of rank in [1, min(d, D)] per
/// point.
inline GradInstance make_grad_instance(Index dims, Index bits, Index points, std::uint64_t seed,
                                       double corruption_t = kDautobinDefaultCorruption) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GradInstance inst;
  NetworkParams& p = inst.params;
  p = NetworkParams::zeros(dims, bits);
  for (Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = 0.5 * gauss(rng);
  for (Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = 0.5 * gauss(rng);
  for (Index i = 0; i < bits; ++i) p.b1(i) = 0.3 * gauss(rng);
  for (Index i = 0; i < dims; ++i) p.b2(i) = 0.3 * gauss(rng);
  inst.clean.resize(dims, points);
  for (Index i = 0; i < inst.clean.size(); ++i) inst.clean.data()[i] = 0.4 * gauss(rng);
  std::uniform_int_distribution<Index> rank(1, std::min(bits, dims));
  std::vector<Matrix> bases;
  for (Index i = 0; i < points; ++i) bases.push_back(random_orthonormal(dims, rank(rng), rng));
  inst.tangents = JacobianTargets::from_bases(std::move(bases));
  inst.corrupted = corrupt_columns(inst.clean, corruption_t, rng);
  return inst;
}

struct TermCheck {
  std::string term;
  GradCheckReport report;
};

/// Checks each objective term in isolation, then the full objective.
/// `fault` is added to the analytic dW1(0, 0) to confirm the checker notices.
inline std::vector<TermCheck> check_method_gradients(const GradInstance& inst,
                                                     const VariantConfig& method, double h,
                                                     double fault = 0.0) {
  const bool denoise = method.kind == Method::dautobin;
  const DataMatrix& inputs = denoise ? inst.corrupted : inst.clean;
  const JacobianTargets* tangents = method.needs_tangents() ? &inst.tangents : nullptr;
  const LossSpec base = method.loss_spec();

  struct Term {
    const char* name;
    TermWeights weights;
  };
  std::vector<Term> terms{{"recon", {1.0, 0.0, 0.0}}};
  if (method.kind == Method::auto_jacobin) terms.push_back({"jacobian", {0.0, 1.0, 0.0}});
  if (method.kind == Method::cautobin) terms.push_back({"contractive", {0.0, 1.0, 0.0}});
  terms.push_back({"binary", {0.0, 0.0, 1.0}});
  terms.push_back({"total", {1.0, 1.0, 1.0}});

  std::vector<TermCheck> out;
  for (const auto& t : terms) {
    LossSpec spec = base;
    spec.weights = t.weights;
    const auto value = [&](const NetworkParams& q) {
      return evaluate_loss(q, inputs, inst.clean, tangents, spec, false).parts.total();
    };
    GradientSet g = evaluate_loss(inst.params, inputs, inst.clean, tangents, spec, true).grad;
    g.dw1(0, 0) += fault;
    out.push_back({t.name, gradient_check(inst.params, value, g, h)});
  }
  return out;
}

}  // namespace ajb
